#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reflect/types.hpp"

namespace reflect {

// Immutable vocabulary plus one D-dimensional vector per token.
// Row i of vectors() belongs to tokens()[i]. Safe to share across threads.
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> tokens, Matrix vectors);

  Index size() const { return static_cast<Index>(tokens_.size()); }
  Index dim() const { return vectors_.cols(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(Index i) const {
    return tokens_[static_cast<std::size_t>(i)];
  }
  const Matrix& vectors() const { return vectors_; }
  const Vector& row_norms() const { return norms_; }

  std::optional<Index> find(const std::string& token) const;
  bool contains(const std::string& token) const {
    return find(token).has_value();
  }
  Vector lookup(const std::string& token) const;

  // Exact argmax of cosine over the whole vocabulary. The query word is not
  // excluded, so an untouched word can match itself. Ties go to the lowest
  // index; zero-norm rows are skipped as candidates.
  Index nearest_index(const Vector& query) const;
  std::pair<std::string, double> nearest_token(const Vector& query) const;

  // Batched nearest_index, one query per column. A zero-norm query yields -1
  // instead of throwing.
  std::vector<Index> nearest_indices(const Matrix& queries) const;

 private:
  std::vector<std::string> tokens_;
  Matrix vectors_;  // |V| x D
  Vector norms_;
  std::unordered_map<std::string, Index> index_;
};

double cosine(const Vector& u, const Vector& v);

// Text format: optional `|V| D` header, then `token f1 ... fD` per line,
// space-separated (the usual word2vec/GloVe text layout). With `limit`, only
// the first rows are kept; rows are assumed frequency-ordered.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Index> limit = std::nullopt);

// Writes the same text format back out (optionally only the listed tokens)
// with 17 significant digits so a reload is bit-identical.
void save_subset(const EmbeddingTable& table, const std::string& path,
                 const std::vector<std::string>* tokens = nullptr);

}  // namespace reflect
