#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>

#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/mlp.hpp"
#include "reflect/model.hpp"
#include "reflect/types.hpp"

namespace reflect {

struct DifferenceVector {
  Vector d;
  std::optional<TokenPair> source_pair;  // absent for mean differences
};

enum class Side { kM, kF, kNone };

// Side labels per token, built from dataset pair files only. A token seen on
// both sides (possible in antonym-style data) gets kNone: no usable knowledge.
class KnowledgeTable {
 public:
  static KnowledgeTable from_dataset(const AttributeDataset& dataset);

  void insert(const std::string& token, Side side);
  Side side(const std::string& token) const;
  std::size_t conflict_count() const { return conflicts_; }

 private:
  std::unordered_map<std::string, Side> sides_;
  std::size_t conflicts_ = 0;
};

// v_x - d for M-side words, v_x + d for F-side words. Requires a side.
Vector analogy_transfer(const Vector& v_x, const DifferenceVector& d, Side side);

// v_x + d or v_x - d for every word, no knowledge consulted.
Vector analogy_transfer_fixed(const Vector& v_x, const DifferenceVector& d,
                              bool add);

// Mean of v_m - v_w over the training pairs. Unresolvable pairs are skipped;
// the count comes back through skipped when given.
DifferenceVector mean_diff(const PairList& train_pairs,
                           const EmbeddingTable& table,
                           std::size_t* skipped = nullptr);

// Tries every training pair's difference vector and keeps the one with the
// best knowledge-based accuracy on the validation triplets. Ties go to the
// earliest training pair.
DifferenceVector select_diff(const PairList& train_pairs,
                             const PairList& val_pairs,
                             const EmbeddingTable& table,
                             const KnowledgeTable& knowledge);

// Direct MLP transfer baseline: v_y = net([v_x ; z]).
struct MlpTransferModel {
  AttributeVector attribute;
  MlpParams net;

  Index dim() const { return attribute.z.size(); }
};

MlpTransferModel make_mlp_model(const std::string& attribute_id, Index dim,
                                Index hidden, Index n_layers,
                                std::uint64_t seed, bool z_trainable = true);

void validate(const MlpTransferModel& model);

Vector transfer(const MlpTransferModel& model, const Vector& v_x);

// net parameters, then z when trainable.
ParamPack pack(MlpTransferModel& model);

}  // namespace reflect
