#include "reflect/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reflect/io.hpp"

namespace reflect {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_count(std::string_view s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && out >= 0;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, Matrix vectors)
    : tokens_(std::move(tokens)), vectors_(std::move(vectors)) {
  if (tokens_.empty() || vectors_.cols() < 1)
    throw DataError("embedding table must have at least one token and one dimension");
  if (static_cast<Index>(tokens_.size()) != vectors_.rows())
    throw DimensionError("token count does not match vector row count");
  if (!vectors_.allFinite())
    throw DataError("embedding table contains non-finite values");
  index_.reserve(tokens_.size());
  for (Index i = 0; i < size(); ++i) {
    if (!index_.emplace(tokens_[static_cast<std::size_t>(i)], i).second)
      throw DataError("duplicate token: " + tokens_[static_cast<std::size_t>(i)]);
  }
  norms_ = vectors_.rowwise().norm();
}

std::optional<Index> EmbeddingTable::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vector EmbeddingTable::lookup(const std::string& token) const {
  const auto idx = find(token);
  if (!idx) throw UnknownTokenError(token);
  return vectors_.row(*idx).transpose();
}

Index EmbeddingTable::nearest_index(const Vector& query) const {
  if (query.size() != dim())
    throw DimensionError("nearest_token: query dimension mismatch");
  const double qn = query.norm();
  if (qn == 0.0) throw ZeroNormError("nearest_token: zero-norm query");
  const Vector scores = vectors_ * query;
  Index best = -1;
  double best_cos = -2.0;
  for (Index i = 0; i < size(); ++i) {
    if (norms_[i] == 0.0) continue;
    const double c = scores[i] / (norms_[i] * qn);
    if (c > best_cos) {
      best_cos = c;
      best = i;
    }
  }
  if (best < 0) throw NumericError("nearest_token: all candidate rows have zero norm");
  return best;
}

std::pair<std::string, double> EmbeddingTable::nearest_token(
    const Vector& query) const {
  const Index i = nearest_index(query);
  const double sim =
      vectors_.row(i).dot(query) / (norms_[i] * query.norm());
  return {token(i), sim};
}

std::vector<Index> EmbeddingTable::nearest_indices(const Matrix& queries) const {
  if (queries.rows() != dim())
    throw DimensionError("nearest_indices: query dimension mismatch");
  const Index n = queries.cols();
  std::vector<Index> out(static_cast<std::size_t>(n), -1);
  constexpr Index kChunk = 64;  // bounds the |V| x chunk score block
  for (Index c0 = 0; c0 < n; c0 += kChunk) {
    const Index m = std::min(kChunk, n - c0);
    const Matrix scores = vectors_ * queries.middleCols(c0, m);
    for (Index j = 0; j < m; ++j) {
      const double qn = queries.col(c0 + j).norm();
      if (qn == 0.0) continue;
      Index best = -1;
      double best_cos = -2.0;
      for (Index i = 0; i < size(); ++i) {
        if (norms_[i] == 0.0) continue;
        const double c = scores(i, j) / (norms_[i] * qn);
        if (c > best_cos) {
          best_cos = c;
          best = i;
        }
      }
      out[static_cast<std::size_t>(c0 + j)] = best;
    }
  }
  return out;
}

double cosine(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw DimensionError("cosine: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    throw ZeroNormError("cosine: undefined for zero-norm input");
  return u.dot(v) / (nu * nv);
}

EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<Index> limit) {
  if (limit && *limit < 1) throw DataError("load_embeddings: limit must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);

  std::vector<std::string> tokens;
  std::vector<double> values;
  Index dim = -1;
  long long header_rows = -1;
  long long header_dim = -1;

  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (first_content_line) {
      first_content_line = false;
      // `|V| D` header: exactly two integer fields
      long long a = 0, b = 0;
      if (fields.size() == 2 && parse_count(fields[0], a) && parse_count(fields[1], b)) {
        header_rows = a;
        header_dim = b;
        continue;
      }
    }

    if (limit && static_cast<Index>(tokens.size()) >= *limit) break;

    if (fields.size() < 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected token and values");
    const Index row_dim = static_cast<Index>(fields.size()) - 1;
    if (dim < 0) {
      dim = row_dim;
      if (header_dim >= 0 && header_dim != dim)
        throw ParseError("line " + std::to_string(line_no) + ": dimension " +
                         std::to_string(row_dim) + " does not match header " +
                         std::to_string(header_dim));
    } else if (row_dim != dim) {
      throw ParseError("line " + std::to_string(line_no) + ": dimension " +
                       std::to_string(row_dim) + " does not match " +
                       std::to_string(dim));
    }
    std::string token(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double x = 0;
      if (!parse_double(fields[k], x))
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric field '" +
                         std::string(fields[k]) + "'");
      if (!std::isfinite(x))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
      values.push_back(x);
    }
    tokens.push_back(std::move(token));
  }

  if (tokens.empty()) throw ParseError("empty embedding file: " + path);
  if (header_rows >= 0) {
    const long long expect = limit ? std::min<long long>(header_rows, *limit)
                                   : header_rows;
    if (static_cast<long long>(tokens.size()) != expect)
      throw ParseError("header row count " + std::to_string(header_rows) +
                       " inconsistent with " + std::to_string(tokens.size()) +
                       " parsed rows");
  }

  const Index rows = static_cast<Index>(tokens.size());
  Matrix mat(rows, dim);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < dim; ++j)
      mat(i, j) = values[static_cast<std::size_t>(i * dim + j)];

  // duplicate detection (with line numbers: data lines are sequential)
  {
    std::unordered_map<std::string, std::size_t> seen;
    seen.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto [it, fresh] = seen.emplace(tokens[i], i);
      if (!fresh)
        throw ParseError("duplicate token '" + tokens[i] + "' (rows " +
                         std::to_string(it->second + 1) + " and " +
                         std::to_string(i + 1) + ")");
    }
  }
  return EmbeddingTable(std::move(tokens), std::move(mat));
}

void save_subset(const EmbeddingTable& table, const std::string& path,
                 const std::vector<std::string>* tokens) {
  std::vector<Index> rows;
  if (tokens) {
    rows.reserve(tokens->size());
    for (const auto& t : *tokens) {
      const auto idx = table.find(t);
      if (!idx) throw UnknownTokenError(t);
      rows.push_back(*idx);
    }
  } else {
    rows.resize(static_cast<std::size_t>(table.size()));
    for (Index i = 0; i < table.size(); ++i) rows[static_cast<std::size_t>(i)] = i;
  }

  std::ostringstream out;
  out << rows.size() << ' ' << table.dim() << '\n';
  for (const Index i : rows) {
    out << table.token(i);
    for (Index j = 0; j < table.dim(); ++j)
      out << ' ' << format_g17(table.vectors()(i, j));
    out << '\n';
  }
  atomic_write_text(path, out.str());
}

}  // namespace reflect
