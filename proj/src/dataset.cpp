#include "reflect/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "reflect/io.hpp"
#include "reflect/rng.hpp"

namespace reflect {

namespace {

// Unordered key so (m, w) and (w, m) collide: they would expand to the same
// directed triplets.
std::string pair_key(const TokenPair& p) {
  return p.first < p.second ? p.first + "\t" + p.second
                            : p.second + "\t" + p.first;
}

void check_no_overlap(const AttributeDataset& d) {
  std::unordered_set<std::string> seen;
  for (const PairList* pairs : {&d.train_pairs, &d.val_pairs, &d.test_pairs}) {
    for (const auto& p : *pairs) {
      if (!seen.insert(pair_key(p)).second)
        throw DataError("pair (" + p.first + ", " + p.second +
                        ") appears in more than one split");
    }
  }
}

}  // namespace

std::vector<std::string> AttributeDataset::all_tokens() const {
  std::vector<std::string> tokens;
  std::unordered_set<std::string> seen;
  for (const PairList* pairs : {&train_pairs, &val_pairs, &test_pairs}) {
    for (const auto& [m, w] : *pairs) {
      if (seen.insert(m).second) tokens.push_back(m);
      if (seen.insert(w).second) tokens.push_back(w);
    }
  }
  return tokens;
}

std::vector<Triplet> expand_directed(const PairList& pairs) {
  std::vector<Triplet> triplets;
  triplets.reserve(pairs.size() * 2);
  for (const auto& [m, w] : pairs) {
    triplets.push_back({m, w});
    triplets.push_back({w, m});
  }
  return triplets;
}

AttributeDataset make_dataset(const std::string& attribute, PairList pairs,
                              const SplitCounts& counts) {
  if (counts.train < 0 || counts.val < 0 || counts.test < 0)
    throw DataError("split counts must be non-negative");
  const Index want = counts.train + counts.val + counts.test;
  if (want > static_cast<Index>(pairs.size()))
    throw DataError("split manifest wants " + std::to_string(want) +
                    " pairs but only " + std::to_string(pairs.size()) +
                    " are available");

  Rng rng(counts.seed);
  rng.shuffle(pairs);

  AttributeDataset d;
  d.attribute = attribute;
  auto at = pairs.begin();
  d.train_pairs.assign(at, at + counts.train);
  at += counts.train;
  d.val_pairs.assign(at, at + counts.val);
  at += counts.val;
  d.test_pairs.assign(at, at + counts.test);

  d.train = expand_directed(d.train_pairs);
  d.val = expand_directed(d.val_pairs);
  d.test = expand_directed(d.test_pairs);
  check_no_overlap(d);
  return d;
}

PairList read_pair_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pair file: " + path);

  PairList pairs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected `source TAB target`");
    TokenPair p{line.substr(0, tab), line.substr(tab + 1)};
    if (p.first.find_first_of(" \t") != std::string::npos ||
        p.second.find_first_of(" \t") != std::string::npos)
      throw ParseError("line " + std::to_string(line_no) +
                       ": tokens must not contain whitespace");
    if (p.first == p.second)
      throw ParseError("line " + std::to_string(line_no) +
                       ": pair members must differ");
    if (!seen.insert(pair_key(p)).second)
      throw ParseError("line " + std::to_string(line_no) + ": duplicate pair (" +
                       p.first + ", " + p.second + ")");
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_pair_file(const std::string& path, const PairList& pairs) {
  std::ostringstream out;
  for (const auto& [m, w] : pairs) out << m << '\t' << w << '\n';
  atomic_write_text(path, out.str());
}

AttributeDataset load_pairs(const std::string& path, const SplitCounts& counts,
                            const std::string& attribute) {
  return make_dataset(attribute, read_pair_file(path), counts);
}

AttributeDataset load_pair_splits(const std::string& train_path,
                                  const std::string& val_path,
                                  const std::string& test_path,
                                  const std::string& attribute) {
  AttributeDataset d;
  d.attribute = attribute;
  d.train_pairs = read_pair_file(train_path);
  d.val_pairs = read_pair_file(val_path);
  d.test_pairs = read_pair_file(test_path);
  d.train = expand_directed(d.train_pairs);
  d.val = expand_directed(d.val_pairs);
  d.test = expand_directed(d.test_pairs);
  check_no_overlap(d);
  return d;
}

NonAttributeSet sample_non_attribute(const EmbeddingTable& table,
                                     const AttributeDataset& dataset,
                                     Index n_train, Index n_test,
                                     std::uint64_t seed) {
  if (n_train < 0 || n_test < 0)
    throw DataError("non-attribute sample sizes must be non-negative");

  std::unordered_set<std::string> excluded;
  for (const auto& t : dataset.all_tokens()) excluded.insert(t);

  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(table.size()));
  for (Index i = 0; i < table.size(); ++i)
    if (!excluded.count(table.token(i))) candidates.push_back(i);

  const Index want = n_train + n_test;
  if (want > static_cast<Index>(candidates.size()))
    throw DataError("vocabulary too small: need " + std::to_string(want) +
                    " non-attribute words, have " +
                    std::to_string(candidates.size()));

  Rng rng(seed);
  rng.shuffle(candidates);

  NonAttributeSet s;
  s.attribute = dataset.attribute;
  s.train.reserve(static_cast<std::size_t>(n_train));
  s.test.reserve(static_cast<std::size_t>(n_test));
  for (Index k = 0; k < n_train; ++k)
    s.train.push_back(table.token(candidates[static_cast<std::size_t>(k)]));
  for (Index k = 0; k < n_test; ++k)
    s.test.push_back(
        table.token(candidates[static_cast<std::size_t>(n_train + k)]));
  return s;
}

std::vector<std::string> read_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open token file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    tokens.push_back(line);
  }
  return tokens;
}

void write_token_file(const std::string& path,
                      const std::vector<std::string>& tokens) {
  std::ostringstream out;
  for (const auto& t : tokens) out << t << '\n';
  atomic_write_text(path, out.str());
}

}  // namespace reflect
