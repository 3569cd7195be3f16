#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reflect/embedding.hpp"
#include "reflect/types.hpp"

namespace reflect {

using TokenPair = std::pair<std::string, std::string>;
using PairList = std::vector<TokenPair>;

// One transfer direction; the attribute vector is implied by the dataset.
struct Triplet {
  std::string source;
  std::string target;
};

// Word pairs carrying one binary attribute, split for train/val/test. Every
// undirected pair (m, w) appears as the two directed triplets m->w and w->m
// within its split.
struct AttributeDataset {
  std::string attribute;
  PairList train_pairs, val_pairs, test_pairs;
  std::vector<Triplet> train, val, test;

  std::vector<std::string> all_tokens() const;
};

struct SplitCounts {
  Index train = 0;
  Index val = 0;
  Index test = 0;
  std::uint64_t seed = 1;
};

std::vector<Triplet> expand_directed(const PairList& pairs);

// Seeded shuffle, then slice into the requested split sizes.
AttributeDataset make_dataset(const std::string& attribute, PairList pairs,
                              const SplitCounts& counts);

// `source TAB target` lines, UTF-8, `#` comments and blank lines allowed.
PairList read_pair_file(const std::string& path);
void write_pair_file(const std::string& path, const PairList& pairs);

AttributeDataset load_pairs(const std::string& path, const SplitCounts& counts,
                            const std::string& attribute);
// Explicit per-split files; the splits must not share pairs.
AttributeDataset load_pair_splits(const std::string& train_path,
                                  const std::string& val_path,
                                  const std::string& test_path,
                                  const std::string& attribute);

// Words without the attribute; transfer must leave them in place.
struct NonAttributeSet {
  std::string attribute;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Uniform seeded sample from the vocabulary, excluding every token that
// appears in the attribute pairs. Train and test are disjoint.
NonAttributeSet sample_non_attribute(const EmbeddingTable& table,
                                     const AttributeDataset& dataset,
                                     Index n_train, Index n_test,
                                     std::uint64_t seed);

std::vector<std::string> read_token_file(const std::string& path);
void write_token_file(const std::string& path,
                      const std::vector<std::string>& tokens);

}  // namespace reflect
