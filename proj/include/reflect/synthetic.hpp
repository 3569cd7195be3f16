#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/geometry.hpp"
#include "reflect/types.hpp"

namespace reflect {

// Desk-scale dataset with known ground-truth mirrors. Each pair is built as
// (q + t a, q - t a) around an on-mirror point q, so the planted geometry is
// checkable by construction. With clusters > 1 the pairs use different
// mirrors around separated centers and no single hyperplane can reflect them
// all.
struct SyntheticSpec {
  Index dim = 20;
  Index n_pairs = 60;
  Index clusters = 1;
  double noise = 0.0;           // sigma added to the reflected partner
  double cluster_offset = 4.0;  // distance of cluster centers from the origin
  Index n_nonattr_train = 0;
  Index n_nonattr_test = 200;
  double jitter = 0.0;  // off-mirror jitter for non-attribute words
  Index n_distractors = 200;
  SplitCounts split{40, 10, 10, 1};
  std::uint64_t seed = 1;
  std::string attribute = "planted";
  std::vector<Mirror> mirrors;  // sampled when empty
};

struct SyntheticData {
  EmbeddingTable table;
  AttributeDataset dataset;
  NonAttributeSet nonattr;
  std::vector<Mirror> mirrors;     // ground truth, one per cluster
  std::vector<int> pair_cluster;   // cluster id per generated pair
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

SyntheticData synth_generate(const SyntheticSpec& spec);

// embeddings.txt, pairs.tsv, nonattr_train.txt, nonattr_test.txt,
// mirrors.json under out_dir, all in the standard formats.
void write_synthetic(const SyntheticData& data, const std::string& out_dir);

}  // namespace reflect
