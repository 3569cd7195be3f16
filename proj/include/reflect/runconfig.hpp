#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/training.hpp"
#include "reflect/types.hpp"

namespace reflect {

// Everything one run needs; the resolved form is written next to the outputs
// so a run can be reproduced from that file alone.
struct RunConfig {
  std::string embedding_path;
  Index vocab_limit = 0;  // 0 keeps the whole table

  std::string attribute = "attr";
  std::string pairs_path;  // split by counts below
  SplitCounts split{0, 0, 0, 1};
  std::string train_pairs_path, val_pairs_path, test_pairs_path;  // explicit split

  Index nonattr_train = 10;
  Index nonattr_test = 1000;
  std::uint64_t nonattr_seed = 1;
  std::string nonattr_train_path, nonattr_test_path;  // files win over sampling

  TrainConfig train;
  std::uint64_t init_seed = 1;

  std::string output_dir = "run_out";

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

RunConfig load_run_config(const std::string& path);

struct RunInputs {
  EmbeddingTable table;
  AttributeDataset dataset;
  NonAttributeSet nonattr;
};

RunInputs load_run_inputs(const RunConfig& config);

}  // namespace reflect
