#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "reflect/baselines.hpp"
#include "reflect/model.hpp"
#include "reflect/training.hpp"
#include "reflect/types.hpp"

namespace reflect {

// Versioned JSON container for every model kind. Weights are stored as JSON
// numbers, which round-trip doubles exactly. Files are written atomically.
struct Checkpoint {
  ModelKind kind = ModelKind::kRef;
  Index dim = 0;
  std::uint64_t seed = 0;
  long steps = 0;
  nlohmann::json config;  // training config snapshot
  std::variant<RefModel, MlpTransferModel, DifferenceVector> model;

  const RefModel& ref() const { return std::get<RefModel>(model); }
  const MlpTransferModel& mlp() const { return std::get<MlpTransferModel>(model); }
  const DifferenceVector& diff() const { return std::get<DifferenceVector>(model); }
};

nlohmann::json to_json(const MlpParams& params);
MlpParams mlp_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace reflect
