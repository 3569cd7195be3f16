#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "reflect/baselines.hpp"
#include "reflect/dataset.hpp"
#include "reflect/embedding.hpp"
#include "reflect/model.hpp"
#include "reflect/types.hpp"

namespace reflect {

enum class ModelKind {
  kRef,
  kRefPm,
  kMlp,
  kDiff,
  kDiffPlus,
  kDiffMinus,
  kMeanDiff,
  kMeanDiffPlus,
  kMeanDiffMinus,
};

std::string kind_name(ModelKind kind);
ModelKind parse_kind(const std::string& name);
bool kind_is_trained(ModelKind kind);     // ref / refpm / mlp
bool kind_needs_knowledge(ModelKind kind);  // diff / meandiff

struct TrainConfig {
  double alpha = 1e-4;
  Index max_epochs = 2000;
  Index batch_size = 32;
  std::uint64_t seed = 1;
  Index patience = 50;
  Index n_train_size = 10;  // |N_train| to sample when no file is given
  double loss_weight_attr = 1.0;
  double loss_weight_non = 1.0;
  ModelKind kind = ModelKind::kRefPm;
  Index hidden = 300;
  Index mirror_layers = 2;
  Index baseline_layers = 3;
  bool z_trainable = true;
  double norm_eps = 1e-12;  // regularizer on a.a inside the training loss
};

using TrainableModel = std::variant<RefModel, MlpTransferModel>;

ParamPack pack(TrainableModel& model);
Index model_dim(const TrainableModel& model);
Vector transfer(const TrainableModel& model, const Vector& v_x);

struct LossOptions {
  double weight_attr = 1.0;
  double weight_non = 1.0;
  double norm_eps = 1e-12;
  bool strict = false;  // throw on unresolvable tokens instead of skipping
};

// Resolved batch: (v_x, v_t) for attribute triplets, v_x for non-attribute
// words.
struct VectorBatch {
  std::vector<std::pair<Vector, Vector>> attr;
  std::vector<Vector> non;
};

// Mean squared transfer error over the attribute batch plus mean squared
// displacement over the non-attribute batch, each averaged over its own
// batch. An empty batch contributes zero. When grad is non-null it receives
// the full gradient in pack(model) order.
double model_loss(const TrainableModel& model, const VectorBatch& batch,
                  const LossOptions& opts, Vector* grad);

struct LossResult {
  double value = 0.0;
  Vector grad;
  Index skipped = 0;  // unresolvable tokens
};

LossResult loss(const TrainableModel& model,
                const std::vector<Triplet>& attr_batch,
                const std::vector<std::string>& non_batch,
                const EmbeddingTable& table, const LossOptions& opts = {});

struct EpochStats {
  double loss = 0.0;
  double val_accuracy = 0.0;  // NaN when there is no validation split
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  Index best_epoch = -1;
  double best_val_accuracy = 0.0;
  Index skipped_train = 0;  // unresolvable training tokens
  long steps = 0;
};

struct TrainResult {
  TrainableModel model;
  TrainHistory history;
  bool diverged = false;
};

// Minibatch Adam with a seeded shuffle per epoch; the entire non-attribute
// training set joins every step. Keeps the parameters with the best
// validation accuracy (earliest epoch on ties) and stops early after
// `patience` epochs without improvement. Without a validation split the
// lowest training loss decides instead.
TrainResult train(TrainableModel model, const AttributeDataset& dataset,
                  const NonAttributeSet& nonattr, const EmbeddingTable& table,
                  const TrainConfig& config);

}  // namespace reflect
