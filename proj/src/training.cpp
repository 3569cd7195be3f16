#include "reflect/training.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "reflect/geometry.hpp"
#include "reflect/rng.hpp"

namespace reflect {

std::string kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kRef: return "ref";
    case ModelKind::kRefPm: return "refpm";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kDiff: return "diff";
    case ModelKind::kDiffPlus: return "diff+";
    case ModelKind::kDiffMinus: return "diff-";
    case ModelKind::kMeanDiff: return "meandiff";
    case ModelKind::kMeanDiffPlus: return "meandiff+";
    case ModelKind::kMeanDiffMinus: return "meandiff-";
  }
  throw DataError("unreachable model kind");
}

ModelKind parse_kind(const std::string& name) {
  if (name == "ref") return ModelKind::kRef;
  if (name == "refpm" || name == "ref+pm") return ModelKind::kRefPm;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "diff") return ModelKind::kDiff;
  if (name == "diff+") return ModelKind::kDiffPlus;
  if (name == "diff-") return ModelKind::kDiffMinus;
  if (name == "meandiff") return ModelKind::kMeanDiff;
  if (name == "meandiff+") return ModelKind::kMeanDiffPlus;
  if (name == "meandiff-") return ModelKind::kMeanDiffMinus;
  throw DataError("unknown model kind: " + name);
}

bool kind_is_trained(ModelKind kind) {
  return kind == ModelKind::kRef || kind == ModelKind::kRefPm ||
         kind == ModelKind::kMlp;
}

bool kind_needs_knowledge(ModelKind kind) {
  return kind == ModelKind::kDiff || kind == ModelKind::kMeanDiff;
}

ParamPack pack(TrainableModel& model) {
  return std::visit([](auto& m) { return pack(m); }, model);
}

Index model_dim(const TrainableModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

Vector transfer(const TrainableModel& model, const Vector& v_x) {
  return std::visit([&](const auto& m) { return transfer(m, v_x); }, model);
}

namespace {

// Loss on one item: w * |v_y - target|^2 with upstream 2w (v_y - target).
// Accumulates into the flat gradient via the model-specific backward.

struct RefGradAccum {
  MlpGrads a, c;
  Vector z;
  bool want = false;

  explicit RefGradAccum(const RefModel& m, bool want_grad) : want(want_grad) {
    if (!want) return;
    a = zero_grads(m.mlp_a);
    c = zero_grads(m.mlp_c);
    z = Vector::Zero(m.dim());
  }
};

Vector flatten_ref(const RefModel& model, const RefGradAccum& acc) {
  const Vector fa = flatten_grads(acc.a);
  const Vector fc = flatten_grads(acc.c);
  const bool with_z = model.attribute.trainable;
  Vector flat(fa.size() + fc.size() + (with_z ? acc.z.size() : 0));
  flat.head(fa.size()) = fa;
  flat.segment(fa.size(), fc.size()) = fc;
  if (with_z) flat.tail(acc.z.size()) = acc.z;
  return flat;
}

double ref_item(const RefModel& model, const Vector& v_x, const Vector& target,
                double weight, double eps, RefGradAccum& acc,
                const ForwardTape* shared_a, const ForwardTape* shared_c,
                Vector* pending_upstream_a, Vector* pending_upstream_c) {
  // Single-mirror models share one forward pass per batch; upstream
  // gradients are summed and pushed through backward once at the end.
  Vector a, c;
  ForwardTape tape_a, tape_c;
  const bool shared = shared_a != nullptr;
  Vector in;
  if (shared) {
    a = shared_a->post.back();
    c = shared_c->post.back();
  } else {
    in = model_input(model, &v_x);
    if (acc.want) {
      a = mlp_forward(model.mlp_a, in, tape_a);
      c = mlp_forward(model.mlp_c, in, tape_c);
    } else {
      a = mlp_forward(model.mlp_a, in);
      c = mlp_forward(model.mlp_c, in);
    }
  }

  const Vector v_y = reflect_regularized(a, c, v_x, eps);
  const Vector r = v_y - target;
  const double value = weight * r.squaredNorm();
  if (!acc.want) return value;

  const Vector upstream = (2.0 * weight) * r;
  const ReflectGrad rg = reflect_backward(a, c, v_x, upstream, eps);
  if (shared) {
    *pending_upstream_a += rg.a;
    *pending_upstream_c += rg.c;
  } else {
    const MlpGrads ga = mlp_backward(model.mlp_a, tape_a, rg.a);
    const MlpGrads gc = mlp_backward(model.mlp_c, tape_c, rg.c);
    accumulate(acc.a, ga);
    accumulate(acc.c, gc);
    // input = [z ; v_x]; only the z half is a parameter
    acc.z += ga.input.head(model.dim()) + gc.input.head(model.dim());
  }
  return value;
}

double ref_loss(const RefModel& model, const VectorBatch& batch,
                const LossOptions& opts, Vector* grad) {
  RefGradAccum acc(model, grad != nullptr);

  ForwardTape tape_a, tape_c;
  Vector up_a, up_c;
  const bool shared = !model.parameterized;
  if (shared) {
    const Vector in = model_input(model, nullptr);
    mlp_forward(model.mlp_a, in, tape_a);
    mlp_forward(model.mlp_c, in, tape_c);
    up_a = Vector::Zero(model.dim());
    up_c = Vector::Zero(model.dim());
  }

  double total = 0.0;
  const double wa = batch.attr.empty()
                        ? 0.0
                        : opts.weight_attr / static_cast<double>(batch.attr.size());
  const double wn = batch.non.empty()
                        ? 0.0
                        : opts.weight_non / static_cast<double>(batch.non.size());
  for (const auto& [v_x, v_t] : batch.attr)
    total += ref_item(model, v_x, v_t, wa, opts.norm_eps, acc,
                      shared ? &tape_a : nullptr, shared ? &tape_c : nullptr,
                      &up_a, &up_c);
  for (const Vector& v_x : batch.non)
    total += ref_item(model, v_x, v_x, wn, opts.norm_eps, acc,
                      shared ? &tape_a : nullptr, shared ? &tape_c : nullptr,
                      &up_a, &up_c);

  if (grad) {
    if (shared) {
      const MlpGrads ga = mlp_backward(model.mlp_a, tape_a, up_a);
      const MlpGrads gc = mlp_backward(model.mlp_c, tape_c, up_c);
      accumulate(acc.a, ga);
      accumulate(acc.c, gc);
      acc.z += ga.input + gc.input;  // input is z itself
    }
    *grad = flatten_ref(model, acc);
  }
  return total;
}

double mlp_loss(const MlpTransferModel& model, const VectorBatch& batch,
                const LossOptions& opts, Vector* grad) {
  const Index d = model.dim();
  MlpGrads acc;
  Vector zgrad;
  if (grad) {
    acc = zero_grads(model.net);
    zgrad = Vector::Zero(d);
  }

  double total = 0.0;
  const double wa = batch.attr.empty()
                        ? 0.0
                        : opts.weight_attr / static_cast<double>(batch.attr.size());
  const double wn = batch.non.empty()
                        ? 0.0
                        : opts.weight_non / static_cast<double>(batch.non.size());

  auto item = [&](const Vector& v_x, const Vector& target, double weight) {
    Vector in(2 * d);
    in << v_x, model.attribute.z;
    ForwardTape tape;
    const Vector v_y = grad ? mlp_forward(model.net, in, tape)
                            : mlp_forward(model.net, in);
    const Vector r = v_y - target;
    total += weight * r.squaredNorm();
    if (grad) {
      const MlpGrads g = mlp_backward(model.net, tape, (2.0 * weight) * r);
      accumulate(acc, g);
      zgrad += g.input.tail(d);  // [v_x ; z]: only the z half is a parameter
    }
  };

  for (const auto& [v_x, v_t] : batch.attr) item(v_x, v_t, wa);
  for (const Vector& v_x : batch.non) item(v_x, v_x, wn);

  if (grad) {
    const Vector fn = flatten_grads(acc);
    const bool with_z = model.attribute.trainable;
    grad->resize(fn.size() + (with_z ? d : 0));
    grad->head(fn.size()) = fn;
    if (with_z) grad->tail(d) = zgrad;
  }
  return total;
}

}  // namespace

double model_loss(const TrainableModel& model, const VectorBatch& batch,
                  const LossOptions& opts, Vector* grad) {
  if (const auto* ref = std::get_if<RefModel>(&model))
    return ref_loss(*ref, batch, opts, grad);
  return mlp_loss(std::get<MlpTransferModel>(model), batch, opts, grad);
}

LossResult loss(const TrainableModel& model,
                const std::vector<Triplet>& attr_batch,
                const std::vector<std::string>& non_batch,
                const EmbeddingTable& table, const LossOptions& opts) {
  VectorBatch batch;
  Index skipped = 0;
  for (const auto& t : attr_batch) {
    const auto xi = table.find(t.source);
    const auto ti = table.find(t.target);
    if (!xi || !ti) {
      if (opts.strict)
        throw UnknownTokenError(!xi ? t.source : t.target);
      ++skipped;
      continue;
    }
    batch.attr.emplace_back(table.vectors().row(*xi).transpose(),
                            table.vectors().row(*ti).transpose());
  }
  for (const auto& w : non_batch) {
    const auto wi = table.find(w);
    if (!wi) {
      if (opts.strict) throw UnknownTokenError(w);
      ++skipped;
      continue;
    }
    batch.non.push_back(table.vectors().row(*wi).transpose());
  }

  LossResult result;
  result.skipped = skipped;
  result.value = model_loss(model, batch, opts, &result.grad);
  return result;
}

namespace {

// Validation accuracy under the exact nearest-token metric. Degenerate
// mirrors and zero-norm outputs count as incorrect.
double validation_accuracy(const TrainableModel& model,
                           const std::vector<std::pair<Vector, Index>>& val,
                           const EmbeddingTable& table) {
  if (val.empty()) return std::numeric_limits<double>::quiet_NaN();
  Index correct = 0;
  for (const auto& [v_x, target_idx] : val) {
    try {
      const Vector v_y = transfer(model, v_x);
      if (v_y.norm() == 0.0) continue;
      if (table.nearest_index(v_y) == target_idx) ++correct;
    } catch (const NumericError&) {
      // counted as incorrect
    }
  }
  return static_cast<double>(correct) / static_cast<double>(val.size());
}

}  // namespace

TrainResult train(TrainableModel model, const AttributeDataset& dataset,
                  const NonAttributeSet& nonattr, const EmbeddingTable& table,
                  const TrainConfig& config) {
  if (config.batch_size < 1) throw DataError("train: batch size must be positive");
  if (config.max_epochs < 0) throw DataError("train: max epochs must be non-negative");

  TrainResult result{std::move(model), {}, false};
  if (config.max_epochs == 0) return result;

  // Resolve everything up front; unresolvable tokens are skipped and counted.
  VectorBatch all;
  Index skipped = 0;
  for (const auto& t : dataset.train) {
    const auto xi = table.find(t.source);
    const auto ti = table.find(t.target);
    if (!xi || !ti) {
      ++skipped;
      continue;
    }
    all.attr.emplace_back(table.vectors().row(*xi).transpose(),
                          table.vectors().row(*ti).transpose());
  }
  std::vector<Vector> non_train;
  for (const auto& w : nonattr.train) {
    const auto wi = table.find(w);
    if (!wi) {
      ++skipped;
      continue;
    }
    non_train.push_back(table.vectors().row(*wi).transpose());
  }
  std::vector<std::pair<Vector, Index>> val;
  for (const auto& t : dataset.val) {
    const auto xi = table.find(t.source);
    const auto ti = table.find(t.target);
    if (!xi || !ti) {
      ++skipped;
      continue;
    }
    val.emplace_back(table.vectors().row(*xi).transpose(), *ti);
  }
  result.history.skipped_train = skipped;
  if (skipped > 0)
    std::cerr << "train: skipped " << skipped << " unresolvable tokens\n";
  if (all.attr.empty()) throw DataError("train: no resolvable training triplets");

  LossOptions opts;
  opts.weight_attr = config.loss_weight_attr;
  opts.weight_non = config.loss_weight_non;
  opts.norm_eps = config.norm_eps;

  ParamPack params = pack(result.model);
  AdamState adam = make_adam_state(params.size(), config.alpha);
  Rng rng(config.seed);

  const bool has_val = !val.empty();
  TrainableModel best = result.model;
  double best_val = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  Index best_epoch = 0;

  std::vector<std::size_t> order(all.attr.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Vector grad;
  for (Index epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);

    double epoch_loss = 0.0;
    Index steps_this_epoch = 0;
    bool bad = false;
    for (std::size_t at = 0; at < order.size();
         at += static_cast<std::size_t>(config.batch_size)) {
      VectorBatch batch;
      const std::size_t end = std::min(
          order.size(), at + static_cast<std::size_t>(config.batch_size));
      for (std::size_t k = at; k < end; ++k)
        batch.attr.push_back(all.attr[order[k]]);
      batch.non = non_train;  // the whole N train set rides along every step

      const double value = model_loss(result.model, batch, opts, &grad);
      if (!std::isfinite(value) || !grad.allFinite()) {
        bad = true;
        break;
      }
      adam_step(adam, params, grad);
      epoch_loss += value;
      ++steps_this_epoch;
      ++result.history.steps;
    }
    if (bad) {
      result.diverged = true;
      break;
    }
    epoch_loss /= static_cast<double>(std::max<Index>(steps_this_epoch, 1));

    const double val_acc = validation_accuracy(result.model, val, table);
    result.history.epochs.push_back({epoch_loss, val_acc});

    bool improved = false;
    if (has_val) {
      if (val_acc > best_val) {
        best_val = val_acc;
        improved = true;
      }
    } else if (epoch_loss < best_loss) {
      improved = true;
    }
    if (epoch_loss < best_loss) best_loss = epoch_loss;
    if (improved) {
      best = result.model;
      best_epoch = epoch;
    }
    if (config.patience > 0 && epoch - best_epoch >= config.patience) break;
  }

  result.model = std::move(best);
  result.history.best_epoch = best_epoch;
  result.history.best_val_accuracy = has_val ? best_val : 0.0;
  return result;
}

}  // namespace reflect
