#include <doctest.h>

#include <cmath>

#include "reflect/rng.hpp"
#include "reflect/synthetic.hpp"
#include "reflect/training.hpp"

using namespace reflect;

namespace {

// Full-loss gradient check for one model kind on a seeded random batch.
double check_model_gradients(TrainableModel model, Index dim,
                             std::uint64_t seed) {
  Rng rng(seed);
  VectorBatch batch;
  for (int i = 0; i < 3; ++i)
    batch.attr.emplace_back(rng.normal_vector(dim), rng.normal_vector(dim));
  for (int i = 0; i < 2; ++i) batch.non.push_back(rng.normal_vector(dim));

  const LossOptions opts;
  Vector analytic;
  model_loss(model, batch, opts, &analytic);

  ParamPack pk = pack(model);
  const Vector theta0 = pk.to_flat();
  const auto loss_at = [&](const Vector& theta) {
    pk.from_flat(theta);
    return model_loss(model, batch, opts, nullptr);
  };
  const double err = grad_check(loss_at, theta0, analytic, {});
  pk.from_flat(theta0);
  return err;
}

MlpParams constant_net(Index in, const Vector& out_bias) {
  MlpParams p = init_params(1, {in, out_bias.size()});
  p.layers[0].weights.setZero();
  p.layers[0].bias = out_bias;
  return p;
}

}  // namespace

TEST_CASE("constant-output model gives the hand-computed loss") {
  // v_y = (1, 0) for every input; target (0, 1): |(1,-1)|^2 = 2
  const Index d = 2;
  MlpTransferModel model;
  model.attribute = make_attribute_vector("toy", d, 1);
  Vector bias(d);
  bias << 1, 0;
  model.net = constant_net(2 * d, bias);

  VectorBatch batch;
  Vector v_x(d), v_t(d);
  v_x << 3, 4;
  v_t << 0, 1;
  batch.attr.emplace_back(v_x, v_t);
  CHECK(model_loss(TrainableModel(model), batch, {}, nullptr) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("perfect planted model has zero loss") {
  SyntheticSpec spec;
  spec.dim = 6;
  spec.n_pairs = 10;
  spec.n_nonattr_train = 5;
  spec.n_nonattr_test = 5;
  spec.n_distractors = 10;
  spec.split = {10, 0, 0, 3};
  spec.seed = 8;
  const SyntheticData data = synth_generate(spec);
  const Mirror& planted = data.mirrors[0];

  RefModel model;
  model.attribute = make_attribute_vector(spec.attribute, spec.dim, 4);
  model.mlp_a = constant_net(spec.dim, planted.normal);
  model.mlp_c = constant_net(spec.dim, planted.point);

  const LossResult r =
      loss(TrainableModel(model), data.dataset.train, data.nonattr.train,
           data.table);
  CHECK(r.value < 1e-20);
  CHECK(r.skipped == 0);

  // non-attribute-only batch: the loss is exactly the displacement term
  const LossResult n_only = loss(TrainableModel(model), {}, data.nonattr.train,
                                 data.table);
  CHECK(n_only.value < 1e-20);
}

TEST_CASE("loss skips or rejects unresolvable tokens") {
  SyntheticSpec spec;
  spec.dim = 4;
  spec.n_pairs = 3;
  spec.n_nonattr_test = 2;
  spec.n_distractors = 5;
  spec.split = {3, 0, 0, 1};
  const SyntheticData data = synth_generate(spec);
  RefModel model = make_ref_model(spec.attribute, spec.dim, false, 8, 2, 1);

  std::vector<Triplet> with_bad = data.dataset.train;
  with_bad.push_back({"missing", "also_missing"});
  const LossResult r =
      loss(TrainableModel(model), with_bad, {}, data.table);
  CHECK(r.skipped == 1);

  LossOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(
      loss(TrainableModel(model), with_bad, {}, data.table, strict),
      UnknownTokenError);
}

TEST_CASE("loss is non-negative and gradients are shaped by the pack") {
  Rng rng(21);
  const Index d = 5;
  TrainableModel model = make_ref_model("attr", d, true, 8, 2, 2);
  VectorBatch batch;
  batch.attr.emplace_back(rng.normal_vector(d), rng.normal_vector(d));
  batch.non.push_back(rng.normal_vector(d));
  Vector grad;
  const double value = model_loss(model, batch, {}, &grad);
  CHECK(value >= 0.0);
  CHECK(grad.size() == pack(model).size());
  CHECK(grad.allFinite());
}

// The central oracle for the whole training path: analytic gradients of the
// full loss through each model against finite differences.
TEST_CASE("full-loss gradients pass the finite-difference check") {
  const Index d = 6;
  SUBCASE("single mirror") {
    const double err = check_model_gradients(
        make_ref_model("attr", d, false, 10, 2, 31), d, 101);
    CHECK(err < 1e-4);
  }
  SUBCASE("parameterized mirrors") {
    const double err = check_model_gradients(
        make_ref_model("attr", d, true, 10, 2, 32), d, 102);
    CHECK(err < 1e-4);
  }
  SUBCASE("mlp baseline") {
    const double err = check_model_gradients(
        make_mlp_model("attr", d, 10, 3, 33), d, 103);
    CHECK(err < 1e-4);
  }
  SUBCASE("frozen attribute vector") {
    const double err = check_model_gradients(
        make_ref_model("attr", d, true, 10, 2, 34, false), d, 104);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("repo-sized architectures pass a subsampled gradient check") {
  const Index d = 40;
  TrainableModel model = make_ref_model("attr", d, true, 300, 2, 35);
  Rng rng(105);
  VectorBatch batch;
  batch.attr.emplace_back(rng.normal_vector(d), rng.normal_vector(d));
  batch.non.push_back(rng.normal_vector(d));

  const LossOptions opts;
  Vector analytic;
  model_loss(model, batch, opts, &analytic);
  ParamPack pk = pack(model);
  const Vector theta0 = pk.to_flat();
  const auto loss_at = [&](const Vector& theta) {
    pk.from_flat(theta);
    return model_loss(model, batch, opts, nullptr);
  };
  GradCheckOptions gopts;
  gopts.max_coords = 800;
  gopts.subsample_seed = 3;
  CHECK(grad_check(loss_at, theta0, analytic, gopts) < 1e-4);
}

TEST_CASE("max_epochs zero returns the initialized model untouched") {
  SyntheticSpec spec;
  spec.dim = 4;
  spec.n_pairs = 4;
  spec.n_nonattr_test = 2;
  spec.n_distractors = 5;
  spec.split = {4, 0, 0, 1};
  const SyntheticData data = synth_generate(spec);

  RefModel model = make_ref_model(spec.attribute, spec.dim, false, 8, 2, 9);
  const Vector before = pack(model).to_flat();
  TrainConfig cfg;
  cfg.max_epochs = 0;
  TrainResult result =
      train(TrainableModel(model), data.dataset, data.nonattr, data.table, cfg);
  CHECK(result.history.epochs.empty());
  CHECK(pack(result.model).to_flat() == before);
}

TEST_CASE("training is bit-deterministic per seed") {
  SyntheticSpec spec;
  spec.dim = 5;
  spec.n_pairs = 8;
  spec.n_nonattr_train = 3;
  spec.n_nonattr_test = 3;
  spec.n_distractors = 10;
  spec.split = {6, 1, 1, 2};
  const SyntheticData data = synth_generate(spec);

  const auto run = [&] {
    TrainConfig cfg;
    cfg.kind = ModelKind::kRef;
    cfg.alpha = 1e-3;
    cfg.max_epochs = 12;
    cfg.batch_size = 4;
    cfg.seed = 3;
    cfg.patience = 0;
    cfg.hidden = 8;
    TrainableModel model =
        make_ref_model(spec.attribute, spec.dim, false, 8, 2, 11);
    return train(std::move(model), data.dataset, data.nonattr, data.table, cfg);
  };

  const TrainResult r1 = run();
  const TrainResult r2 = run();
  REQUIRE(r1.history.epochs.size() == r2.history.epochs.size());
  for (std::size_t e = 0; e < r1.history.epochs.size(); ++e) {
    CHECK(r1.history.epochs[e].loss == r2.history.epochs[e].loss);
    CHECK(r1.history.epochs[e].val_accuracy ==
          r2.history.epochs[e].val_accuracy);
  }
  TrainResult m1 = r1, m2 = r2;
  CHECK(pack(m1.model).to_flat() == pack(m2.model).to_flat());
}

TEST_CASE("training fits a planted single mirror") {
  SyntheticSpec spec;
  spec.dim = 10;
  spec.n_pairs = 30;
  spec.n_nonattr_train = 0;
  spec.n_nonattr_test = 20;
  spec.n_distractors = 60;
  spec.split = {20, 5, 5, 4};
  spec.seed = 12;
  const SyntheticData data = synth_generate(spec);

  TrainConfig cfg;
  cfg.kind = ModelKind::kRef;
  cfg.alpha = 3e-3;
  cfg.max_epochs = 400;
  cfg.batch_size = 32;
  cfg.seed = 2;
  cfg.patience = 400;
  cfg.hidden = 32;
  TrainableModel model =
      make_ref_model(spec.attribute, spec.dim, false, 32, 2, 13);
  const TrainResult result =
      train(std::move(model), data.dataset, data.nonattr, data.table, cfg);

  CHECK_FALSE(result.diverged);
  CHECK(result.history.best_val_accuracy == 1.0);
  CHECK(result.history.epochs.back().loss < 1e-2);
}

TEST_CASE("the mlp baseline can overfit a single pair") {
  // one pair, no stability term: the net should memorize the mapping
  std::vector<std::string> tokens{"src", "dst"};
  Matrix m(2, 4);
  m.row(0) << 1, 0, 0.5, -0.5;
  m.row(1) << 0, 1, -0.5, 0.5;
  const EmbeddingTable table(tokens, m);

  AttributeDataset ds;
  ds.attribute = "toy";
  ds.train_pairs = {{"src", "dst"}};
  ds.train = expand_directed(ds.train_pairs);
  NonAttributeSet non;
  non.attribute = "toy";

  TrainConfig cfg;
  cfg.kind = ModelKind::kMlp;
  cfg.alpha = 3e-3;
  cfg.max_epochs = 600;
  cfg.patience = 0;
  cfg.hidden = 16;
  TrainableModel model = make_mlp_model("toy", 4, 16, 2, 21);
  const TrainResult result = train(std::move(model), ds, non, table, cfg);
  CHECK(result.history.epochs.back().loss < 1e-6);
}

TEST_CASE("kind names round-trip") {
  for (const auto kind :
       {ModelKind::kRef, ModelKind::kRefPm, ModelKind::kMlp, ModelKind::kDiff,
        ModelKind::kDiffPlus, ModelKind::kDiffMinus, ModelKind::kMeanDiff,
        ModelKind::kMeanDiffPlus, ModelKind::kMeanDiffMinus}) {
    CHECK(parse_kind(kind_name(kind)) == kind);
  }
  CHECK(kind_is_trained(ModelKind::kRef));
  CHECK_FALSE(kind_is_trained(ModelKind::kDiff));
  CHECK(kind_needs_knowledge(ModelKind::kMeanDiff));
  CHECK_FALSE(kind_needs_knowledge(ModelKind::kDiffPlus));
  CHECK_THROWS_AS(parse_kind("nope"), DataError);
}
