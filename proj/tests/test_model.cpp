#include <doctest.h>

#include "reflect/model.hpp"
#include "reflect/rng.hpp"

using namespace reflect;

namespace {

// MLPs with zero weights emit their output bias for every input.
MlpParams constant_mlp(Index in, const Vector& out_bias) {
  MlpParams p = init_params(1, {in, out_bias.size()});
  p.layers[0].weights.setZero();
  p.layers[0].bias = out_bias;
  return p;
}

}  // namespace

TEST_CASE("attribute vectors are seeded and scaled") {
  const AttributeVector a1 = make_attribute_vector("gender", 300, 5);
  const AttributeVector a2 = make_attribute_vector("gender", 300, 5);
  const AttributeVector b = make_attribute_vector("antonym", 300, 5);
  CHECK(a1.z == a2.z);
  CHECK(a1.z != b.z);
  // N(0, 1/D) coordinates keep |z| near 1
  CHECK(a1.z.norm() > 0.5);
  CHECK(a1.z.norm() < 2.0);
}

TEST_CASE("single-mirror models ignore the input word") {
  const RefModel model = make_ref_model("attr", 8, false, 16, 2, 3);
  Rng rng(9);
  const Vector v1 = rng.normal_vector(8);
  const Vector v2 = rng.normal_vector(8);
  const Mirror m1 = mirror_for(model, v1);
  const Mirror m2 = mirror_for(model, v2);
  const Mirror m3 = mirror_for(model);
  CHECK(m1.normal == m2.normal);
  CHECK(m1.point == m2.point);
  CHECK(m1.normal == m3.normal);
}

TEST_CASE("parameterized mirrors are deterministic per word") {
  const RefModel model = make_ref_model("attr", 8, true, 16, 2, 3);
  Rng rng(10);
  const Vector v = rng.normal_vector(8);
  const Mirror m1 = mirror_for(model, v);
  const Mirror m2 = mirror_for(model, v);
  CHECK(m1.normal == m2.normal);
  CHECK(m1.point == m2.point);
  CHECK_THROWS_AS(mirror_for(model), DataError);
}

TEST_CASE("zero-weight parameterized mirrors collapse to the output bias") {
  Rng rng(11);
  const Index d = 6;
  RefModel model;
  model.attribute = make_attribute_vector("attr", d, 1);
  model.parameterized = true;
  const Vector bias_a = rng.normal_vector(d);
  const Vector bias_c = rng.normal_vector(d);
  model.mlp_a = constant_mlp(2 * d, bias_a);
  model.mlp_c = constant_mlp(2 * d, bias_c);
  validate(model);

  const Mirror m1 = mirror_for(model, rng.normal_vector(d));
  const Mirror m2 = mirror_for(model, rng.normal_vector(d));
  CHECK(m1.normal == bias_a);
  CHECK(m2.normal == bias_a);
  CHECK(m1.point == bias_c);
}

TEST_CASE("single-mirror transfer is an involution") {
  const RefModel model = make_ref_model("attr", 10, false, 32, 2, 7);
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = rng.normal_vector(10);
    const Vector back = transfer(model, transfer(model, v));
    CHECK((back - v).norm() <= 1e-8 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("a planted parameterized model reproduces the plain reflection") {
  Rng rng(13);
  const Index d = 7;
  const Vector a = rng.normal_vector(d);
  const Vector c = rng.normal_vector(d);

  RefModel model;
  model.attribute = make_attribute_vector("attr", d, 2);
  model.parameterized = true;
  model.mlp_a = constant_mlp(2 * d, a);
  model.mlp_c = constant_mlp(2 * d, c);

  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = rng.normal_vector(d);
    const Vector via_model = transfer(model, v);
    const Vector direct = reflect(a, c, v);
    CHECK((via_model - direct).norm() <= 1e-12 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("on-mirror words do not move") {
  const RefModel model = make_ref_model("attr", 9, false, 16, 2, 21);
  const Mirror m = mirror_for(model);
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = project_onto_mirror(m, rng.normal_vector(9));
    const Vector out = transfer(model, v);
    CHECK((out - v).norm() <= 1e-10 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("degenerate mirrors surface as errors") {
  const Index d = 5;
  RefModel model;
  model.attribute = make_attribute_vector("attr", d, 3);
  model.mlp_a = constant_mlp(d, Vector::Zero(d));
  model.mlp_c = constant_mlp(d, Vector::Ones(d));
  CHECK_THROWS_AS(mirror_for(model), DegenerateMirrorError);
  CHECK_THROWS_AS(transfer(model, Vector::Ones(d)), DegenerateMirrorError);
}

TEST_CASE("model validation catches bad shapes") {
  RefModel model = make_ref_model("attr", 6, false, 8, 2, 4);
  model.mlp_a = init_params(1, {5, 6});  // wrong input dim
  CHECK_THROWS_AS(validate(model), DimensionError);

  RefModel pm = make_ref_model("attr", 6, true, 8, 2, 4);
  CHECK(pm.mlp_a.in_dim() == 12);
  pm.parameterized = false;
  CHECK_THROWS_AS(validate(pm), DimensionError);
}

TEST_CASE("pack covers both nets and the attribute vector") {
  RefModel model = make_ref_model("attr", 4, false, 8, 2, 5, true);
  CHECK(pack(model).size() ==
        model.mlp_a.param_count() + model.mlp_c.param_count() + 4);
  RefModel frozen = make_ref_model("attr", 4, false, 8, 2, 5, false);
  CHECK(pack(frozen).size() ==
        frozen.mlp_a.param_count() + frozen.mlp_c.param_count());
}
