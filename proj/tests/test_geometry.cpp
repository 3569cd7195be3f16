#include <doctest.h>

#include "reflect/geometry.hpp"
#include "reflect/rng.hpp"

using namespace reflect;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("reflection across the x=0 axis") {
  const Mirror m{vec2(1, 0), vec2(0, 0)};
  const Vector out = reflect(m, vec2(3, 2));
  CHECK(out[0] == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("on-mirror vectors are fixed points") {
  const Mirror m{vec2(1, 0), vec2(0, 0)};
  const Vector v = vec2(0, 5);
  const Vector out = reflect(m, v);
  CHECK((out - v).norm() <= 1e-12 * v.norm());
}

TEST_CASE("involution over random mirrors in D=7") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vector a = rng.normal_vector(7);
    const Vector c = rng.normal_vector(7);
    const Vector v = rng.normal_vector(7);
    const Vector twice = reflect(a, c, reflect(a, c, v));
    CHECK((twice - v).norm() / std::max(1.0, v.norm()) < 1e-10);
  }
}

TEST_CASE("reflection is an isometry per mirror") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector a = rng.normal_vector(9);
    const Vector c = rng.normal_vector(9);
    const Vector u = rng.normal_vector(9);
    const Vector v = rng.normal_vector(9);
    const double before = (u - v).norm();
    const double after = (reflect(a, c, u) - reflect(a, c, v)).norm();
    CHECK(std::abs(after - before) <= 1e-10 * std::max(1.0, before));
  }
}

TEST_CASE("midpoint of v and its image lies on the mirror") {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector a = rng.normal_vector(6);
    const Vector c = rng.normal_vector(6);
    const Vector v = rng.normal_vector(6);
    const Vector mid = 0.5 * (v + reflect(a, c, v));
    const double off = std::abs((mid - c).dot(a));
    CHECK(off <= 1e-10 * a.norm() * std::max(1.0, (mid - c).norm()));
  }
}

TEST_CASE("reflection is homogeneous in the normal") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector a = rng.normal_vector(5);
    const Vector c = rng.normal_vector(5);
    const Vector v = rng.normal_vector(5);
    const Vector r1 = reflect(a, c, v);
    const Vector r2 = reflect(Vector(2.0 * a), c, v);
    CHECK((r1 - r2).norm() <= 1e-12 * std::max(1.0, r1.norm()));
  }
}

TEST_CASE("distance to an axis mirror") {
  const Mirror m{vec2(1, 0), vec2(0, 0)};
  CHECK(distance_to_mirror(m, vec2(3, 2)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(distance_to_mirror(m, vec2(0, 7)) == 0.0);
}

TEST_CASE("distance is symmetric under reflection") {
  Rng rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector a = rng.normal_vector(8);
    const Vector c = rng.normal_vector(8);
    const Vector v = rng.normal_vector(8);
    const double d1 = distance_to_mirror(a, c, v);
    const double d2 = distance_to_mirror(a, c, reflect(a, c, v));
    CHECK(std::abs(d1 - d2) <= 1e-10 * std::max(1.0, d1));
  }
}

TEST_CASE("projection lands on the mirror") {
  Rng rng(16);
  const Vector a = rng.normal_vector(10);
  const Vector c = rng.normal_vector(10);
  const Vector v = rng.normal_vector(10);
  const Vector p = project_onto_mirror(a, c, v);
  CHECK(distance_to_mirror(a, c, p) < 1e-12);
}

TEST_CASE("degenerate mirrors are rejected") {
  const Vector tiny = Vector::Constant(3, 1e-10);
  const Vector c = Vector::Zero(3);
  const Vector v = Vector::Ones(3);
  CHECK_THROWS_AS(reflect(tiny, c, v), DegenerateMirrorError);
  CHECK_THROWS_AS(distance_to_mirror(tiny, c, v), DegenerateMirrorError);
  // the regularized form stays finite for the training path
  const Vector out = reflect_regularized(Vector::Zero(3), c, v, kTrainNormEps);
  CHECK(out.allFinite());
}

TEST_CASE("mismatched dimensions are rejected") {
  CHECK_THROWS_AS(reflect(vec2(1, 0), vec2(0, 0), Vector::Ones(3)),
                  DimensionError);
}

// Finite-difference oracle for the hand-derived reflect gradients.
TEST_CASE("reflect_backward matches central differences") {
  Rng rng(17);
  const double h = 1e-6;
  const double eps = kTrainNormEps;
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 5;
    Vector a = rng.normal_vector(d);
    Vector c = rng.normal_vector(d);
    Vector v = rng.normal_vector(d);
    const Vector g = rng.normal_vector(d);

    const ReflectGrad grads = reflect_backward(a, c, v, g, eps);
    const auto scalar = [&](const Vector& aa, const Vector& cc,
                            const Vector& vv) {
      return g.dot(reflect_regularized(aa, cc, vv, eps));
    };

    for (Index i = 0; i < d; ++i) {
      Vector ap = a, am = a;
      ap[i] += h;
      am[i] -= h;
      const double num_a = (scalar(ap, c, v) - scalar(am, c, v)) / (2 * h);
      CHECK(std::abs(num_a - grads.a[i]) <=
            1e-5 * std::max(1.0, std::abs(num_a)));

      Vector cp = c, cm = c;
      cp[i] += h;
      cm[i] -= h;
      const double num_c = (scalar(a, cp, v) - scalar(a, cm, v)) / (2 * h);
      CHECK(std::abs(num_c - grads.c[i]) <=
            1e-5 * std::max(1.0, std::abs(num_c)));

      Vector vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      const double num_v = (scalar(a, c, vp) - scalar(a, c, vm)) / (2 * h);
      CHECK(std::abs(num_v - grads.v[i]) <=
            1e-5 * std::max(1.0, std::abs(num_v)));
    }
  }
}
