#pragma once

#include <cmath>

#include "reflect/types.hpp"

namespace reflect {

// Below this normal length a mirror is considered degenerate.
inline constexpr double kMirrorNormMin = 1e-8;
// Added to a.a inside the training loss so early random nets cannot blow up.
inline constexpr double kTrainNormEps = 1e-12;

// A reflection hyperplane: `normal` is orthogonal to it, `point` lies on it.
struct Mirror {
  Vector normal;
  Vector point;
};

// v - 2 ((v - c).a / (a.a + eps)) a, no degeneracy check.
template <typename DA, typename DC, typename DV>
Vector reflect_regularized(const Eigen::MatrixBase<DA>& a,
                           const Eigen::MatrixBase<DC>& c,
                           const Eigen::MatrixBase<DV>& v, double eps) {
  const double q = a.squaredNorm() + eps;
  const double s = (v - c).dot(a);
  return v - (2.0 * s / q) * a;
}

template <typename DA, typename DC, typename DV>
Vector reflect(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DC>& c,
               const Eigen::MatrixBase<DV>& v) {
  if (a.size() != c.size() || a.size() != v.size())
    throw DimensionError("reflect: mismatched dimensions");
  if (a.norm() < kMirrorNormMin)
    throw DegenerateMirrorError("reflect: mirror normal below 1e-8");
  return reflect_regularized(a, c, v, 0.0);
}

inline Vector reflect(const Mirror& m, const Vector& v) {
  return reflect(m.normal, m.point, v);
}

// Point-to-hyperplane distance |(v - c).a| / |a|.
template <typename DA, typename DC, typename DV>
double distance_to_mirror(const Eigen::MatrixBase<DA>& a,
                          const Eigen::MatrixBase<DC>& c,
                          const Eigen::MatrixBase<DV>& v) {
  if (a.size() != c.size() || a.size() != v.size())
    throw DimensionError("distance_to_mirror: mismatched dimensions");
  const double norm = a.norm();
  if (norm < kMirrorNormMin)
    throw DegenerateMirrorError("distance_to_mirror: mirror normal below 1e-8");
  return std::abs((v - c).dot(a)) / norm;
}

inline double distance_to_mirror(const Mirror& m, const Vector& v) {
  return distance_to_mirror(m.normal, m.point, v);
}

// Projection of v onto the hyperplane (the midpoint of v and its image).
template <typename DA, typename DC, typename DV>
Vector project_onto_mirror(const Eigen::MatrixBase<DA>& a,
                           const Eigen::MatrixBase<DC>& c,
                           const Eigen::MatrixBase<DV>& v) {
  const double q = a.squaredNorm();
  const double s = (v - c).dot(a);
  return v - (s / q) * a;
}

inline Vector project_onto_mirror(const Mirror& m, const Vector& v) {
  return project_onto_mirror(m.normal, m.point, v);
}

// Gradients of g . reflect_regularized(a, c, v, eps) with respect to a, c, v.
// With q = a.a + eps and s = (v - c).a:
//   d/da = -2 (s/q) g - 2 (g.a/q) (v - c) + 4 (s g.a / q^2) a
//   d/dc =  2 (g.a / q) a
//   d/dv =  g - 2 (g.a / q) a
struct ReflectGrad {
  Vector a;
  Vector c;
  Vector v;
};

inline ReflectGrad reflect_backward(const Vector& a, const Vector& c,
                                    const Vector& v, const Vector& g,
                                    double eps) {
  const double q = a.squaredNorm() + eps;
  const double s = (v - c).dot(a);
  const double ga = g.dot(a);
  ReflectGrad out;
  out.a = (-2.0 * s / q) * g - (2.0 * ga / q) * (v - c) +
          (4.0 * s * ga / (q * q)) * a;
  out.c = (2.0 * ga / q) * a;
  out.v = g - (2.0 * ga / q) * a;
  return out;
}

}  // namespace reflect
