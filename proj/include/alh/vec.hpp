#pragma once
// Unit-sphere geometry shared by every other module. Vectors are plain
// std::vector<double>; UnitVector wraps one and keeps it normalized.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace alh {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

struct UnitVector {
  Vec coords;

  // Normalizes the input; idempotent on unit vectors.
  explicit UnitVector(Vec v) : coords(std::move(v)) {
    if (coords.size() < 2) throw std::invalid_argument("UnitVector: dimension must be >= 2");
    double n = norm(coords);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("UnitVector: zero or non-finite vector");
    }
    for (double& c : coords) c /= n;
  }

  int dim() const { return int(coords.size()); }
  double operator[](int i) const { return coords[i]; }

  UnitVector operator-() const {
    Vec v = coords;
    for (double& c : v) c = -c;
    return UnitVector(std::move(v));
  }
};

// Standard basis vector e_k.
inline UnitVector basis_vector(int d, int k = 0) {
  Vec v(d, 0.0);
  v[k] = 1.0;
  return UnitVector(std::move(v));
}

// Angle in [0, pi]; the inner product is clamped into [-1, 1] before arccos
// to absorb floating-point drift.
inline double angle(const UnitVector& u, const UnitVector& v) {
  double c = dot(u.coords, v.coords);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline double min_angle_to(const UnitVector& w, const UnitVector& target) {
  double a = angle(w, target);
  return std::min(a, std::numbers::pi - a);
}

inline UnitVector project_to_sphere(Vec v) { return UnitVector(std::move(v)); }

// sign(0) := +1 so the label is total; the tie has measure zero under every
// supported marginal.
inline int sign_pm(double t) { return t >= 0.0 ? +1 : -1; }

inline int halfspace_label(const UnitVector& w, const Vec& x) {
  return sign_pm(dot(w.coords, x));
}

}  // namespace alh
