#include "alh/loss.hpp"

#include <cmath>

namespace alh {

namespace {

// s(1-s) for s = 1/(1+e^u), computed via e^{-|u|} so large |u| underflows
// gracefully instead of overflowing.
double sigmoid_product(double u) {
  double e = std::exp(-std::abs(u));
  double d = 1.0 + e;
  return e / (d * d);
}

// Per-sample population-loss contribution with the label integrated out.
inline double loss_contribution(double sigma, double m, int s_star, double eta) {
  return (1.0 - eta) * phi(sigma, s_star * m) + eta * phi(sigma, -s_star * m);
}

// Orthonormal basis of the tangent space at w (d-1 columns), built from a
// Householder reflection that maps e_d to w.
std::vector<Vec> tangent_basis(const UnitVector& w) {
  const int d = w.dim();
  Vec v = w.coords;
  v[d - 1] -= 1.0;
  double vn = norm(v);
  std::vector<Vec> basis;
  for (int k = 0; k < d - 1; ++k) {
    Vec u(d, 0.0);
    u[k] = 1.0;
    if (vn > 1e-12) {
      double c = 2.0 * v[k] / (vn * vn);
      for (int i = 0; i < d; ++i) u[i] -= c * v[i];
    }
    basis.push_back(std::move(u));
  }
  return basis;
}

}  // namespace

double phi(double sigma, double t) {
  double u = t / sigma;
  if (u >= 0.0) {
    double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

double phi_prime(double sigma, double t) {
  return -sigmoid_product(t / sigma) / sigma;
}

double phi_second(double sigma, double t) {
  double u = t / sigma;
  double e = std::exp(-std::abs(u));
  double ratio = (1.0 - e) / (1.0 + e);  // |1 - 2s|
  double sgn = (u >= 0.0) ? 1.0 : -1.0;
  return sigmoid_product(u) * ratio * sgn / (sigma * sigma);
}

double surrogate_loss_raw(double sigma, const Vec& w_raw, const Vec& x, int y) {
  double n = norm(w_raw);
  if (!(n > 0.0)) throw std::invalid_argument("surrogate_loss_raw: zero w");
  return phi(sigma, y * dot(w_raw, x) / n);
}

Vec per_sample_gradient(const UnitVector& w, const Vec& x, int y, double sigma) {
  const int d = w.dim();
  if (int(x.size()) != d) throw std::invalid_argument("per_sample_gradient: dimension mismatch");
  double m = dot(w.coords, x);
  Vec g(d);
  for (int i = 0; i < d; ++i) g[i] = x[i] - m * w.coords[i];
  double r = dot(g, w.coords);  // one re-orthogonalization pass
  for (int i = 0; i < d; ++i) g[i] = -(double(y) / sigma) * (g[i] - r * w.coords[i]);
  return g;
}

double query_probability_from_margin(double sigma, double margin) {
  return sigmoid_product(margin / sigma);
}

double query_probability(const UnitVector& w, const Vec& x, double sigma) {
  return query_probability_from_margin(sigma, dot(w.coords, x));
}

McScalar population_loss_mc(const UnitVector& w, double sigma,
                            const MarginalDistribution& dist, const NoiseModel& noise,
                            std::int64_t n, RandomStream rng) {
  if (n < 1) throw std::invalid_argument("population_loss_mc: n must be >= 1");
  const int d = dist.dim;
  Vec x(d);
  double s = 0.0, s2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double m = dot(w.coords.data(), x.data(), d);
    double ms = dot(noise.target.coords.data(), x.data(), d);
    double eta = flip_probability_from_margin(noise, ms);
    double c = loss_contribution(sigma, m, sign_pm(ms), eta);
    s += c;
    s2 += c * c;
  }
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

GradEstimate population_gradient_oracle(const UnitVector& w, double sigma,
                                        const MarginalDistribution& dist,
                                        const NoiseModel& noise, std::int64_t n,
                                        RandomStream rng) {
  if (n < 1) throw std::invalid_argument("population_gradient_oracle: n must be >= 1");
  const int d = dist.dim;
  Vec x(d);
  Vec sum(d, 0.0), sumsq(d, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double m = dot(w.coords.data(), x.data(), d);
    double ms = dot(noise.target.coords.data(), x.data(), d);
    double eta = flip_probability_from_margin(noise, ms);
    double c = phi_prime(sigma, m) * (1.0 - 2.0 * eta) * sign_pm(ms);
    for (int j = 0; j < d; ++j) {
      double g = c * (x[j] - m * w.coords[j]);
      sum[j] += g;
      sumsq[j] += g * g;
    }
  }
  GradEstimate out;
  out.grad.resize(d);
  out.comp_stderr.resize(d);
  double nv = 0.0;
  for (int j = 0; j < d; ++j) {
    out.grad[j] = sum[j] / n;
    double var = std::max(0.0, sumsq[j] / n - out.grad[j] * out.grad[j]);
    out.comp_stderr[j] = std::sqrt(var / n);
    nv += var / n;
  }
  // Remove the tiny numerical component along w so the estimate is tangent.
  double r = dot(out.grad, w.coords);
  for (int j = 0; j < d; ++j) out.grad[j] -= r * w.coords[j];
  out.norm_stderr = std::sqrt(nv);
  return out;
}

GradEstimate fd_population_gradient(const UnitVector& w, double sigma,
                                    const MarginalDistribution& dist,
                                    const NoiseModel& noise, std::int64_t n,
                                    RandomStream rng, double step) {
  if (n < 1) throw std::invalid_argument("fd_population_gradient: n must be >= 1");
  const int d = dist.dim;
  const auto basis = tangent_basis(w);
  const int nb = int(basis.size());

  // Probe points normalize(w +/- step * u_k); all evaluated on the same
  // sample sequence (common random numbers).
  std::vector<Vec> plus(nb), minus(nb);
  for (int k = 0; k < nb; ++k) {
    Vec p(d), q(d);
    for (int i = 0; i < d; ++i) {
      p[i] = w.coords[i] + step * basis[k][i];
      q[i] = w.coords[i] - step * basis[k][i];
    }
    plus[k] = UnitVector(std::move(p)).coords;
    minus[k] = UnitVector(std::move(q)).coords;
  }

  Vec x(d);
  Vec dsum(nb, 0.0), dsumsq(nb, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double ms = dot(noise.target.coords.data(), x.data(), d);
    double eta = flip_probability_from_margin(noise, ms);
    int s_star = sign_pm(ms);
    for (int k = 0; k < nb; ++k) {
      double lp = loss_contribution(sigma, dot(plus[k].data(), x.data(), d), s_star, eta);
      double lm = loss_contribution(sigma, dot(minus[k].data(), x.data(), d), s_star, eta);
      double dd = (lp - lm) / (2.0 * step);
      dsum[k] += dd;
      dsumsq[k] += dd * dd;
    }
  }

  GradEstimate out;
  out.grad.assign(d, 0.0);
  out.comp_stderr.assign(d, 0.0);
  double nv = 0.0;
  for (int k = 0; k < nb; ++k) {
    double mean = dsum[k] / n;
    double var = std::max(0.0, dsumsq[k] / n - mean * mean);
    double se = std::sqrt(var / n);
    nv += se * se;
    for (int j = 0; j < d; ++j) {
      out.grad[j] += mean * basis[k][j];
      out.comp_stderr[j] += (se * basis[k][j]) * (se * basis[k][j]);
    }
  }
  for (int j = 0; j < d; ++j) out.comp_stderr[j] = std::sqrt(out.comp_stderr[j]);
  out.norm_stderr = std::sqrt(nv);
  return out;
}

}  // namespace alh
