#include "alh/noise.hpp"

#include <cmath>

namespace alh {

NoiseModel::NoiseModel(double alpha_, double A_, double B_, UnitVector target_)
    : alpha(alpha_), A(A_), B(B_), target(std::move(target_)) {
  if (!(alpha > 1.0 / 3.0 && alpha <= 1.0)) {
    throw std::invalid_argument("NoiseModel: alpha must be in (1/3, 1]");
  }
  if (!(A > 0.0) || !(B > 0.0)) {
    throw std::invalid_argument("NoiseModel: A and B must be positive");
  }
  if (alpha < 1.0) {
    // Feasibility at t = 1/2: the event {1/2 - eta <= 1/2} has probability 1.
    double k = alpha / (1.0 - alpha);
    if (A * std::pow(0.5, k) < 1.0 - 1e-12) {
      throw std::invalid_argument("NoiseModel: infeasible certificate, A*(1/2)^(a/(1-a)) < 1");
    }
  }
}

double flip_probability_from_margin(const NoiseModel& noise, double margin) {
  if (noise.alpha >= 1.0) return 0.5 - 0.5 / noise.B;
  double ex = (1.0 - noise.alpha) / noise.alpha;
  double gap = 0.5 * std::pow(std::abs(margin) / noise.B, ex);
  return 0.5 - std::min(0.5, gap);
}

double flip_probability(const NoiseModel& noise, const Vec& x) {
  return flip_probability_from_margin(noise, dot(noise.target.coords, x));
}

double derived_tnc_A(double alpha, double B, double margin_density_bound) {
  if (alpha >= 1.0) return 1.0;
  double k = alpha / (1.0 - alpha);
  // P(1/2 - eta <= t) = P(|m| <= B*(2t)^k) <= 2*p_max*B*(2t)^k for t < 1/2,
  // and equals 1 at t = 1/2; both branches are covered by
  // A = 2^k * max(1, 2*p_max*B).
  return std::pow(2.0, k) * std::max(1.0, 2.0 * margin_density_bound * B);
}

TncReport verify_tnc(const NoiseModel& noise, const MarginalDistribution& dist,
                     const std::vector<double>& t_grid, std::int64_t samples,
                     RandomStream rng) {
  TncReport rep;
  rep.t_grid = t_grid;
  rep.A_claimed = noise.A;

  Vec x(dist.dim);
  if (noise.alpha >= 1.0) {
    // Bounded noise: 1/2 - eta equals 1/(2B) everywhere. Check the constant
    // and report A_required = 1.
    double eta0 = 0.5 - 0.5 / noise.B;
    bool ok = true;
    for (std::int64_t i = 0; i < samples; ++i) {
      sample_into(dist, rng, x.data());
      if (flip_probability(noise, x) > eta0 + 1e-12) ok = false;
    }
    for (double t : t_grid) {
      double p = (t >= 0.5 / noise.B - 1e-15) ? 1.0 : 0.0;
      rep.p_hat.push_back(p);
      rep.p_stderr.push_back(0.0);
      rep.bound.push_back(noise.A);
    }
    rep.A_required = 1.0;
    rep.pass = ok && noise.A >= 1.0;
    return rep;
  }

  double k = noise.alpha / (1.0 - noise.alpha);
  std::vector<std::int64_t> hits(t_grid.size(), 0);
  for (std::int64_t i = 0; i < samples; ++i) {
    sample_into(dist, rng, x.data());
    double gap = 0.5 - flip_probability(noise, x);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      if (gap <= t_grid[j]) ++hits[j];
    }
  }
  bool pass = true;
  double A_req = 0.0;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    double t = t_grid[j];
    double p = double(hits[j]) / double(samples);
    double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / samples) / double(samples));
    double bound = noise.A * std::pow(t, k);
    double p_low = std::max(0.0, p - 3.0 * se);
    if (p_low > bound * (1.0 + 1e-12)) pass = false;
    if (t > 0.0) A_req = std::max(A_req, p_low / std::pow(t, k));
    rep.p_hat.push_back(p);
    rep.p_stderr.push_back(se);
    rep.bound.push_back(bound);
  }
  rep.A_required = A_req;
  rep.pass = pass;
  return rep;
}

std::pair<double, double> mean_flip_probability(const NoiseModel& noise,
                                                const MarginalDistribution& dist,
                                                std::int64_t n, RandomStream rng) {
  Vec x(dist.dim);
  double s = 0.0, s2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double e = flip_probability(noise, x);
    s += e;
    s2 += e * e;
  }
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace alh
