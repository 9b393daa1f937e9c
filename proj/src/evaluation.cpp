#include "alh/evaluation.hpp"

#include <cmath>

namespace alh {

McScalar excess_error(const UnitVector& w, const NoiseModel& noise,
                      const MarginalDistribution& dist, std::int64_t n,
                      RandomStream rng) {
  if (n < 1) throw std::invalid_argument("excess_error: n must be >= 1");
  const int d = dist.dim;
  Vec x(d);
  double s = 0.0, s2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double ms = dot(noise.target.coords.data(), x.data(), d);
    double mw = dot(w.coords.data(), x.data(), d);
    if (sign_pm(mw) != sign_pm(ms)) {
      double c = 1.0 - 2.0 * flip_probability_from_margin(noise, ms);
      s += c;
      s2 += c * c;
    }
  }
  double mean = s / n;
  double var = std::max(0.0, s2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

McScalar disagreement(const UnitVector& w, const UnitVector& v,
                      const MarginalDistribution& dist, std::int64_t n,
                      RandomStream rng) {
  if (n < 1) throw std::invalid_argument("disagreement: n must be >= 1");
  const int d = dist.dim;
  Vec x(d);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    if (sign_pm(dot(w.coords.data(), x.data(), d)) !=
        sign_pm(dot(v.coords.data(), x.data(), d))) {
      ++hits;
    }
  }
  double p = double(hits) / n;
  return {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n)};
}

McScalar stationarity_probe(const UnitVector& w, const Schedule& schedule,
                            const MarginalDistribution& dist, const NoiseModel& noise,
                            std::int64_t n, RandomStream rng) {
  GradEstimate g = population_gradient_oracle(w, schedule.sigma, dist, noise, n, rng);
  return {g.grad_norm(), g.norm_stderr};
}

}  // namespace alh
