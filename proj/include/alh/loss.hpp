#pragma once
// The softmax surrogate phi_sigma(t) = 1/(1 + e^(t/sigma)), its derivatives,
// the per-sample gradient direction h(w,x,y), the query probability q(w,x),
// and brute-force Monte-Carlo estimators of the population loss
// L_sigma(w) = E[phi_sigma(y <w,x>)] and its gradient. The MC estimators
// integrate the label out analytically via E[y|x] = (1-2*eta(x))*sign(<w*,x>);
// they are simulator-side verification tools with zero label cost.

#include <cstdint>
#include <utility>

#include "alh/distributions.hpp"
#include "alh/noise.hpp"
#include "alh/vec.hpp"

namespace alh {

double phi(double sigma, double t);
double phi_prime(double sigma, double t);   // always negative, even in t
double phi_second(double sigma, double t);  // exposed for the |phi''| <= |phi'|/sigma check

// phi_sigma(y <w,x> / ||w||) for a not-necessarily-unit w; used to test scale
// invariance of the normalized margin.
double surrogate_loss_raw(double sigma, const Vec& w_raw, const Vec& x, int y);

// h(w,x,y) = -(y/sigma) * (x - <w,x> w) for unit w; exactly tangent to w
// (re-orthogonalized once to keep the residual at machine precision even for
// small sigma).
Vec per_sample_gradient(const UnitVector& w, const Vec& x, int y, double sigma);

// q(w,x) = sigma * |phi'_sigma(<w,x>)|, in (0, 1/4].
double query_probability(const UnitVector& w, const Vec& x, double sigma);
double query_probability_from_margin(double sigma, double margin);

struct McScalar {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

McScalar population_loss_mc(const UnitVector& w, double sigma,
                            const MarginalDistribution& dist, const NoiseModel& noise,
                            std::int64_t n, RandomStream rng);

struct GradEstimate {
  Vec grad;
  Vec comp_stderr;
  double norm_stderr = 0.0;  // sqrt of summed component variances

  double grad_norm() const { return norm(grad); }
};

// Analytic-in-y Monte-Carlo estimate of grad L_sigma(w).
GradEstimate population_gradient_oracle(const UnitVector& w, double sigma,
                                        const MarginalDistribution& dist,
                                        const NoiseModel& noise, std::int64_t n,
                                        RandomStream rng);

// Independent cross-check: central finite differences of the population loss
// along an orthonormal tangent basis, with common random numbers (every point
// evaluation reuses the same sample sequence).
GradEstimate fd_population_gradient(const UnitVector& w, double sigma,
                                    const MarginalDistribution& dist,
                                    const NoiseModel& noise, std::int64_t n,
                                    RandomStream rng, double step = 1e-4);

}  // namespace alh
