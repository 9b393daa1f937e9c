#pragma once
// The label-efficient stochastic gradient oracle: sample x ~ D_X, query the
// label only with probability q(w,x) = sigma*|phi'_sigma(<w,x>)|, and return
// h(w,x,y) when queried, the zero vector otherwise. The returned sample is an
// unbiased estimate of grad L_sigma(w) at O(sigma) expected label cost.

#include "alh/distributions.hpp"
#include "alh/loss.hpp"
#include "alh/noise.hpp"
#include "alh/rng.hpp"
#include "alh/vec.hpp"

namespace alh {

struct GradientSample {
  Vec vector;        // zero vector when no label was spent
  bool label_spent = false;
  Vec queried_x;     // retained for diagnostics (empty when not retained)
};

namespace detail {

// Allocation-free step shared by the public oracle and the PSGD inner loop.
// x_buf must have dist.dim slots; g_out is written only when the call queries
// (returns true). The Bernoulli gate consumes the x-sampler's stream so label
// randomness is attributable solely to the oracle.
inline bool active_fo_step(const double* w, int d, double sigma,
                           const MarginalDistribution& dist, LabelingOracle& oracle,
                           RandomStream& rng, double* x_buf, double* g_out) {
  sample_into(dist, rng, x_buf);
  double m = dot(w, x_buf, d);
  double q = query_probability_from_margin(sigma, m);
  double u = rng.uniform01();
  if (u >= q) return false;
  int y = oracle.query_label(x_buf, d);
  for (int i = 0; i < d; ++i) g_out[i] = x_buf[i] - m * w[i];
  double r = dot(g_out, w, d);
  double c = -double(y) / sigma;
  for (int i = 0; i < d; ++i) g_out[i] = c * (g_out[i] - r * w[i]);
  return true;
}

}  // namespace detail

// retain_x defaults to "auto": keep the queried x for diagnostics up to d=100.
inline GradientSample active_fo(const UnitVector& w, double sigma,
                                const MarginalDistribution& dist, LabelingOracle& oracle,
                                RandomStream& rng, int retain_x_max_dim = 100) {
  const int d = w.dim();
  GradientSample out;
  Vec x(d);
  Vec g(d, 0.0);
  out.label_spent = detail::active_fo_step(w.coords.data(), d, sigma, dist, oracle,
                                           rng, x.data(), g.data());
  if (out.label_spent) {
    out.vector = std::move(g);
    if (d <= retain_x_max_dim) out.queried_x = std::move(x);
  } else {
    out.vector.assign(d, 0.0);
  }
  return out;
}

}  // namespace alh
