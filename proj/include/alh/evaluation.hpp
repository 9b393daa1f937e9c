#pragma once
// Simulator-side metrics: excess error, disagreement mass, and the
// stationarity probe. These use the noise model analytically and never touch
// the labeling oracle, so their label cost is zero by construction.

#include <cstdint>

#include "alh/distributions.hpp"
#include "alh/learner.hpp"
#include "alh/loss.hpp"
#include "alh/noise.hpp"
#include "alh/vec.hpp"

namespace alh {

// E[(1 - 2*eta(x)) * 1{h_w(x) != h_w*(x)}] = err(w) - err(w*).
McScalar excess_error(const UnitVector& w, const NoiseModel& noise,
                      const MarginalDistribution& dist, std::int64_t n,
                      RandomStream rng);

// P(h_w(x) != h_v(x)).
McScalar disagreement(const UnitVector& w, const UnitVector& v,
                      const MarginalDistribution& dist, std::int64_t n,
                      RandomStream rng);

// ||grad L_sigma(w)|| estimated by the brute-force gradient oracle at the
// schedule's sigma; returns the norm estimate and its stderr bound.
McScalar stationarity_probe(const UnitVector& w, const Schedule& schedule,
                            const MarginalDistribution& dist, const NoiseModel& noise,
                            std::int64_t n, RandomStream rng);

}  // namespace alh
