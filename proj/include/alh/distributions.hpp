#pragma once
// Samplers for the unlabeled marginal D_X plus empirical certification that a
// sampler is well-behaved: its 2-D projected density is bounded below by L on
// a radius-R disk, bounded above by U, and directional margins have
// sub-exponential tails P(|<w,x>| >= t) <= exp(1 - t/beta).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "alh/rng.hpp"
#include "alh/vec.hpp"

namespace alh {

enum class MarginalKind {
  isotropic_gaussian,
  uniform_ball,
  isotropic_logconcave_laplace,
};

MarginalKind marginal_kind_from_string(const std::string& s);
std::string to_string(MarginalKind k);

struct MarginalDistribution {
  MarginalKind kind = MarginalKind::isotropic_gaussian;
  int dim = 2;
  double radius = 1.0;  // uniform_ball only
};

// One draw written into out[0..dim). The hot path: no allocation.
void sample_into(const MarginalDistribution& dist, RandomStream& rng, double* out);

std::vector<Vec> sample(const MarginalDistribution& dist, RandomStream& rng, std::int64_t n);

struct WellBehavedCertificate {
  double L = 0.0;     // density lower bound on the disk of radius R
  double R = 0.0;
  double U = 0.0;     // density upper bound
  double beta = 0.0;  // tail scale
  enum class Source { analytic, empirical } source = Source::empirical;
};

struct CertifyParams {
  // 16 cells per axis keeps ~4000 samples per cell at the default budget;
  // finer grids make the min-cell estimate of L collapse under Poisson noise.
  int grid = 16;                     // histogram resolution over [-R, R]^2
  std::int64_t samples = 1'000'000;  // sample budget
  double R = 0.5;
  int tail_directions = 4;           // random unit w for the beta fit
};

struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Histogram estimate of the density projected onto the first two coordinates
// (justified by isotropy of the supported kinds), plus a tail fit for beta.
// Throws CertificationError if the estimated L is not strictly positive.
WellBehavedCertificate certify_well_behaved(const MarginalDistribution& dist,
                                            const CertifyParams& params,
                                            RandomStream& rng);

// Closed-form certificate; available for isotropic_gaussian and uniform_ball.
WellBehavedCertificate analytic_certificate(const MarginalDistribution& dist, double R);

// Supremum over directions w of the density of <w,x> at any point; used to
// derive a noise-tail certificate.
double max_margin_density(const MarginalDistribution& dist);

}  // namespace alh
