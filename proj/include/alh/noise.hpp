#pragma once
// Generative Tsybakov-style label noise and the budget-charging label oracle.
//
// The flip probability depends on x only through the margin m = <w*, x>:
//   alpha < 1:  eta(x) = 1/2 - min(1/2, (|m|/B)^((1-alpha)/alpha) / 2)
//   alpha = 1:  eta(x) = 1/2 - 1/(2B)   (constant, bounded-noise case)
// The tail condition P(1/2 - eta <= t) <= A * t^(alpha/(1-alpha)) then holds
// with a constant A derivable from the marginal's directional density bound.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alh/distributions.hpp"
#include "alh/rng.hpp"
#include "alh/vec.hpp"

namespace alh {

struct NoiseModel {
  double alpha;
  double A;
  double B;  // margin scale
  UnitVector target;

  NoiseModel(double alpha_, double A_, double B_, UnitVector target_);
};

// eta as a function of the margin; flip_probability is eta(<w*, x>).
double flip_probability_from_margin(const NoiseModel& noise, double margin);
double flip_probability(const NoiseModel& noise, const Vec& x);

// Smallest A for which the tail condition provably holds for this model,
// given a bound on the directional margin density of the marginal.
double derived_tnc_A(double alpha, double B, double margin_density_bound);

struct BudgetExhausted : std::runtime_error {
  std::uint64_t queries_used;
  explicit BudgetExhausted(std::uint64_t used)
      : std::runtime_error("label budget exhausted"), queries_used(used) {}
};

// The only source of labels. Flip randomness is keyed by (seed, query index)
// so replay is deterministic regardless of when queries happen.
class LabelingOracle {
 public:
  LabelingOracle(const NoiseModel& noise, std::uint64_t seed,
                 std::optional<std::uint64_t> budget = std::nullopt)
      : noise_(&noise), key_(derive_key(seed, {0x6f7261636c65ull})), budget_(budget) {}

  int query_label(const Vec& x) { return query_label(x.data(), int(x.size())); }

  int query_label(const double* x, int d) {
    if (budget_ && queries_used_ >= *budget_) throw BudgetExhausted(queries_used_);
    double m = dot(noise_->target.coords.data(), x, d);
    double eta = flip_probability_from_margin(*noise_, m);
    double u = double(mix64(key_ + queries_used_ * 0x9e3779b97f4a7c15ull) >> 11) * 0x1.0p-53;
    ++queries_used_;
    int label = sign_pm(m);
    return (u < eta) ? -label : label;
  }

  std::uint64_t queries_used() const { return queries_used_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  const NoiseModel& noise() const { return *noise_; }

 private:
  const NoiseModel* noise_;
  std::uint64_t key_;
  std::uint64_t queries_used_ = 0;
  std::optional<std::uint64_t> budget_;
};

struct TncReport {
  std::vector<double> t_grid;
  std::vector<double> p_hat;      // MC estimate of P(1/2 - eta <= t)
  std::vector<double> p_stderr;
  std::vector<double> bound;      // A * t^(alpha/(1-alpha))
  double A_required = 0.0;        // smallest A passing on the grid (with padding)
  double A_claimed = 0.0;
  bool pass = false;
};

// Checks the tail condition at each grid point with downward binomial
// confidence padding (a point fails only if p_hat - 3*stderr exceeds the
// bound). For alpha = 1 the check is that eta never exceeds its constant.
TncReport verify_tnc(const NoiseModel& noise, const MarginalDistribution& dist,
                     const std::vector<double>& t_grid, std::int64_t samples,
                     RandomStream rng);

// Monte-Carlo estimate of E[eta(x)] = err(w*); zero label cost.
std::pair<double, double> mean_flip_probability(const NoiseModel& noise,
                                                const MarginalDistribution& dist,
                                                std::int64_t n, RandomStream rng);

}  // namespace alh
