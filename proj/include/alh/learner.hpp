#pragma once
// The full pipeline: parameter schedule, S independent PSGD runs, gradient-
// norm selection of one iterate, and sign disambiguation on fresh labels.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alh/distributions.hpp"
#include "alh/noise.hpp"
#include "alh/psgd.hpp"
#include "alh/vec.hpp"

namespace alh {

struct UnsupportedNoiseRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ScheduleConstants {
  double c_theta0 = 1.0;
  double c_sigma = 0.5;
  double c_rho = 0.1;
  double c_N = 1.0;
  double c_beta = 1.0;
  double c_M1 = 1.0;
  double c_M2 = 16.0;
  // Desk-scale caps: the asymptotic step counts are astronomically large at
  // practical (d, epsilon), so N and M1 are clamped. Recorded with every run.
  std::uint64_t step_cap = 2'000'000;
  std::uint64_t m1_cap = 700'000;
};

struct Schedule {
  double epsilon = 0.0, delta = 0.0, alpha = 0.0, A = 0.0;
  int d = 0;
  double theta0 = 0.0, sigma = 0.0, rho = 0.0, beta = 0.0;
  std::uint64_t S = 0, N = 0, M1 = 0, M2 = 0;
  double polylog = 1.0;           // the ln^2 factor applied to N and 1/beta
  bool epsilon_warning = false;   // epsilon exceeds the validity threshold
  ScheduleConstants constants;
};

// Label-complexity exponent (8 - 6*alpha) / (3*alpha - 1).
double label_exponent(double alpha);

// Throws UnsupportedNoiseRegime for alpha <= 1/3. sigma_override replaces the
// scheduled sigma when provided. epsilon above the validity threshold only
// sets epsilon_warning.
Schedule make_schedule(double epsilon, double delta, double alpha, double A, int d,
                       const ScheduleConstants& constants,
                       std::optional<double> sigma_override = std::nullopt,
                       std::optional<double> validity_threshold = std::nullopt);

struct StageLabels {
  std::uint64_t psgd = 0;
  std::uint64_t selection = 0;
  std::uint64_t sign = 0;
  std::uint64_t total() const { return psgd + selection + sign; }
};

struct LearnerResult {
  UnitVector w_hat;
  StageLabels labels;
  std::uint64_t selected_run = 0;
  bool sign_flipped = false;                // w_hat == -w_tilde
  std::vector<double> selection_grad_norms; // ||g_bar_s|| per repetition
  std::vector<std::uint64_t> psgd_labels;   // per repetition
};

// Deterministic argmin with smaller-index tie-breaking.
std::size_t select_min_norm(const std::vector<double>& norms);

// Chooses between +/-w by empirical 0-1 error on M2 fresh labeled examples;
// relies on err(w) + err(-w) = 1 on any fixed sample (asserted). Ties keep +w.
UnitVector sign_disambiguate(const UnitVector& w, std::uint64_t M2,
                             const MarginalDistribution& dist, LabelingOracle& oracle,
                             RandomStream& rng);

// All randomness derives from master_seed; label_cap, when set, is a global
// budget across all stages (BudgetExhausted propagates when hit).
LearnerResult run_learner(const Schedule& schedule, const MarginalDistribution& dist,
                          const NoiseModel& noise, std::uint64_t master_seed,
                          PsgdInit init = PsgdInit::random,
                          std::optional<std::uint64_t> label_cap = std::nullopt);

}  // namespace alh
