#include "alh/learner.hpp"

#include <algorithm>
#include <cmath>

#include "alh/active_fo.hpp"

namespace alh {

namespace {
// Substream tags under the master seed.
enum : std::uint64_t {
  kTagPsgdSample = 1,
  kTagPsgdOracle = 2,
  kTagPsgdSelect = 3,
  kTagSelSample = 4,
  kTagSelOracle = 5,
  kTagSignSample = 6,
  kTagSignOracle = 7,
};
}  // namespace

double label_exponent(double alpha) {
  return (8.0 - 6.0 * alpha) / (3.0 * alpha - 1.0);
}

Schedule make_schedule(double epsilon, double delta, double alpha, double A, int d,
                       const ScheduleConstants& constants,
                       std::optional<double> sigma_override,
                       std::optional<double> validity_threshold) {
  if (!(alpha > 1.0 / 3.0 && alpha <= 1.0)) {
    throw UnsupportedNoiseRegime("make_schedule: alpha must be in (1/3, 1]");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("make_schedule: epsilon and delta must be in (0,1)");
  }
  if (d < 2 || !(A > 0.0)) throw std::invalid_argument("make_schedule: bad d or A");

  Schedule s;
  s.epsilon = epsilon;
  s.delta = delta;
  s.alpha = alpha;
  s.A = A;
  s.d = d;
  s.constants = constants;

  const double li = std::log(1.0 / epsilon);
  s.theta0 = constants.c_theta0 * epsilon / (2.0 * li * li);

  const double denom = 3.0 * alpha - 1.0;
  s.sigma = constants.c_sigma * std::pow(1.0 / A, (1.0 - alpha) / denom) *
            std::pow(s.theta0, 2.0 * alpha / denom);
  if (sigma_override) s.sigma = *sigma_override;
  s.rho = constants.c_rho * std::pow(1.0 / A, 2.0 * (1.0 - alpha) / denom) *
          std::pow(s.theta0, 2.0 * (1.0 - alpha) / denom);

  s.S = std::uint64_t(std::ceil(std::log2(6.0 / delta)));

  // Declared polylog shape (see the run ledger): epsilon-independent so the
  // scaling exponent stays attributable to the leading terms.
  double lg = std::log(6.0 * d / delta);
  s.polylog = lg * lg;

  double n_raw = constants.c_N * d / (s.sigma * s.sigma * std::pow(s.rho, 4.0)) * s.polylog;
  s.N = std::uint64_t(std::min<double>(std::ceil(n_raw), double(constants.step_cap)));
  s.beta = constants.c_beta * s.rho * s.rho * s.sigma * s.sigma / d / s.polylog;

  double m1_raw = constants.c_M1 * d / (s.sigma * s.sigma * s.rho * s.rho) *
                  std::log(double(s.S) / delta);
  s.M1 = std::uint64_t(std::min<double>(std::ceil(m1_raw), double(constants.m1_cap)));

  double m2_raw = constants.c_M2 * std::pow(A, (2.0 - 2.0 * alpha) / alpha) /
                  (alpha * alpha) * std::log(1.0 / delta);
  s.M2 = std::uint64_t(std::max(1.0, std::ceil(m2_raw)));

  double threshold = validity_threshold
                         ? *validity_threshold
                         : 0.5 * alpha * std::pow(1.0 / A, (1.0 - alpha) / alpha);
  s.epsilon_warning = epsilon > threshold;
  return s;
}

std::size_t select_min_norm(const std::vector<double>& norms) {
  if (norms.empty()) throw std::invalid_argument("select_min_norm: empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (norms[i] < norms[best]) best = i;
  }
  return best;
}

UnitVector sign_disambiguate(const UnitVector& w, std::uint64_t M2,
                             const MarginalDistribution& dist, LabelingOracle& oracle,
                             RandomStream& rng) {
  const int d = dist.dim;
  Vec x(d);
  std::uint64_t wrong_plus = 0, wrong_minus = 0;
  for (std::uint64_t i = 0; i < M2; ++i) {
    sample_into(dist, rng, x.data());
    int y = oracle.query_label(x.data(), d);
    int pred = sign_pm(dot(w.coords.data(), x.data(), d));
    if (pred != y) ++wrong_plus;
    if (-pred != y) ++wrong_minus;
  }
  if (wrong_plus + wrong_minus != M2) {
    throw std::logic_error("sign_disambiguate: err(w) + err(-w) != 1 on the sample");
  }
  return (wrong_plus <= wrong_minus) ? w : -w;
}

LearnerResult run_learner(const Schedule& schedule, const MarginalDistribution& dist,
                          const NoiseModel& noise, std::uint64_t master_seed,
                          PsgdInit init, std::optional<std::uint64_t> label_cap) {
  const int d = dist.dim;
  if (d != schedule.d) throw std::invalid_argument("run_learner: schedule/marginal dimension mismatch");

  std::uint64_t spent_total = 0;
  auto remaining = [&]() -> std::optional<std::uint64_t> {
    if (!label_cap) return std::nullopt;
    return (*label_cap > spent_total) ? *label_cap - spent_total : 0;
  };

  PsgdConfig pcfg;
  pcfg.steps = schedule.N;
  pcfg.beta = schedule.beta;
  pcfg.sigma = schedule.sigma;
  pcfg.init = init;

  std::vector<UnitVector> candidates;
  std::vector<std::uint64_t> psgd_labels;
  StageLabels labels;

  for (std::uint64_t s = 0; s < schedule.S; ++s) {
    RandomStream sample_rng = substream(master_seed, {kTagPsgdSample, s});
    RandomStream select_rng = substream(master_seed, {kTagPsgdSelect, s});
    LabelingOracle oracle(noise, derive_key(master_seed, {kTagPsgdOracle, s}), remaining());
    try {
      PsgdResult r = active_psgd(pcfg, dist, oracle, sample_rng, select_rng);
      candidates.push_back(r.iterate);
      psgd_labels.push_back(r.labels_spent);
      labels.psgd += r.labels_spent;
      spent_total += r.labels_spent;
    } catch (const PsgdBudgetExhausted& e) {
      throw BudgetExhausted(spent_total + e.labels_spent);
    }
  }

  // Selection: average M1 oracle samples at each candidate, keep the smallest
  // gradient-norm estimate; ties go to the smaller index.
  std::vector<double> grad_norms;
  Vec x(d), g(d), acc(d);
  for (std::uint64_t s = 0; s < schedule.S; ++s) {
    RandomStream rng = substream(master_seed, {kTagSelSample, s});
    LabelingOracle oracle(noise, derive_key(master_seed, {kTagSelOracle, s}), remaining());
    const double* w = candidates[s].coords.data();
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::uint64_t i = 0; i < schedule.M1; ++i) {
      if (detail::active_fo_step(w, d, schedule.sigma, dist, oracle, rng, x.data(), g.data())) {
        for (int j = 0; j < d; ++j) acc[j] += g[j];
      }
    }
    for (int j = 0; j < d; ++j) acc[j] /= double(schedule.M1);
    grad_norms.push_back(std::sqrt(dot(acc.data(), acc.data(), d)));
    labels.selection += oracle.queries_used();
    spent_total += oracle.queries_used();
  }
  std::size_t best = select_min_norm(grad_norms);
  const UnitVector& w_tilde = candidates[best];

  RandomStream sign_rng = substream(master_seed, {kTagSignSample});
  LabelingOracle sign_oracle(noise, derive_key(master_seed, {kTagSignOracle}), remaining());
  UnitVector w_hat = sign_disambiguate(w_tilde, schedule.M2, dist, sign_oracle, sign_rng);
  labels.sign = sign_oracle.queries_used();
  spent_total += sign_oracle.queries_used();

  LearnerResult res{w_hat, labels, best,
                    dot(w_hat.coords, w_tilde.coords) < 0.0,
                    std::move(grad_norms), std::move(psgd_labels)};
  if (res.labels.total() != spent_total) {
    throw std::logic_error("run_learner: label accounting mismatch");
  }
  return res;
}

}  // namespace alh
