#include "alh/verify.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "alh/active_fo.hpp"
#include "alh/evaluation.hpp"
#include "alh/loss.hpp"

namespace alh {

namespace {

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

// Unit vector at a given angle from target inside the (target, e2) plane.
UnitVector direction_at_angle(const UnitVector& target, double theta, int ortho_axis) {
  Vec v = target.coords;
  for (double& c : v) c *= std::cos(theta);
  v[ortho_axis] += std::sin(theta);
  return UnitVector(std::move(v));
}

}  // namespace

VerifyReport run_verification(const ExperimentConfig& cfg, std::uint64_t seed) {
  VerifyReport rep;
  const int d = cfg.marginal.dim;
  const double A = cfg.resolved_A();
  const UnitVector target = basis_vector(d, 0);
  const NoiseModel noise(cfg.alpha, A, cfg.margin_scale, target);
  const double eps0 = cfg.epsilons.front();
  const Schedule sched = make_schedule(eps0, cfg.delta, cfg.alpha, A, d, cfg.constants,
                                       cfg.sigma_override, cfg.epsilon_validity);
  const std::int64_t n = cfg.verify_samples;

  // 1. Well-behaved certificate of the marginal.
  {
    VerifyCheck c{"well_behaved_certificate", false, ""};
    try {
      CertifyParams params{cfg.certify_grid, cfg.certify_samples, cfg.certify_R, 4};
      RandomStream rng = substream(seed, {11});
      auto cert = certify_well_behaved(cfg.marginal, params, rng);
      c.pass = cert.L > 0.0 && cert.L <= cert.U && cert.beta > 0.0;
      c.details = "L=" + fmt(cert.L) + " U=" + fmt(cert.U) + " beta=" + fmt(cert.beta);
      if (cfg.marginal.kind != MarginalKind::isotropic_logconcave_laplace) {
        auto an = analytic_certificate(cfg.marginal, cfg.certify_R);
        bool close = std::abs(cert.L - an.L) <= 0.35 * an.L &&
                     std::abs(cert.U - an.U) <= 0.35 * an.U;
        c.pass = c.pass && close;
        c.details += " analytic L=" + fmt(an.L) + " U=" + fmt(an.U);
      }
    } catch (const std::exception& e) {
      c.details = e.what();
    }
    rep.checks.push_back(c);
  }

  // 2. Noise tail condition at the claimed A.
  {
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(0.05 + (0.5 - 0.05) * i / 19.0);
    auto tnc = verify_tnc(noise, cfg.marginal, grid, n, substream(seed, {12}));
    rep.checks.push_back({"tnc_tail_bound", tnc.pass,
                          "A_required=" + fmt(tnc.A_required) + " A=" + fmt(A)});
  }

  // 3. Bayes error bound E[eta] <= 1/2 - alpha * (1/A)^((1-alpha)/alpha).
  {
    auto [mean, se] = mean_flip_probability(noise, cfg.marginal, n, substream(seed, {13}));
    double bound = 0.5 - cfg.alpha * std::pow(1.0 / A, (1.0 - cfg.alpha) / cfg.alpha);
    rep.checks.push_back({"bayes_error_bound", mean <= bound + 3.0 * se,
                          "E[eta]=" + fmt(mean) + " bound=" + fmt(bound)});
  }

  // 4. Gradient samples tangent to w.
  {
    RandomStream rng = substream(seed, {14});
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 20; ++rep_i) {
      Vec v(d);
      for (double& x : v) x = rng.normal();
      UnitVector w(std::move(v));
      LabelingOracle oracle(noise, derive_key(seed, {14, std::uint64_t(rep_i)}));
      for (int i = 0; i < 500; ++i) {
        auto g = active_fo(w, sched.sigma, cfg.marginal, oracle, rng);
        if (g.label_spent) worst = std::max(worst, std::abs(dot(g.vector, w.coords)));
      }
    }
    rep.checks.push_back({"gradient_perpendicularity", worst <= 1e-12,
                          "max |<g,w>|=" + fmt(worst)});
  }

  // 5. Oracle mean against the brute-force population gradient.
  {
    UnitVector w = direction_at_angle(target, 0.5, 1);
    RandomStream rng = substream(seed, {15});
    LabelingOracle oracle(noise, derive_key(seed, {15}));
    Vec mean(d, 0.0), m2(d, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      auto g = active_fo(w, sched.sigma, cfg.marginal, oracle, rng, 0);
      for (int j = 0; j < d; ++j) {
        mean[j] += g.vector[j];
        m2[j] += g.vector[j] * g.vector[j];
      }
    }
    auto pop = population_gradient_oracle(w, sched.sigma, cfg.marginal, noise, n,
                                          substream(seed, {16}));
    bool ok = true;
    double worst_z = 0.0;
    for (int j = 0; j < d; ++j) {
      mean[j] /= double(n);
      double var = std::max(0.0, m2[j] / double(n) - mean[j] * mean[j]);
      double se = std::sqrt(var / double(n));
      double tol = 5.0 * std::sqrt(se * se + pop.comp_stderr[j] * pop.comp_stderr[j]);
      double dev = std::abs(mean[j] - pop.grad[j]);
      worst_z = std::max(worst_z, tol > 0 ? 5.0 * dev / tol : 0.0);
      if (dev > tol) ok = false;
    }
    rep.checks.push_back({"gradient_unbiasedness", ok, "worst z=" + fmt(worst_z)});
  }

  // 6. Expected query rate bounded by min(1/4, sigma * density bound).
  {
    UnitVector w = direction_at_angle(target, 0.5, 1);
    RandomStream rng = substream(seed, {17});
    LabelingOracle oracle(noise, derive_key(seed, {17}));
    std::int64_t spent = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      auto g = active_fo(w, sched.sigma, cfg.marginal, oracle, rng, 0);
      if (g.label_spent) ++spent;
    }
    double rate = double(spent) / double(n);
    double se = std::sqrt(std::max(rate * (1.0 - rate), 1.0 / double(n)) / double(n));
    double bound = std::min(0.25, sched.sigma * max_margin_density(cfg.marginal));
    rep.checks.push_back({"query_rate", rate <= bound + 3.0 * se,
                          "rate=" + fmt(rate) + " bound=" + fmt(bound)});
  }

  // 7. Small gradient norm only happens near +/- target.
  {
    double two_rho = 2.0 * sched.rho;
    bool implication = true;
    bool witness = false;
    std::ostringstream det;
    for (int i = 0; i < 12; ++i) {
      double theta = std::numbers::pi * i / 11.0;
      UnitVector w = direction_at_angle(target, theta, 1);
      auto probe = stationarity_probe(w, sched, cfg.marginal, noise, n,
                                      substream(seed, {18, std::uint64_t(i)}));
      double min_ang = min_angle_to(w, target);
      bool flagged = probe.estimate <= two_rho + 3.0 * probe.stderr_;
      if (flagged && min_ang > sched.theta0) implication = false;
      if (min_ang > 0.3 && probe.estimate > two_rho) witness = true;
    }
    det << "2rho=" << fmt(two_rho) << " theta0=" << fmt(sched.theta0);
    rep.checks.push_back({"stationarity_implies_closeness", implication && witness, det.str()});
  }

  return rep;
}

std::string verify_report_to_json(const VerifyReport& rep) {
  nlohmann::json j;
  j["all_pass"] = rep.all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
  }
  return j.dump(2) + "\n";
}

}  // namespace alh
