#include "alh/psgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace alh {

namespace {

UnitVector draw_init(const PsgdConfig& cfg, int d, RandomStream& select_rng) {
  if (cfg.init == PsgdInit::e1) return basis_vector(d, 0);
  Vec v(d);
  double n2;
  do {
    n2 = 0.0;
    for (int i = 0; i < d; ++i) {
      v[i] = select_rng.normal();
      n2 += v[i] * v[i];
    }
  } while (n2 == 0.0);
  return UnitVector(std::move(v));
}

}  // namespace

PsgdResult active_psgd(const PsgdConfig& cfg, const MarginalDistribution& dist,
                       LabelingOracle& oracle, RandomStream& sample_rng,
                       RandomStream& select_rng,
                       const std::optional<UnitVector>& init) {
  if (cfg.steps < 1) throw std::invalid_argument("active_psgd: steps must be >= 1");
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("active_psgd: beta must be >= 0");
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("active_psgd: sigma must be > 0");
  const int d = dist.dim;

  // R is drawn before the loop so truncation on budget exhaustion is
  // well-defined. Index i refers to iterate w_i; w_0 is the initial point.
  const std::uint64_t R = select_rng.below(cfg.steps);

  UnitVector w0 = init ? *init : draw_init(cfg, d, select_rng);
  Vec w = w0.coords;
  Vec chosen = (R == 0) ? w : Vec();

  Vec x(d), g(d);
  const std::uint64_t labels_before = oracle.queries_used();
  std::vector<TrajectoryPoint> traj;

  auto labels_spent = [&] { return oracle.queries_used() - labels_before; };

  for (std::uint64_t i = 1; i <= cfg.steps; ++i) {
    bool queried;
    try {
      queried = detail::active_fo_step(w.data(), d, cfg.sigma, dist, oracle,
                                       sample_rng, x.data(), g.data());
    } catch (const BudgetExhausted&) {
      throw PsgdBudgetExhausted(i - 1, labels_spent(), std::move(traj));
    }
    double gnorm2 = 0.0;
    if (queried) {
      gnorm2 = dot(g.data(), g.data(), d);
      double vnorm2 = 0.0;
      for (int j = 0; j < d; ++j) {
        w[j] -= cfg.beta * g[j];
        vnorm2 += w[j] * w[j];
      }
      if (vnorm2 < (1.0 - 1e-9)) {
        throw std::logic_error("active_psgd: pre-projection norm below 1; tangency violated");
      }
      if (cfg.record_trajectory) {
        double expect = 1.0 + cfg.beta * cfg.beta * gnorm2;
        if (std::abs(vnorm2 - expect) > 1e-9 * expect) {
          throw std::logic_error("active_psgd: ||v||^2 != 1 + beta^2 ||g||^2");
        }
      }
      double inv = 1.0 / std::sqrt(vnorm2);
      for (int j = 0; j < d; ++j) w[j] *= inv;
    }
    if (cfg.record_trajectory && (i % std::uint64_t(cfg.trajectory_stride)) == 0) {
      double ang = std::numeric_limits<double>::quiet_NaN();
      if (cfg.target) {
        double c = dot(w.data(), cfg.target->coords.data(), d);
        ang = std::acos(std::clamp(c, -1.0, 1.0));
      }
      traj.push_back({i, ang, std::sqrt(gnorm2), labels_spent()});
    }
    if (i == R) chosen = w;
  }

  PsgdResult res{UnitVector(chosen.empty() ? w0.coords : std::move(chosen)), R,
                 labels_spent(), std::move(traj)};
  return res;
}

}  // namespace alh
