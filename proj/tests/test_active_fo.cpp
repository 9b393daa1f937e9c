#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alh/active_fo.hpp"

using namespace alh;

namespace {

const MarginalDistribution kGauss5{MarginalKind::isotropic_gaussian, 5, 1.0};

double query_rate(double sigma, int d, std::uint64_t seed, int n = 40'000) {
  MarginalDistribution dist{MarginalKind::isotropic_gaussian, d, 1.0};
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(d, 0));
  LabelingOracle oracle(nm, seed);
  RandomStream rng = substream(seed, {1});
  UnitVector w = basis_vector(d, 1);
  int spent = 0;
  for (int i = 0; i < n; ++i) {
    auto g = active_fo(w, sigma, dist, oracle, rng);
    if (g.label_spent) ++spent;
  }
  return double(spent) / n;
}

}  // namespace

TEST_CASE("unqueried steps return an exact zero vector and spend nothing") {
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(5, 0));
  LabelingOracle oracle(nm, 30);
  RandomStream rng = substream(30, {1});
  UnitVector w = basis_vector(5, 1);
  int queried = 0, skipped = 0;
  std::uint64_t used_before = 0;
  for (int i = 0; i < 3'000; ++i) {
    auto g = active_fo(w, 0.05, kGauss5, oracle, rng);
    REQUIRE(g.vector.size() == 5);
    if (g.label_spent) {
      ++queried;
      CHECK(oracle.queries_used() == used_before + 1);
      CHECK(g.queried_x.size() == 5);
    } else {
      ++skipped;
      CHECK(oracle.queries_used() == used_before);
      for (double c : g.vector) CHECK(c == 0.0);
      CHECK(g.queried_x.empty());
    }
    used_before = oracle.queries_used();
  }
  // At sigma=0.05 the query rate is ~2%, so both branches must occur.
  CHECK(queried > 0);
  CHECK(skipped > 0);
  CHECK(oracle.queries_used() == std::uint64_t(queried));
}

TEST_CASE("gradient samples are tangent to the iterate") {
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(5, 0));
  LabelingOracle oracle(nm, 31);
  RandomStream rng = substream(31, {1});
  UnitVector w(Vec{1.0, 2.0, -1.0, 0.5, 0.0});
  double worst = 0.0;
  int queried = 0;
  for (int i = 0; i < 100'000 && queried < 2'000; ++i) {
    auto g = active_fo(w, 0.01, kGauss5, oracle, rng);
    if (!g.label_spent) continue;
    ++queried;
    worst = std::max(worst, std::abs(dot(g.vector, w.coords)));
  }
  CHECK(queried >= 100);
  CHECK(worst <= 1e-12);
}

TEST_CASE("sample mean matches the population gradient") {
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(5, 0));
  LabelingOracle oracle(nm, 32);
  RandomStream rng = substream(32, {1});
  Vec raw{0.8, 0.6, 0.0, 0.0, 0.0};
  UnitVector w(raw);
  const double sigma = 0.1;
  const std::int64_t n = 400'000;
  Vec mean(5, 0.0), m2(5, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    auto g = active_fo(w, sigma, kGauss5, oracle, rng, 0);
    for (int j = 0; j < 5; ++j) {
      mean[j] += g.vector[j];
      m2[j] += g.vector[j] * g.vector[j];
    }
  }
  auto pop = population_gradient_oracle(w, sigma, kGauss5, nm, n, substream(32, {2}));
  for (int j = 0; j < 5; ++j) {
    mean[j] /= double(n);
    double var = std::max(0.0, m2[j] / double(n) - mean[j] * mean[j]);
    double se = std::sqrt(var / double(n));
    double tol = 5.0 * std::sqrt(se * se + pop.comp_stderr[j] * pop.comp_stderr[j]);
    CHECK(std::abs(mean[j] - pop.grad[j]) <= tol);
  }
}

TEST_CASE("query rate scales linearly with sigma") {
  double r1 = query_rate(0.05, 5, 33);
  double r2 = query_rate(0.10, 5, 34);
  double r4 = query_rate(0.20, 5, 35);
  CHECK(r1 < r2);
  CHECK(r2 < r4);
  CHECK(r2 / r1 > 1.5);
  CHECK(r2 / r1 < 2.8);
  CHECK(r4 / r2 > 1.5);
  CHECK(r4 / r2 < 2.8);
  // Absolute level: rate <= sigma * sup directional density, up to MC noise.
  double cap = 0.05 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(r1 <= cap + 4.0 * std::sqrt(cap / 40'000.0));
}

TEST_CASE("second moment grows linearly in d and in 1/sigma") {
  auto second_moment = [](int d, double sigma, std::uint64_t seed) {
    MarginalDistribution dist{MarginalKind::isotropic_gaussian, d, 1.0};
    NoiseModel nm(0.7, 5.04, 1.0, basis_vector(d, 0));
    LabelingOracle oracle(nm, seed);
    RandomStream rng = substream(seed, {1});
    UnitVector w = basis_vector(d, 1);
    const int n = 200'000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      auto g = active_fo(w, sigma, dist, oracle, rng, 0);
      s += dot(g.vector, g.vector);
    }
    return s / n;
  };
  double m_d5 = second_moment(5, 0.1, 36);
  double m_d10 = second_moment(10, 0.1, 37);
  double m_s05 = second_moment(5, 0.05, 38);
  // E||g||^2 ~ (d-1)/sigma: doubling d-1 or halving sigma roughly doubles it.
  CHECK(m_d10 / m_d5 > 1.6);
  CHECK(m_d10 / m_d5 < 2.9);
  CHECK(m_s05 / m_d5 > 1.5);
  CHECK(m_s05 / m_d5 < 2.8);
}

TEST_CASE("query count concentrates around its mean") {
  // 40 repetitions of 5000 draws; ~95% of counts should land inside a
  // 2-sigma binomial band around the pooled mean.
  const int reps = 40, per = 5'000;
  std::vector<int> counts(reps);
  double total = 0.0;
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(5, 0));
  for (int r = 0; r < reps; ++r) {
    LabelingOracle oracle(nm, 100 + r);
    RandomStream rng = substream(100 + r, {1});
    UnitVector w = basis_vector(5, 1);
    int c = 0;
    for (int i = 0; i < per; ++i) {
      auto g = active_fo(w, 0.2, kGauss5, oracle, rng, 0);
      if (g.label_spent) ++c;
    }
    counts[r] = c;
    total += c;
  }
  double p = total / (double(reps) * per);
  double sd = std::sqrt(per * p * (1 - p));
  int inside = 0;
  for (int c : counts) {
    if (std::abs(c - per * p) <= 2.0 * sd) ++inside;
  }
  CHECK(inside >= 33);  // binomial(40, .954): P(<33) ~ 1e-4
}

TEST_CASE("budget exhaustion propagates from the oracle") {
  NoiseModel nm(0.7, 5.04, 1.0, basis_vector(5, 0));
  LabelingOracle oracle(nm, 39, 3);
  RandomStream rng = substream(39, {1});
  UnitVector w = basis_vector(5, 1);
  int spent = 0;
  CHECK_THROWS_AS(
      [&] {
        for (int i = 0; i < 100'000; ++i) {
          auto g = active_fo(w, 0.3, kGauss5, oracle, rng, 0);
          if (g.label_spent) ++spent;
        }
      }(),
      BudgetExhausted);
  CHECK(spent == 3);
}
