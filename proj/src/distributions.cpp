#include "alh/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace alh {

namespace {
constexpr double kPi = std::numbers::pi;

double lgamma_ratio_halfint(double a, double b) {
  // Gamma(a) / Gamma(b) via lgamma; a, b > 0.
  return std::exp(std::lgamma(a) - std::lgamma(b));
}
}  // namespace

MarginalKind marginal_kind_from_string(const std::string& s) {
  if (s == "isotropic_gaussian") return MarginalKind::isotropic_gaussian;
  if (s == "uniform_ball") return MarginalKind::uniform_ball;
  if (s == "isotropic_logconcave_laplace") return MarginalKind::isotropic_logconcave_laplace;
  throw std::invalid_argument("unknown marginal kind: " + s);
}

std::string to_string(MarginalKind k) {
  switch (k) {
    case MarginalKind::isotropic_gaussian: return "isotropic_gaussian";
    case MarginalKind::uniform_ball: return "uniform_ball";
    case MarginalKind::isotropic_logconcave_laplace: return "isotropic_logconcave_laplace";
  }
  return "?";
}

void sample_into(const MarginalDistribution& dist, RandomStream& rng, double* out) {
  const int d = dist.dim;
  switch (dist.kind) {
    case MarginalKind::isotropic_gaussian: {
      for (int i = 0; i < d; ++i) out[i] = rng.normal();
      return;
    }
    case MarginalKind::uniform_ball: {
      double n2;
      do {
        n2 = 0.0;
        for (int i = 0; i < d; ++i) {
          out[i] = rng.normal();
          n2 += out[i] * out[i];
        }
      } while (n2 == 0.0);
      double u = rng.uniform01();
      double scale = dist.radius * std::pow(u, 1.0 / d) / std::sqrt(n2);
      for (int i = 0; i < d; ++i) out[i] *= scale;
      return;
    }
    case MarginalKind::isotropic_logconcave_laplace: {
      // Product Laplace scaled to unit variance: scale b = 1/sqrt(2).
      const double b = 1.0 / std::numbers::sqrt2;
      for (int i = 0; i < d; ++i) {
        double u = rng.uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        out[i] = (u < 0.5) ? b * std::log(2.0 * u) : -b * std::log(2.0 * (1.0 - u));
      }
      return;
    }
  }
}

std::vector<Vec> sample(const MarginalDistribution& dist, RandomStream& rng, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<Vec> out(n, Vec(dist.dim));
  for (std::int64_t i = 0; i < n; ++i) sample_into(dist, rng, out[i].data());
  return out;
}

WellBehavedCertificate analytic_certificate(const MarginalDistribution& dist, double R) {
  WellBehavedCertificate c;
  c.R = R;
  c.source = WellBehavedCertificate::Source::analytic;
  switch (dist.kind) {
    case MarginalKind::isotropic_gaussian:
      c.U = 1.0 / (2.0 * kPi);
      c.L = c.U * std::exp(-R * R / 2.0);
      c.beta = 1.0;
      return c;
    case MarginalKind::uniform_ball: {
      double r = dist.radius;
      if (R >= r) throw CertificationError("analytic_certificate: R must be < ball radius");
      c.U = dist.dim / (2.0 * kPi * r * r);
      c.L = c.U * std::pow(1.0 - R * R / (r * r), (dist.dim - 2) / 2.0);
      c.beta = r;
      return c;
    }
    case MarginalKind::isotropic_logconcave_laplace:
      throw CertificationError("analytic_certificate: not available for product Laplace");
  }
  throw CertificationError("analytic_certificate: unknown kind");
}

double max_margin_density(const MarginalDistribution& dist) {
  switch (dist.kind) {
    case MarginalKind::isotropic_gaussian:
      return 1.0 / std::sqrt(2.0 * kPi);
    case MarginalKind::uniform_ball: {
      int d = dist.dim;
      return lgamma_ratio_halfint(d / 2.0 + 1.0, (d + 1) / 2.0) /
             (std::sqrt(kPi) * dist.radius);
    }
    case MarginalKind::isotropic_logconcave_laplace:
      // Worst direction is a coordinate axis: density 1/(2b) at zero.
      return std::numbers::sqrt2 / 2.0;
  }
  throw std::logic_error("max_margin_density: unknown kind");
}

WellBehavedCertificate certify_well_behaved(const MarginalDistribution& dist,
                                            const CertifyParams& params,
                                            RandomStream& rng) {
  const int d = dist.dim;
  const int g = params.grid;
  const double R = params.R;
  const std::int64_t n = params.samples;
  if (g < 2 || n < 1000 || R <= 0.0) {
    throw std::invalid_argument("certify_well_behaved: bad parameters");
  }

  // Random probe directions for the tail fit.
  std::vector<Vec> dirs;
  for (int k = 0; k < params.tail_directions; ++k) {
    Vec w(d);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        w[i] = rng.normal();
        n2 += w[i] * w[i];
      }
    } while (n2 == 0.0);
    for (double& c : w) c /= std::sqrt(n2);
    dirs.push_back(std::move(w));
  }

  std::vector<std::int64_t> counts(std::size_t(g) * g, 0);
  std::vector<std::vector<float>> margins(dirs.size());
  for (auto& m : margins) m.reserve(n);

  Vec x(d);
  const double cell = 2.0 * R / g;
  for (std::int64_t i = 0; i < n; ++i) {
    sample_into(dist, rng, x.data());
    double px = x[0], py = x[1];
    if (px >= -R && px < R && py >= -R && py < R) {
      int ix = int((px + R) / cell);
      int iy = int((py + R) / cell);
      ix = std::min(ix, g - 1);
      iy = std::min(iy, g - 1);
      ++counts[std::size_t(iy) * g + ix];
    }
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      margins[k].push_back(float(std::abs(dot(x.data(), dirs[k].data(), d))));
    }
  }

  // Density bounds from the histogram. L is taken over cells fully inside the
  // disk of radius R (checked at the outermost cell corner), U over all cells.
  double Lmin = std::numeric_limits<double>::infinity();
  double Umax = 0.0;
  bool have_inner = false;
  const double area = cell * cell;
  for (int iy = 0; iy < g; ++iy) {
    for (int ix = 0; ix < g; ++ix) {
      double x0 = -R + ix * cell, x1 = x0 + cell;
      double y0 = -R + iy * cell, y1 = y0 + cell;
      double cx = std::max(std::abs(x0), std::abs(x1));
      double cy = std::max(std::abs(y0), std::abs(y1));
      double dens = double(counts[std::size_t(iy) * g + ix]) / (double(n) * area);
      Umax = std::max(Umax, dens);
      if (cx * cx + cy * cy <= R * R) {
        have_inner = true;
        Lmin = std::min(Lmin, dens);
      }
    }
  }
  if (!have_inner) throw std::invalid_argument("certify_well_behaved: grid too coarse");
  if (!(Lmin > 0.0)) {
    throw CertificationError("certify_well_behaved: projected density not bounded away from 0 on the disk");
  }

  // Tail scale: smallest beta with P(|<w,x>| >= t) <= exp(1 - t/beta) at a
  // log-spaced grid of empirical tail quantiles, maximized over directions.
  double beta = 0.0;
  const int kFracs = 40;
  for (auto& m : margins) {
    std::sort(m.begin(), m.end());
    for (int j = 0; j < kFracs; ++j) {
      double f = 0.6 * std::pow(1e-4 / 0.6, double(j) / (kFracs - 1));
      std::int64_t k = std::int64_t(f * n);
      if (k < 20) continue;  // too few tail samples to trust
      double t = m[std::size_t(n - k)];
      beta = std::max(beta, t / (1.0 - std::log(double(k) / n)));
    }
  }
  if (beta <= 0.0) beta = R;  // degenerate tiny budgets

  WellBehavedCertificate c;
  c.L = Lmin;
  c.R = R;
  c.U = Umax;
  c.beta = beta;
  c.source = WellBehavedCertificate::Source::empirical;
  return c;
}

}  // namespace alh
