#include "manistats/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "manistats/rng.hpp"

namespace manistats {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> build_cdf(const std::vector<double>& weights) {
  if (weights.empty()) throw ValidationError("empty weight vector");
  double total = 0.0;
  std::vector<double> cdf(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw ValidationError("weights must be nonnegative");
    }
    total += weights[i];
    cdf[i] = total;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("weights must sum to 1 within 1e-12");
  }
  cdf.back() = 1.0;
  return cdf;
}

std::size_t pick_from_cdf(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

// Simpson panels for the two von Mises integrals needed by F and its
// gradient. The squared-distance integrand is smooth on (p-pi, p+pi) where
// d(theta, p) = |theta - p| exactly, so a single smooth panel suffices.
struct VmIntegrals {
  double value;  // E[d(theta, p)^2]
  double dlog;   // E[signed arc length from p to theta]
};

VmIntegrals von_mises_integrals(double mu, double kappa, double p) {
  // node count grows with concentration to resolve the density peak
  int n = 4096;
  if (kappa > 16.0) {
    n = std::min(1 << 18, 4096 * (1 + static_cast<int>(std::sqrt(kappa) / 4.0)));
  }
  if (n % 2 == 1) ++n;
  const double lo = p - kPi;
  const double h = kTwoPi / n;
  double sw = 0.0, swd2 = 0.0, swd = 0.0;
  for (int i = 0; i <= n; ++i) {
    double theta = lo + h * i;
    double coef = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    // relative density; the Bessel normalization cancels in the ratio
    double w = coef * std::exp(kappa * (std::cos(theta - mu) - 1.0));
    double delta = theta - p;
    sw += w;
    swd2 += w * delta * delta;
    swd += w * delta;
  }
  return {swd2 / sw, swd / sw};
}

}  // namespace

Distribution Distribution::point_mass(ManifoldPoint p) {
  validate_point(p);
  Geometry g = p.geom;
  return Distribution(g, PointMass{std::move(p)});
}

Distribution Distribution::discrete(std::vector<double> weights,
                                    std::vector<ManifoldPoint> points) {
  if (points.empty()) throw ValidationError("discrete law needs atoms");
  if (weights.size() != points.size()) {
    throw ValidationError("weights/points size mismatch");
  }
  Geometry g = points.front().geom;
  for (const auto& p : points) {
    if (p.geom != g) {
      throw GeometryMismatchError("discrete atoms on different geometries");
    }
    validate_point(p);
  }
  Discrete d;
  d.cdf = build_cdf(weights);
  d.weights = std::move(weights);
  d.points = std::move(points);
  return Distribution(g, std::move(d));
}

Distribution Distribution::von_mises(double mean_angle, double concentration) {
  if (!(concentration >= 0.0)) {
    throw ValidationError("von Mises concentration must be >= 0");
  }
  VonMises v{wrap_angle(mean_angle), concentration};
  return Distribution(Geometry::circle(), v);
}

Distribution Distribution::mixture(std::vector<double> weights,
                                   std::vector<Distribution> components) {
  if (components.empty()) throw ValidationError("mixture needs components");
  if (weights.size() != components.size()) {
    throw ValidationError("weights/components size mismatch");
  }
  Geometry g = components.front().geometry();
  for (const auto& c : components) {
    if (c.geometry() != g) {
      throw GeometryMismatchError("mixture components on different geometries");
    }
  }
  Mixture m;
  m.cdf = build_cdf(weights);
  m.weights = std::move(weights);
  m.components = std::move(components);
  return Distribution(g, std::move(m));
}

ManifoldPoint Distribution::sample(std::uint64_t seed,
                                   std::uint64_t index) const {
  Rng rng = Rng::stream(seed, {0x5a3c1ed1u, index});
  return sample_with(rng);
}

ManifoldPoint Distribution::sample_with(Rng& rng) const {
  if (std::holds_alternative<PointMass>(law_)) {
    return std::get<PointMass>(law_).point;
  }
  if (std::holds_alternative<Discrete>(law_)) {
    const auto& d = std::get<Discrete>(law_);
    return d.points[pick_from_cdf(d.cdf, rng.uniform())];
  }
  if (std::holds_alternative<Mixture>(law_)) {
    const auto& m = std::get<Mixture>(law_);
    return m.components[pick_from_cdf(m.cdf, rng.uniform())].sample_with(rng);
  }
  const auto& v = std::get<VonMises>(law_);
  if (v.concentration < 1e-12) {
    return circle_point(rng.uniform(0.0, kTwoPi));
  }
  // Best-Fisher wrapped-Cauchy envelope rejection sampler
  const double kappa = v.concentration;
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    double z = std::cos(kPi * u1);
    double f = (1.0 + r * z) / (r + z);
    double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 ||
        std::log(c / u2) + 1.0 - c >= 0.0) {
      double u3 = rng.uniform();
      double angle = (u3 < 0.5 ? -1.0 : 1.0) * std::acos(f);
      return circle_point(v.mean_angle + angle);
    }
  }
}

bool Distribution::is_discrete() const {
  if (std::holds_alternative<VonMises>(law_)) return false;
  if (std::holds_alternative<Mixture>(law_)) {
    for (const auto& c : std::get<Mixture>(law_).components) {
      if (!c.is_discrete()) return false;
    }
  }
  return true;
}

namespace {
void collect_atoms(const Distribution& d, double scale,
                   std::vector<WeightedPoint>& out) {
  const auto& law = d.law();
  if (std::holds_alternative<Distribution::PointMass>(law)) {
    out.push_back({scale, std::get<Distribution::PointMass>(law).point});
    return;
  }
  if (std::holds_alternative<Distribution::Discrete>(law)) {
    const auto& dd = std::get<Distribution::Discrete>(law);
    for (std::size_t i = 0; i < dd.points.size(); ++i) {
      out.push_back({scale * dd.weights[i], dd.points[i]});
    }
    return;
  }
  if (std::holds_alternative<Distribution::Mixture>(law)) {
    const auto& m = std::get<Distribution::Mixture>(law);
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      collect_atoms(m.components[i], scale * m.weights[i], out);
    }
    return;
  }
  throw ValidationError("law has a continuous component; no atom expansion");
}
}  // namespace

std::vector<WeightedPoint> Distribution::atoms() const {
  std::vector<WeightedPoint> out;
  collect_atoms(*this, 1.0, out);
  return out;
}

double frechet_value(const Distribution& d, const ManifoldPoint& p) {
  if (d.geometry() != p.geom) {
    throw GeometryMismatchError("frechet_value: point off the law's geometry");
  }
  const auto& law = d.law();
  if (std::holds_alternative<Distribution::PointMass>(law)) {
    double r = dist(std::get<Distribution::PointMass>(law).point, p);
    return r * r;
  }
  if (std::holds_alternative<Distribution::Discrete>(law)) {
    const auto& dd = std::get<Distribution::Discrete>(law);
    double s = 0.0;
    for (std::size_t i = 0; i < dd.points.size(); ++i) {
      double r = dist(dd.points[i], p);
      s += dd.weights[i] * r * r;
    }
    return s;
  }
  if (std::holds_alternative<Distribution::Mixture>(law)) {
    const auto& m = std::get<Distribution::Mixture>(law);
    double s = 0.0;
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      s += m.weights[i] * frechet_value(m.components[i], p);
    }
    return s;
  }
  const auto& v = std::get<Distribution::VonMises>(law);
  return von_mises_integrals(v.mean_angle, v.concentration, p.coords[0]).value;
}

double frechet_value(const std::vector<ManifoldPoint>& sample,
                     const ManifoldPoint& p) {
  if (sample.empty()) throw EmptySampleError("frechet_value of empty sample");
  double s = 0.0;
  for (const auto& x : sample) {
    double r = dist(x, p);
    s += r * r;
  }
  return s / static_cast<double>(sample.size());
}

Eigen::VectorXd expected_log_ambient(const Distribution& d,
                                     const ManifoldPoint& p) {
  if (d.geometry() != p.geom) {
    throw GeometryMismatchError("expected_log_ambient: geometry mismatch");
  }
  const auto& law = d.law();
  if (std::holds_alternative<Distribution::PointMass>(law)) {
    return log_ambient_any(p, std::get<Distribution::PointMass>(law).point);
  }
  if (std::holds_alternative<Distribution::Discrete>(law)) {
    const auto& dd = std::get<Distribution::Discrete>(law);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.geom.ambient_size());
    for (std::size_t i = 0; i < dd.points.size(); ++i) {
      g += dd.weights[i] * log_ambient_any(p, dd.points[i]);
    }
    return g;
  }
  if (std::holds_alternative<Distribution::Mixture>(law)) {
    const auto& m = std::get<Distribution::Mixture>(law);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.geom.ambient_size());
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      g += m.weights[i] * expected_log_ambient(m.components[i], p);
    }
    return g;
  }
  const auto& v = std::get<Distribution::VonMises>(law);
  Eigen::VectorXd g(1);
  g[0] = von_mises_integrals(v.mean_angle, v.concentration, p.coords[0]).dlog;
  return g;
}

}  // namespace manistats
