#include "manistats/smeary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "manistats/parallel.hpp"
#include "manistats/rng.hpp"

namespace manistats {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SlopeFit {
  double slope = 0.0;
  bool ok = false;
};

SlopeFit tail_slope(const ModulationCurve& curve, std::size_t tail_points) {
  const std::size_t n = curve.sample_sizes.size();
  if (n < tail_points || tail_points < 2) return {};
  std::vector<double> xs, ys;
  for (std::size_t i = n - tail_points; i < n; ++i) {
    if (curve.m_hat[i] <= 0.0) return {};
    xs.push_back(std::log(static_cast<double>(curve.sample_sizes[i])));
    ys.push_back(std::log(curve.m_hat[i]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return {};
  return {sxy / sxx, true};
}

}  // namespace

ModulationCurve modulation_curve(const Distribution& law,
                                 const ManifoldPoint& mu,
                                 const ModulationOptions& options) {
  if (law.geometry() != mu.geom) {
    throw GeometryMismatchError("modulation_curve: mu off the law's geometry");
  }
  if (options.sample_sizes.empty() || options.replicates < 1) {
    throw ValidationError("modulation_curve needs sample sizes and replicates");
  }
  for (int n : options.sample_sizes) {
    if (n < 1) throw ValidationError("sample sizes must be positive");
  }
  const double V = frechet_value(law, mu);
  if (V < 1e-14) {
    throw ZeroVarianceError(
        "population variance is zero (law is a single point)");
  }

  Eigen::VectorXd dir_ambient;
  if (options.direction) {
    const TangentVector& w = *options.direction;
    if (w.base.geom != mu.geom) {
      throw GeometryMismatchError("restriction direction off geometry");
    }
    Eigen::MatrixXd B = tangent_basis_matrix(w.base);
    dir_ambient = B * w.components;
    double n = dir_ambient.norm();
    if (n < 1e-12) throw ValidationError("restriction direction is zero");
    dir_ambient /= n;
  }

  ModulationCurve curve;
  curve.sample_sizes = options.sample_sizes;
  curve.replicates = options.replicates;
  curve.population_variance = V;
  curve.seed = options.seed;

  const int B = options.replicates;
  for (std::size_t ni = 0; ni < options.sample_sizes.size(); ++ni) {
    const int n = options.sample_sizes[ni];
    std::vector<double> sq(static_cast<std::size_t>(B), 0.0);
    parallel_for(static_cast<std::size_t>(B), options.threads,
                 [&](std::size_t b) {
                   std::vector<ManifoldPoint> sample;
                   sample.reserve(static_cast<std::size_t>(n));
                   for (int i = 0; i < n; ++i) {
                     std::uint64_t index = derive_seed(
                         static_cast<std::uint64_t>(n),
                         {static_cast<std::uint64_t>(b),
                          static_cast<std::uint64_t>(i)});
                     sample.push_back(law.sample(options.seed, index));
                   }
                   SolverConfig solver = options.solver.with_seed(derive_seed(
                       options.seed, {static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(b), 0xf17ull}));
                   ManifoldPoint mean_hat = empirical_mean(sample, solver).mean;
                   if (dir_ambient.size() > 0) {
                     double c = dir_ambient.dot(log_ambient_any(mu, mean_hat));
                     sq[b] = c * c;
                   } else {
                     double r = dist(mu, mean_hat);
                     sq[b] = r * r;
                   }
                 });
    double mean_sq = 0.0;
    for (double v : sq) mean_sq += v;
    mean_sq /= B;
    double var_sq = 0.0;
    for (double v : sq) var_sq += (v - mean_sq) * (v - mean_sq);
    var_sq = (B > 1) ? var_sq / (B - 1) : 0.0;
    double se_vn = std::sqrt(var_sq / B);
    curve.m_hat.push_back(n * mean_sq / V);
    curve.std_err.push_back(n * se_vn / V);
  }
  return curve;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Euclidean:
      return "euclidean";
    case Regime::FiniteSampleSmeary:
      return "finite_sample_smeary";
    case Regime::Smeary:
      return "smeary";
    case Regime::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

RegimeVerdict classify_regime(const ModulationCurve& curve,
                              const RegimeThresholds& thresholds) {
  const std::size_t n = curve.sample_sizes.size();
  if (n < 4) {
    throw InsufficientDataError("need at least 4 sample sizes");
  }
  double span = static_cast<double>(curve.sample_sizes.back()) /
                static_cast<double>(curve.sample_sizes.front());
  if (span < 100.0) {
    throw InsufficientDataError("sample sizes must span at least 2 decades");
  }

  RegimeVerdict verdict;
  verdict.sup_m = *std::max_element(curve.m_hat.begin(), curve.m_hat.end());
  RateEstimate rate = estimate_rate(curve);
  verdict.slope = rate.slope;

  bool euclidean = true;
  for (std::size_t i = 0; i < n; ++i) {
    double band = thresholds.euclidean_band_se * std::max(curve.std_err[i], 1e-12);
    if (std::abs(curve.m_hat[i] - 1.0) > band) {
      euclidean = false;
      break;
    }
  }
  bool sup_exceeds_one = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (curve.m_hat[i] - thresholds.fss_band_se * curve.std_err[i] > 1.0) {
      sup_exceeds_one = true;
      break;
    }
  }

  std::ostringstream ev;
  ev << "sup_m=" << verdict.sup_m << " tail_slope=" << verdict.slope
     << " bands: euclid=" << thresholds.euclidean_band_se
     << "se fss=" << thresholds.fss_band_se
     << "se slope_min=" << thresholds.slope_min;
  verdict.evidence = ev.str();

  if (euclidean) {
    verdict.regime = Regime::Euclidean;
  } else if (rate.conclusive && verdict.slope > thresholds.slope_min) {
    verdict.regime = Regime::Smeary;
  } else if (sup_exceeds_one) {
    verdict.regime = Regime::FiniteSampleSmeary;
  } else {
    verdict.regime = Regime::Inconclusive;
  }
  return verdict;
}

RateEstimate estimate_rate(const ModulationCurve& curve) {
  const std::size_t n = curve.sample_sizes.size();
  if (n < 4) throw InsufficientDataError("need at least 4 curve points");
  std::size_t tail = std::max<std::size_t>(4, (n + 1) / 2);
  SlopeFit fit = tail_slope(curve, tail);
  RateEstimate est;
  if (!fit.ok) return est;
  est.slope = fit.slope;
  if (fit.slope >= 0.0 && fit.slope < 1.0) {
    est.r_hat = fit.slope / (1.0 - fit.slope);
    est.conclusive = true;
  }
  return est;
}

Distribution construct_kappa_mixture(const Distribution& base,
                                     const ManifoldPoint& mu, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw ValidationError("kappa must lie in (0, 1)");
  }
  if (base.geometry() != mu.geom) {
    throw GeometryMismatchError("kappa mixture: mu off the base geometry");
  }
  std::vector<double> weights{kappa, 1.0 - kappa};
  std::vector<Distribution> comps{Distribution::point_mass(mu), base};
  return Distribution::mixture(std::move(weights), std::move(comps));
}

double solve_t(double K, double epsilon) {
  if (!(K > 0.0)) throw ValidationError("curvature must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  const double rhs = -(1.0 - epsilon) / (2.0 * epsilon);
  // g(x) = x*cos(x) - rhs*sin(x) keeps the root while avoiding the cot pole;
  // strictly decreasing sign pattern on (pi/2, pi)
  auto g = [rhs](double x) { return x * std::cos(x) - rhs * std::sin(x); };
  double lo = kPi / 2.0, hi = kPi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi) / std::sqrt(K);
}

namespace {

// canonical three-atom law on S^2_K used for the empirical root solve
Distribution canonical_directional(double K, double epsilon, double t) {
  Geometry g = Geometry::sphere(2, K);
  double R = 1.0 / std::sqrt(K);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, R;
  ManifoldPoint mu{g, north};
  Eigen::VectorXd v(3);
  v << 1.0, 0.0, 0.0;  // unit tangent at the pole
  ManifoldPoint plus = exp_ambient(mu, t * v);
  ManifoldPoint minus = exp_ambient(mu, -t * v);
  return Distribution::discrete({1.0 - epsilon, epsilon / 2.0, epsilon / 2.0},
                                {mu, plus, minus});
}

}  // namespace

double directional_hessian_fd(const Distribution& dist, const ManifoldPoint& p,
                              const Eigen::VectorXd& dir_ambient, double h) {
  Eigen::VectorXd u = dir_ambient / dir_ambient.norm();
  double f0 = frechet_value(dist, p);
  double fp = frechet_value(dist, exp_ambient(p, h * u));
  double fm = frechet_value(dist, exp_ambient(p, -h * u));
  return (fp - 2.0 * f0 + fm) / (h * h);
}

double solve_t_empirical(double K, double epsilon, double fd_step) {
  if (!(K > 0.0)) throw ValidationError("curvature must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  const double rk = std::sqrt(K);
  Eigen::VectorXd w(3);
  w << 0.0, 1.0, 0.0;  // orthogonal to the atom direction at the pole
  auto phi = [&](double t) {
    Geometry g = Geometry::sphere(2, K);
    Eigen::VectorXd north(3);
    north << 0.0, 0.0, 1.0 / rk;
    ManifoldPoint mu{g, north};
    return directional_hessian_fd(canonical_directional(K, epsilon, t), mu, w,
                                  fd_step / rk);
  };
  // positive just past pi/(2 sqrt K), negative near the antipode
  double lo = (kPi / 2.0 + 1e-6) / rk;
  double hi = (kPi - 1e-6) / rk;
  double flo = phi(lo);
  double fhi = phi(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    throw ValidationError("empirical Hessian root not bracketed");
  }
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = phi(mid);
    if (std::abs(fm) < 1e-8 && (hi - lo) < 1e-10) return mid;
    if (fm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Distribution construct_directional_smeary(const ManifoldPoint& mu,
                                          const TangentVector& v_dir,
                                          double epsilon) {
  const Geometry& g = mu.geom;
  if (g.kind != Geometry::Kind::Sphere) {
    throw ValidationError("directional smeary construction needs a sphere");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (v_dir.base.geom != g) {
    throw GeometryMismatchError("direction based off the construction sphere");
  }
  if (std::abs(v_dir.norm() - 1.0) > 1e-9) {
    throw ValidationError("direction must be a unit tangent vector");
  }
  double t = solve_t_empirical(g.curvature, epsilon);
  Eigen::MatrixXd B = tangent_basis_matrix(v_dir.base);
  Eigen::VectorXd v_amb = B * v_dir.components;
  ManifoldPoint plus = exp_ambient(mu, t * v_amb);
  ManifoldPoint minus = exp_ambient(mu, -t * v_amb);
  return Distribution::discrete({1.0 - epsilon, epsilon / 2.0, epsilon / 2.0},
                                {mu, plus, minus});
}

Eigen::MatrixXd hessian_fd(const Distribution& dist, const ManifoldPoint& p,
                           double h) {
  if (dist.geometry() != p.geom) {
    throw GeometryMismatchError("hessian_fd: point off the law's geometry");
  }
  const int dim = p.geom.dim();
  Eigen::MatrixXd B = tangent_basis_matrix(p);
  Eigen::MatrixXd H(dim, dim);
  const double f0 = frechet_value(dist, p);
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd ei = B.col(i);
    double fp = frechet_value(dist, exp_ambient(p, h * ei));
    double fm = frechet_value(dist, exp_ambient(p, -h * ei));
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      Eigen::VectorXd ej = B.col(j);
      double fpp = frechet_value(dist, exp_ambient(p, h * (ei + ej)));
      double fmm = frechet_value(dist, exp_ambient(p, -h * (ei + ej)));
      double fpm = frechet_value(dist, exp_ambient(p, h * (ei - ej)));
      double fmp = frechet_value(dist, exp_ambient(p, -h * (ei - ej)));
      double v = (fpp + fmm - fpm - fmp) / (4.0 * h * h);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

double hessian_closed_form(double K, double epsilon, double t) {
  if (!(K > 0.0 && t > 0.0)) {
    throw ValidationError("curvature and t must be positive");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  double x = t * std::sqrt(K);
  return (1.0 - epsilon) + 2.0 * epsilon * x * (std::cos(x) / std::sin(x));
}

SmearinessProfile SmearinessProfile::make(double r, Eigen::MatrixXd rotation,
                                          Eigen::VectorXd T,
                                          std::vector<bool> directional) {
  if (r < 0.0) throw ValidationError("smeariness exponent must be >= 0");
  const int dim = static_cast<int>(T.size());
  if (rotation.rows() != dim || rotation.cols() != dim) {
    throw ValidationError("rotation must be dim x dim");
  }
  Eigen::MatrixXd gram = rotation.transpose() * rotation;
  if ((gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() >
      1e-10) {
    throw ValidationError("rotation must be orthogonal within 1e-10");
  }
  if (directional.empty()) directional.assign(static_cast<std::size_t>(dim), false);
  if (static_cast<int>(directional.size()) != dim) {
    throw ValidationError("directional flags must match dim");
  }
  for (int j = 0; j < dim; ++j) {
    if (T[j] < 0.0 || (T[j] == 0.0 && !directional[static_cast<std::size_t>(j)])) {
      throw ValidationError("T entries must be positive unless directional");
    }
  }
  SmearinessProfile p;
  p.r = r;
  p.rotation = std::move(rotation);
  p.T = std::move(T);
  p.directional = std::move(directional);
  return p;
}

Eigen::MatrixXd gclt_covariance(const SmearinessProfile& profile,
                                const Eigen::MatrixXd& cov_log) {
  const int dim = static_cast<int>(profile.T.size());
  if (cov_log.rows() != dim || cov_log.cols() != dim) {
    throw ValidationError("cov_log must be dim x dim");
  }
  for (int j = 0; j < dim; ++j) {
    if (profile.T[j] < 1e-300) {
      throw ValidationError("T is singular; limit covariance undefined");
    }
  }
  double scale = 4.0 / ((profile.r + 2.0) * (profile.r + 2.0));
  Eigen::VectorXd tinv = profile.T.cwiseInverse();
  Eigen::MatrixXd out = tinv.asDiagonal() * cov_log * tinv.asDiagonal();
  out *= scale;
  return out;
}

Distribution two_smeary_circle_base(double mean_angle, double amplitude,
                                    int n_atoms) {
  if (!(amplitude > 0.0 && amplitude <= 8.0 / 9.0)) {
    throw ValidationError("amplitude must lie in (0, 8/9]");
  }
  if (n_atoms < 8) throw ValidationError("need at least 8 atoms");
  std::vector<double> weights(static_cast<std::size_t>(n_atoms));
  std::vector<ManifoldPoint> points;
  points.reserve(static_cast<std::size_t>(n_atoms));
  const double delta = kTwoPi / n_atoms;
  double total = 0.0;
  for (int i = 0; i < n_atoms; ++i) {
    double rel = -kPi + (i + 0.5) * delta;  // midpoint grid, no antipodal atom
    double w = 1.0 + amplitude * std::cos(rel) + amplitude * std::cos(2.0 * rel);
    weights[static_cast<std::size_t>(i)] = w;
    total += w;
    points.push_back(circle_point(mean_angle + rel));
  }
  for (auto& w : weights) w /= total;
  return Distribution::discrete(std::move(weights), std::move(points));
}

}  // namespace manistats
