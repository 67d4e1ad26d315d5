// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Monte Carlo criteria run with pinned seeds so the verdict
// is deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "manistats/experiment.hpp"
#include "manistats/inference.hpp"
#include "manistats/report.hpp"
#include "manistats/rng.hpp"
#include "manistats/smeary.hpp"

using namespace manistats;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Check {
  std::string label;
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::vector<Geometry> suite_geometries() {
  return {Geometry::euclidean(3), Geometry::circle(), Geometry::sphere(2, 1.0),
          Geometry::sphere(2, 4.0), Geometry::flat_torus(2),
          Geometry::kendall_planar(5)};
}

// ---------------------------------------------------------------- criterion 1
void criterion_geometry(Check& c) {
  Rng rng(20250801);
  double max_err = 0.0;
  const int cases_per_geometry = 1700;  // x6 geometries > 1e4 cases
  for (const Geometry& g : suite_geometries()) {
    double cut = g.cut_distance();
    double reach = std::isfinite(cut) ? 0.99 * cut : 10.0;
    for (int it = 0; it < cases_per_geometry; ++it) {
      // exp/log inversion
      ManifoldPoint p = random_point(g, rng);
      Eigen::VectorXd comps(g.dim());
      for (int i = 0; i < g.dim(); ++i) comps[i] = rng.normal();
      if (comps.norm() > 0.0) comps *= rng.uniform(0.0, reach) / comps.norm();
      ManifoldPoint q = exp_map({p, comps});
      Eigen::VectorXd back = log_map(p, q).components;
      max_err = std::max(max_err, (back - comps).cwiseAbs().maxCoeff());
      max_err = std::max(max_err, std::abs(dist(p, q) - comps.norm()));

      // metric axioms
      ManifoldPoint a = random_point(g, rng);
      ManifoldPoint b = random_point(g, rng);
      ManifoldPoint m = random_point(g, rng);
      max_err = std::max(max_err, std::abs(dist(a, b) - dist(b, a)));
      double slack = dist(a, m) + dist(m, b) - dist(a, b);
      max_err = std::max(max_err, std::max(0.0, -slack));

      // isometry invariance of the distance (rotation-type maps)
      if (g.kind == Geometry::Kind::Sphere) {
        // swap two ambient axes with a sign flip: an exact isometry
        auto flip = [](const ManifoldPoint& x) {
          Eigen::VectorXd c = x.coords;
          std::swap(c[0], c[1]);
          c[0] = -c[0];
          return ManifoldPoint{x.geom, c};
        };
        max_err = std::max(max_err,
                           std::abs(dist(flip(a), flip(b)) - dist(a, b)));
      } else if (g.kind == Geometry::Kind::Circle) {
        double shift = rng.uniform(0.0, kTwoPi);
        max_err = std::max(
            max_err, std::abs(dist(circle_point(a.coords[0] + shift),
                                   circle_point(b.coords[0] + shift)) -
                              dist(a, b)));
      }
    }
  }
  c.expect(max_err < 1e-9, "max geometry error " + format_double(max_err));
}

// ---------------------------------------------------------------- criterion 2
void criterion_circle_oracle(Check& c) {
  Rng rng(20250802);
  const int grid_cells = 1000000;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_below(29));
    std::vector<double> angles(static_cast<std::size_t>(n));
    std::vector<ManifoldPoint> sample;
    for (int i = 0; i < n; ++i) {
      angles[static_cast<std::size_t>(i)] = rng.uniform(0.0, kTwoPi);
      sample.push_back(circle_point(angles[static_cast<std::size_t>(i)]));
    }
    FrechetResult exact = empirical_mean(sample, {});

    double best_val = std::numeric_limits<double>::infinity();
    double best_angle = 0.0;
    for (int i = 0; i < grid_cells; ++i) {
      double theta = kTwoPi * (i + 0.5) / grid_cells;
      double val = 0.0;
      for (double ang : angles) {
        double d = ang - theta;
        if (d > kPi) d -= kTwoPi;
        if (d < -kPi) d += kTwoPi;
        val += d * d;
      }
      if (val < best_val) {
        best_val = val;
        best_angle = theta;
      }
    }
    worst = std::max(worst,
                     std::abs(circle_diff(exact.mean.coords[0], best_angle)));
  }
  c.expect(worst <= kTwoPi * 1e-6,
           "worst exact-vs-grid gap " + format_double(worst));
}

// ---------------------------------------------------------------- criterion 3
void criterion_euclidean_modulation(Check& c) {
  Eigen::VectorXd e1(2), e2(2), e3(2), e4(2);
  e1 << 1.0, 0.0;
  e2 << -1.0, 0.0;
  e3 << 0.0, 1.0;
  e4 << 0.0, -1.0;
  auto law = Distribution::discrete(
      {0.25, 0.25, 0.25, 0.25},
      {euclidean_point(e1), euclidean_point(e2), euclidean_point(e3),
       euclidean_point(e4)});
  ModulationOptions opts;
  opts.replicates = 1000;
  opts.seed = 20250803;
  ManifoldPoint mu = euclidean_point(Eigen::VectorXd::Zero(2));
  ModulationCurve curve = modulation_curve(law, mu, opts);
  for (std::size_t i = 0; i < curve.m_hat.size(); ++i) {
    std::ostringstream what;
    what << "n=" << curve.sample_sizes[i] << " m_hat=" << curve.m_hat[i]
         << " se=" << curve.std_err[i];
    c.expect(std::abs(curve.m_hat[i] - 1.0) <= 3.0 * curve.std_err[i],
             what.str());
  }
}

// ---------------------------------------------------------------- criterion 4
void criterion_kappa_plateau(Check& c) {
  auto base = two_smeary_circle_base(0.0);
  SolverConfig solver;
  ManifoldPoint mu = population_mean(base, solver).mean;
  auto mixed = construct_kappa_mixture(base, mu, 0.5);
  ModulationOptions opts;
  opts.replicates = 1000;
  opts.seed = 20250804;
  ModulationCurve curve = modulation_curve(mixed, mu, opts);
  double m_last = curve.m_hat.back();
  c.expect(m_last >= 3.2 && m_last <= 4.8,
           "m_hat(1e4) = " + format_double(m_last));
  RateEstimate rate = estimate_rate(curve);
  c.expect(rate.slope < 0.1, "tail slope " + format_double(rate.slope));
}

// ---------------------------------------------------------------- criterion 5
void criterion_directional_hessian(Check& c) {
  const double eps = 1.0 / 3.0;
  for (double K : {1.0, 4.0}) {
    Geometry g = Geometry::sphere(2, K);
    Eigen::VectorXd north(3);
    north << 0.0, 0.0, 1.0 / std::sqrt(K);
    ManifoldPoint mu{g, north};
    Eigen::VectorXd comps(2);
    comps << 1.0, 0.0;
    auto law = construct_directional_smeary(mu, {mu, comps}, eps);
    Eigen::MatrixXd H = hessian_fd(law, mu, 1e-3 / std::sqrt(K));
    std::ostringstream tag;
    tag << "K=" << K;
    c.expect(std::abs(H(1, 1)) < 1e-4,
             tag.str() + " |H_ww|=" + format_double(std::abs(H(1, 1))));
    c.expect(H(0, 0) > 0.1, tag.str() + " H_vv=" + format_double(H(0, 0)));
    double closed = hessian_closed_form(K, eps, solve_t(K, eps));
    c.expect(std::abs(closed) < 1e-12,
             tag.str() + " closed form residual " + format_double(closed));
  }
}

// ---------------------------------------------------------------- criterion 6
void criterion_smeary_rate(Check& c) {
  Geometry g = Geometry::sphere(2, 1.0);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, 1.0;
  ManifoldPoint mu{g, north};
  Eigen::VectorXd v(2), w(2);
  v << 1.0, 0.0;
  w << 0.0, 1.0;
  auto law = construct_directional_smeary(mu, {mu, v}, 1.0 / 3.0);
  ModulationOptions opts;
  opts.replicates = 2000;
  opts.seed = 20250806;
  opts.direction = TangentVector{mu, w};
  ModulationCurve curve = modulation_curve(law, mu, opts);
  RateEstimate rate = estimate_rate(curve);
  std::ostringstream what;
  what << "tail slope " << format_double(rate.slope) << " (m_hat tail:";
  for (std::size_t i = curve.m_hat.size() - 4; i < curve.m_hat.size(); ++i) {
    what << " " << format_double(curve.m_hat[i]);
  }
  what << ")";
  c.expect(rate.slope >= 0.5 && rate.slope <= 0.8, what.str());
}

// ---------------------------------------------------------------- criterion 7
void criterion_power_table(Check& c) {
  fs::path out = fs::temp_directory_path() / "manistats_acceptance_power";
  fs::remove_all(out);
  RunOverrides ov;
  ov.out_dir = out.string();
  std::ostringstream log;
  std::string config =
      std::string(MANISTATS_SOURCE_DIR) + "/configs/power_table.json";
  run_experiment("power-table", config, ov, log);
  auto rows = parse_power_csv(read_file((out / "power.csv").string()));
  double q_null = -1.0, b_null = -1.0, q_alt = -1.0, b_alt = -1.0;
  for (const auto& r : rows) {
    if (r.scenario == "both_with_vimentin") {
      (r.method == TestMethod::Quantile ? q_null : b_null) =
          r.rejection_fraction;
    } else {
      (r.method == TestMethod::Quantile ? q_alt : b_alt) = r.rejection_fraction;
    }
  }
  std::ostringstream what;
  what << "quantile null " << q_null << ", bootstrap null " << b_null
       << ", quantile alt " << q_alt << ", bootstrap alt " << b_alt;
  c.detail = what.str();
  c.expect(b_null >= 0.0 && q_null >= 0.0 && b_alt >= 0.0 && q_alt >= 0.0,
           "missing rows");
  c.expect(b_null <= 0.08, "bootstrap null above 0.08");
  c.expect(q_null >= b_null, "quantile null below bootstrap null");
  c.expect(b_alt >= q_alt + 0.15, "bootstrap power advantage below 0.15");
}

// ---------------------------------------------------------------- criterion 8
void criterion_gclt_algebra(Check& c) {
  Rng rng(20250808);
  double worst = 0.0;
  for (double r : {0.0, 1.0, 2.0}) {
    for (int trial = 0; trial < 50; ++trial) {
      const int dim = 4;
      Eigen::MatrixXd m(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) m(i, j) = rng.normal();
      }
      Eigen::MatrixXd cov =
          m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
      Eigen::VectorXd T(dim);
      for (int i = 0; i < dim; ++i) T[i] = 0.25 + 2.0 * rng.uniform();
      auto prof = SmearinessProfile::make(
          r, Eigen::MatrixXd::Identity(dim, dim), T);
      Eigen::MatrixXd got = gclt_covariance(prof, cov);
      double scale = 4.0 / ((r + 2.0) * (r + 2.0));
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double want = scale * cov(i, j) / (T[i] * T[j]);
          worst = std::max(worst, std::abs(got(i, j) - want));
        }
      }
    }
  }
  c.expect(worst < 1e-12, "max algebra error " + format_double(worst));
}

}  // namespace

int main() {
  struct Entry {
    std::string label;
    std::function<void(Check&)> fn;
  };
  std::vector<Entry> criteria{
      {"1 geometry property suite", criterion_geometry},
      {"2 circle exact mean vs brute force", criterion_circle_oracle},
      {"3 euclidean modulation stays at 1", criterion_euclidean_modulation},
      {"4 kappa mixture modulation plateau at 1/kappa^2",
       criterion_kappa_plateau},
      {"5 directional hessian degeneracy", criterion_directional_hessian},
      {"6 smeary rate of the degenerate direction", criterion_smeary_rate},
      {"7 power table qualitative reproduction", criterion_power_table},
      {"8 gclt covariance algebra", criterion_gclt_algebra},
  };

  int failures = 0;
  for (auto& entry : criteria) {
    Check check;
    check.label = entry.label;
    auto t0 = std::chrono::steady_clock::now();
    try {
      entry.fn(check);
    } catch (const std::exception& e) {
      check.pass = false;
      check.detail = std::string("exception: ") + e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("%-4s criterion %s (%.1f s)%s%s\n",
                check.pass ? "PASS" : "FAIL", entry.label.c_str(), secs,
                check.detail.empty() ? "" : " -- ", check.detail.c_str());
    std::fflush(stdout);
    if (!check.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
