#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manistats/frechet.hpp"
#include "manistats/rng.hpp"
#include "manistats/smeary.hpp"
#include "util.hpp"

using namespace manistats;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// brute-force circle mean: argmin of F_n over a dense grid
double circle_grid_argmin(const std::vector<ManifoldPoint>& sample,
                          int cells) {
  double best = 0.0, best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cells; ++i) {
    double theta = kTwoPi * (i + 0.5) / cells;
    double val = 0.0;
    for (const auto& p : sample) {
      double d = std::remainder(p.coords[0] - theta, kTwoPi);
      val += d * d;
    }
    if (val < best_val) {
      best_val = val;
      best = theta;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("empirical mean of a single point") {
  Rng rng(3);
  for (const Geometry& g : testutil::all_geometries()) {
    ManifoldPoint p = random_point(g, rng);
    FrechetResult r = empirical_mean({p}, {});
    CHECK(dist(r.mean, p) < 1e-12);
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.converged);
  }
}

TEST_CASE("empty sample raises") {
  CHECK_THROWS_AS(empirical_mean({}, {}), EmptySampleError);
}

TEST_CASE("symmetric circle pair averages to zero") {
  FrechetResult r =
      empirical_mean({circle_point(-1.0), circle_point(1.0)}, {});
  CHECK(std::abs(circle_diff(r.mean.coords[0], 0.0)) < 1e-12);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("circle exact mean matches the dense grid argmin") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform_below(29));
    std::vector<ManifoldPoint> sample;
    for (int i = 0; i < n; ++i) {
      sample.push_back(circle_point(rng.uniform(0.0, kTwoPi)));
    }
    FrechetResult r = empirical_mean(sample, {});
    double grid = circle_grid_argmin(sample, 200000);
    CHECK(std::abs(circle_diff(r.mean.coords[0], grid)) < kTwoPi * 1e-5);
    CHECK(r.value <= frechet_value(sample, circle_point(grid)) + 1e-12);
  }
}

TEST_CASE("torus mean solves each angle independently") {
  Rng rng(7);
  Geometry g = Geometry::flat_torus(2);
  std::vector<ManifoldPoint> sample;
  for (int i = 0; i < 12; ++i) sample.push_back(random_point(g, rng));
  FrechetResult r = empirical_mean(sample, {});
  for (int c = 0; c < 2; ++c) {
    std::vector<ManifoldPoint> comp;
    for (const auto& p : sample) comp.push_back(circle_point(p.coords[c]));
    FrechetResult rc = empirical_mean(comp, {});
    CHECK(std::abs(circle_diff(r.mean.coords[c], rc.mean.coords[0])) < 1e-10);
  }
}

TEST_CASE("population mean of a point mass") {
  auto law = Distribution::point_mass(circle_point(2.0));
  FrechetResult r = population_mean(law, {});
  CHECK(dist(r.mean, circle_point(2.0)) < 1e-12);
}

TEST_CASE("population mean of a von Mises law is its mean angle") {
  auto law = Distribution::von_mises(2.5, 3.0);
  FrechetResult r = population_mean(law, {});
  CHECK(std::abs(circle_diff(r.mean.coords[0], 2.5)) < 1e-7);
}

TEST_CASE("kappa mixture keeps the base mean") {
  // contamination at the mean must not move it
  auto base = two_smeary_circle_base(1.0);
  SolverConfig cfg;
  ManifoldPoint mu = population_mean(base, cfg).mean;
  auto mixed = construct_kappa_mixture(base, mu, 0.5);
  ManifoldPoint mu2 = population_mean(mixed, cfg).mean;
  CHECK(dist(mu, mu2) < 1e-3);
}

TEST_CASE("directional smeary law has mean at the pole") {
  Geometry g = Geometry::sphere(2, 1.0);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, 1.0;
  ManifoldPoint mu{g, north};
  Eigen::VectorXd comps(2);
  comps << 1.0, 0.0;
  auto law = construct_directional_smeary(mu, {mu, comps}, 1.0 / 3.0);
  FrechetResult r = population_mean(law, {});
  // the Fréchet function is quartic-flat across the W direction, so descent
  // localizes the minimizer only to roughly (value tolerance)^(1/4) there;
  // the value itself is tight
  CHECK(r.value <= frechet_value(law, mu) + 1e-8);
  CHECK(dist(r.mean, mu) < 0.05);
}

TEST_CASE("variance identities") {
  auto pm = Distribution::point_mass(circle_point(0.5));
  CHECK(variance(pm, circle_point(0.5)) == doctest::Approx(0.0));

  // two equal masses at +-t along a geodesic have variance t^2
  Geometry g = Geometry::sphere(2, 1.0);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, 1.0;
  ManifoldPoint mu{g, north};
  Eigen::MatrixXd B = tangent_basis_matrix(mu);
  double t = 0.8;
  auto pair = Distribution::discrete(
      {0.5, 0.5},
      {exp_ambient(mu, t * B.col(0)), exp_ambient(mu, -t * B.col(0))});
  CHECK(variance(pair, mu) == doctest::Approx(t * t));

  // kappa mixture scales the variance by (1 - kappa)
  auto base = two_smeary_circle_base(0.0);
  ManifoldPoint base_mu = population_mean(base, {}).mean;
  double v = variance(base, base_mu);
  auto mixed = construct_kappa_mixture(base, base_mu, 0.3);
  CHECK(variance(mixed, base_mu) == doctest::Approx(0.7 * v).epsilon(1e-12));
}

TEST_CASE("variance is invariant under isometries") {
  Rng rng(19);
  Geometry g = Geometry::sphere(2, 1.0);
  std::vector<ManifoldPoint> pts;
  std::vector<double> w{0.2, 0.3, 0.5};
  for (int i = 0; i < 3; ++i) pts.push_back(random_point(g, rng));
  auto law = Distribution::discrete(w, pts);
  FrechetResult r = population_mean(law, {});
  auto iso = testutil::random_isometry(g, rng);
  std::vector<ManifoldPoint> moved;
  for (const auto& p : pts) moved.push_back(iso.apply(p));
  auto law2 = Distribution::discrete(w, moved);
  CHECK(variance(law2, iso.apply(r.mean)) ==
        doctest::Approx(variance(law, r.mean)).epsilon(1e-9));
}

TEST_CASE("minimizer beats 200 random probe points") {
  Rng rng(23);
  for (const Geometry& g :
       {Geometry::sphere(2, 1.0), Geometry::kendall_planar(5)}) {
    std::vector<ManifoldPoint> sample;
    for (int i = 0; i < 15; ++i) sample.push_back(random_point(g, rng));
    FrechetResult r = empirical_mean(sample, {});
    for (int probe = 0; probe < 200; ++probe) {
      ManifoldPoint q = random_point(g, rng);
      CHECK(r.value <= frechet_value(sample, q) + 1e-9);
    }
  }
}

TEST_CASE("mean is equivariant under isometries") {
  Rng rng(29);
  for (const Geometry& g :
       {Geometry::circle(), Geometry::sphere(2, 1.0),
        Geometry::kendall_planar(5), Geometry::euclidean(3)}) {
    std::vector<ManifoldPoint> sample;
    for (int i = 0; i < 10; ++i) sample.push_back(random_point(g, rng));
    // keep the sample inside a hemisphere-like ball so the mean is unique
    if (g.kind != Geometry::Kind::Euclidean) {
      ManifoldPoint anchor = sample[0];
      sample.clear();
      for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd comps(g.dim());
        for (int c = 0; c < g.dim(); ++c) comps[c] = rng.normal();
        comps *= rng.uniform(0.0, 0.3 * g.cut_distance()) / comps.norm();
        sample.push_back(exp_map({anchor, comps}));
      }
    }
    FrechetResult r = empirical_mean(sample, {});
    auto iso = testutil::random_isometry(g, rng);
    std::vector<ManifoldPoint> moved;
    for (const auto& p : sample) moved.push_back(iso.apply(p));
    FrechetResult r2 = empirical_mean(moved, {});
    CHECK(dist(r2.mean, iso.apply(r.mean)) < 1e-6);
  }
}

TEST_CASE("tie break among global minimizers is seeded and uniform-ish") {
  // two antipodal-ish atoms on the circle: two symmetric minimizers
  std::vector<ManifoldPoint> sample{circle_point(0.0), circle_point(kPi)};
  int hits_first = 0;
  const int runs = 200;
  for (int s = 0; s < runs; ++s) {
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    FrechetResult r = empirical_mean(sample, cfg);
    REQUIRE(r.candidates.size() == 2);
    if (std::abs(circle_diff(r.mean.coords[0], kPi / 2.0)) < 1e-9) {
      ++hits_first;
    }
    // same seed, same pick
    FrechetResult r2 = empirical_mean(sample, cfg);
    CHECK(r2.mean.coords == r.mean.coords);
  }
  CHECK(hits_first > 60);
  CHECK(hits_first < 140);
}

TEST_CASE("tangent coords of the mean itself vanish") {
  Rng rng(31);
  Geometry g = Geometry::sphere(2, 1.0);
  ManifoldPoint p = random_point(g, rng);
  TangentCoords tc = tangent_coords(p, {p});
  REQUIRE(tc.coords.size() == 1);
  CHECK(tc.coords[0].norm() < 1e-12);
  CHECK(tc.dropped == 0);
}

TEST_CASE("circle tangent coord is the signed arc") {
  TangentCoords tc =
      tangent_coords(circle_point(0.0), {circle_point(kPi / 2.0)});
  REQUIRE(tc.coords.size() == 1);
  CHECK(tc.coords[0][0] == doctest::Approx(kPi / 2.0));
}

TEST_CASE("tangent coords drop cut-locus points with a count") {
  TangentCoords tc = tangent_coords(
      circle_point(0.0), {circle_point(kPi), circle_point(1.0)});
  CHECK(tc.dropped == 1);
  REQUIRE(tc.coords.size() == 1);
  CHECK(tc.coords[0][0] == doctest::Approx(1.0));
}

TEST_CASE("directional smeary tangent covariance is (eps t^2, 0)") {
  Geometry g = Geometry::sphere(2, 1.0);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, 1.0;
  ManifoldPoint mu{g, north};
  Eigen::VectorXd comps(2);
  comps << 1.0, 0.0;
  double eps = 1.0 / 3.0;
  auto law = construct_directional_smeary(mu, {mu, comps}, eps);
  auto atoms = law.atoms();
  REQUIRE(atoms.size() == 3);
  double t = dist(mu, atoms[1].point);

  // weighted second-moment matrix of the atom tangent coordinates
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd B = tangent_basis_matrix(mu);
  for (const auto& a : atoms) {
    Eigen::VectorXd x = B.transpose() * log_ambient(mu, a.point);
    second += a.weight * x * x.transpose();
  }
  CHECK(second(0, 0) == doctest::Approx(eps * t * t).epsilon(1e-10));
  CHECK(std::abs(second(1, 1)) < 1e-18);
  CHECK(std::abs(second(0, 1)) < 1e-18);
  // and F at the mean equals eps * t^2
  CHECK(frechet_value(law, mu) == doctest::Approx(eps * t * t));
}
