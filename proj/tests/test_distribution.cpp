#include <doctest.h>

#include <cmath>
#include <numbers>

#include "manistats/distribution.hpp"
#include "manistats/rng.hpp"

using namespace manistats;

namespace {

constexpr double kPi = std::numbers::pi;

// brute-force oracle for the von Mises Fréchet function: dense midpoint rule
double vm_frechet_oracle(double mu, double kappa, double p, int cells) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < cells; ++i) {
    double theta = p - kPi + 2.0 * kPi * (i + 0.5) / cells;
    double w = std::exp(kappa * (std::cos(theta - mu) - 1.0));
    double d = theta - p;
    num += w * d * d;
    den += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("weight validation") {
  std::vector<ManifoldPoint> pts{circle_point(0.0), circle_point(1.0)};
  CHECK_THROWS_AS(Distribution::discrete({0.5, 0.6}, pts), ValidationError);
  CHECK_THROWS_AS(Distribution::discrete({-0.5, 1.5}, pts), ValidationError);
  CHECK_NOTHROW(Distribution::discrete({0.5, 0.5}, pts));
}

TEST_CASE("mixture component geometries must agree") {
  auto a = Distribution::point_mass(circle_point(0.0));
  auto b = Distribution::point_mass(euclidean_point(Eigen::VectorXd::Zero(2)));
  CHECK_THROWS_AS(Distribution::mixture({0.5, 0.5}, {a, b}),
                  GeometryMismatchError);
}

TEST_CASE("draws are a pure function of (law, seed, index)") {
  auto law = Distribution::discrete(
      {0.25, 0.25, 0.5},
      {circle_point(0.0), circle_point(1.0), circle_point(2.0)});
  for (std::uint64_t i = 0; i < 20; ++i) {
    ManifoldPoint a = law.sample(42, i);
    ManifoldPoint b = law.sample(42, i);
    CHECK(a.coords == b.coords);
  }
  bool any_diff = false;
  for (std::uint64_t i = 1; i < 20; ++i) {
    if (law.sample(42, i).coords != law.sample(42, 0).coords) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("atom flattening of nested mixtures") {
  auto inner = Distribution::discrete({0.5, 0.5},
                                      {circle_point(1.0), circle_point(2.0)});
  auto law = Distribution::mixture(
      {0.4, 0.6}, {Distribution::point_mass(circle_point(0.0)), inner});
  auto atoms = law.atoms();
  REQUIRE(atoms.size() == 3);
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  CHECK(total == doctest::Approx(1.0));
  CHECK(atoms[0].weight == doctest::Approx(0.4));
  CHECK(atoms[1].weight == doctest::Approx(0.3));
  CHECK(law.is_discrete());
  CHECK_FALSE(Distribution::von_mises(0.0, 1.0).is_discrete());
  CHECK_THROWS_AS(Distribution::von_mises(0.0, 1.0).atoms(), ValidationError);
}

TEST_CASE("point mass Fréchet value vanishes at the atom") {
  auto law = Distribution::point_mass(circle_point(0.7));
  CHECK(frechet_value(law, circle_point(0.7)) == doctest::Approx(0.0));
}

TEST_CASE("two equal masses at +-pi/2 give F(0) = pi^2/4") {
  auto law = Distribution::discrete(
      {0.5, 0.5}, {circle_point(kPi / 2.0), circle_point(-kPi / 2.0)});
  CHECK(frechet_value(law, circle_point(0.0)) ==
        doctest::Approx(kPi * kPi / 4.0));
}

TEST_CASE("von Mises Fréchet value matches the dense quadrature oracle") {
  struct Case {
    double mu, kappa, p;
  };
  for (const Case& c : {Case{0.0, 0.5, 0.3}, Case{1.0, 2.0, 1.0},
                        Case{2.0, 10.0, 2.5}, Case{0.5, 0.0, 3.0}}) {
    auto law = Distribution::von_mises(c.mu, c.kappa);
    double got = frechet_value(law, circle_point(c.p));
    double want = vm_frechet_oracle(c.mu, c.kappa, c.p, 1 << 21);
    CHECK(std::abs(got - want) / want < 1e-8);
  }
}

TEST_CASE("von Mises sampler concentrates near the mean angle") {
  auto law = Distribution::von_mises(1.0, 8.0);
  double sum_sin = 0.0, sum_cos = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double theta = law.sample(11, static_cast<std::uint64_t>(i)).coords[0];
    sum_sin += std::sin(theta);
    sum_cos += std::cos(theta);
  }
  double mean_dir = std::atan2(sum_sin, sum_cos);
  CHECK(std::abs(circle_diff(mean_dir, 1.0)) < 0.02);
  double resultant = std::hypot(sum_sin, sum_cos) / n;
  CHECK(resultant > 0.9);  // kappa = 8 is highly concentrated
}

TEST_CASE("von Mises sampler matches quadrature moments") {
  auto law = Distribution::von_mises(2.0, 2.0);
  const int n = 40000;
  double mc = 0.0;
  for (int i = 0; i < n; ++i) {
    double theta = law.sample(13, static_cast<std::uint64_t>(i)).coords[0];
    double d = circle_diff(2.0, theta);
    mc += d * d;
  }
  mc /= n;
  double exact = frechet_value(law, circle_point(2.0));
  CHECK(std::abs(mc - exact) < 4.0 * std::sqrt(2.0) * exact / std::sqrt(n));
}

TEST_CASE("expected log drives the gradient to zero at the mean") {
  auto law = Distribution::von_mises(1.5, 3.0);
  CHECK(std::abs(expected_log_ambient(law, circle_point(1.5))[0]) < 1e-10);
  CHECK(expected_log_ambient(law, circle_point(1.0))[0] > 0.0);
}
