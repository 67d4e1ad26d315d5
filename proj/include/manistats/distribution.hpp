#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "manistats/geometry.hpp"

namespace manistats {

class Rng;
class Distribution;

struct WeightedPoint {
  double weight;
  ManifoldPoint point;
};

// Sampleable probability law on one of the supported geometries. Discrete
// laws are exactly integrable; the von Mises law on the circle is integrated
// by quadrature. Draws are a pure function of (law, seed, index).
class Distribution {
 public:
  struct PointMass {
    ManifoldPoint point;
  };
  struct Discrete {
    std::vector<double> weights;
    std::vector<ManifoldPoint> points;
    std::vector<double> cdf;  // inclusive prefix sums, back() == 1
  };
  struct VonMises {
    double mean_angle;     // in [0, 2*pi)
    double concentration;  // kappa >= 0
  };
  struct Mixture {
    std::vector<double> weights;
    std::vector<Distribution> components;
    std::vector<double> cdf;
  };

  static Distribution point_mass(ManifoldPoint p);
  static Distribution discrete(std::vector<double> weights,
                               std::vector<ManifoldPoint> points);
  static Distribution von_mises(double mean_angle, double concentration);
  static Distribution mixture(std::vector<double> weights,
                              std::vector<Distribution> components);

  const Geometry& geometry() const { return geom_; }

  // Pure function of (law, seed, index): every draw derives its own stream.
  ManifoldPoint sample(std::uint64_t seed, std::uint64_t index) const;
  ManifoldPoint sample_with(Rng& rng) const;

  // True when the law has no continuous component and can be flattened to
  // weighted atoms for exact integration.
  bool is_discrete() const;
  std::vector<WeightedPoint> atoms() const;  // throws on continuous laws

  const std::variant<PointMass, Discrete, VonMises, Mixture>& law() const {
    return law_;
  }

 private:
  Distribution(Geometry g, std::variant<PointMass, Discrete, VonMises, Mixture> law)
      : geom_(g), law_(std::move(law)) {}

  Geometry geom_;
  std::variant<PointMass, Discrete, VonMises, Mixture> law_;
};

// F(p) = E[d(X, p)^2]; exact weighted sum for discrete laws, quadrature with
// relative error below 1e-8 for the von Mises law.
double frechet_value(const Distribution& d, const ManifoldPoint& p);

// F_n(p) = (1/n) * sum d(x_j, p)^2.
double frechet_value(const std::vector<ManifoldPoint>& sample,
                     const ManifoldPoint& p);

// E[log_p X] in the ambient tangent representation; the gradient of F at p
// is -2 times this. Atoms numerically at the cut locus of p contribute a
// deterministic minimizing direction.
Eigen::VectorXd expected_log_ambient(const Distribution& d,
                                     const ManifoldPoint& p);

}  // namespace manistats
