#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "manistats/geometry.hpp"
#include "manistats/rng.hpp"

namespace testutil {

using manistats::Geometry;
using manistats::ManifoldPoint;
using manistats::Rng;

inline std::vector<Geometry> all_geometries() {
  return {Geometry::euclidean(3), Geometry::circle(), Geometry::sphere(2, 1.0),
          Geometry::sphere(2, 4.0), Geometry::flat_torus(2),
          Geometry::kendall_planar(5)};
}

inline Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

// A random isometry of the geometry, applied pointwise. Used for the
// equivariance and invariance property tests.
struct Isometry {
  Geometry geom;
  Eigen::MatrixXd rotation;      // sphere / euclidean
  Eigen::VectorXd shift;         // euclidean translation / torus shifts
  double phase = 0.0;            // circle shift, kendall unit scalar
  std::vector<int> permutation;  // kendall landmark relabeling

  ManifoldPoint apply(const ManifoldPoint& p) const {
    switch (geom.kind) {
      case Geometry::Kind::Euclidean:
        return {geom, rotation * p.coords + shift};
      case Geometry::Kind::Circle:
        return manistats::circle_point(p.coords[0] + phase);
      case Geometry::Kind::FlatTorus: {
        Eigen::VectorXd c(p.coords.size());
        for (int i = 0; i < c.size(); ++i) {
          c[i] = manistats::wrap_angle(p.coords[i] + shift[i]);
        }
        return {geom, c};
      }
      case Geometry::Kind::Sphere:
        return {geom, rotation * p.coords};
      case Geometry::Kind::KendallPlanar: {
        const int k = geom.size;
        std::complex<double> rot(std::cos(phase), std::sin(phase));
        Eigen::VectorXd out(2 * k);
        for (int i = 0; i < k; ++i) {
          std::complex<double> z(p.coords[2 * i], p.coords[2 * i + 1]);
          std::complex<double> w = z * rot;
          int target = permutation[static_cast<std::size_t>(i)];
          out[2 * target] = w.real();
          out[2 * target + 1] = w.imag();
        }
        return {geom, out};
      }
    }
    return p;
  }
};

inline Isometry random_isometry(const Geometry& g, Rng& rng) {
  Isometry iso;
  iso.geom = g;
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
      iso.rotation = random_orthogonal(g.size, rng);
      iso.shift = Eigen::VectorXd::Zero(g.size);
      for (int i = 0; i < g.size; ++i) iso.shift[i] = rng.normal();
      break;
    case Geometry::Kind::Circle:
      iso.phase = rng.uniform(0.0, 6.283185307179586);
      break;
    case Geometry::Kind::FlatTorus:
      iso.shift = Eigen::VectorXd::Zero(g.size);
      for (int i = 0; i < g.size; ++i) {
        iso.shift[i] = rng.uniform(0.0, 6.283185307179586);
      }
      break;
    case Geometry::Kind::Sphere:
      iso.rotation = random_orthogonal(g.size + 1, rng);
      break;
    case Geometry::Kind::KendallPlanar: {
      iso.phase = rng.uniform(0.0, 6.283185307179586);
      iso.permutation.resize(static_cast<std::size_t>(g.size));
      std::iota(iso.permutation.begin(), iso.permutation.end(), 0);
      for (int i = g.size - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(iso.permutation[static_cast<std::size_t>(i)],
                  iso.permutation[static_cast<std::size_t>(j)]);
      }
      break;
    }
  }
  return iso;
}

}  // namespace testutil
