#pragma once

#include <cstdint>
#include <vector>

#include "manistats/distribution.hpp"
#include "manistats/geometry.hpp"

namespace manistats {

// Solver settings; constructible from the CLI config file
// (keys: max_iter, grad_tol, tie_tol, n_random_starts, seed).
struct SolverConfig {
  int max_iter = 10000;
  double grad_tol = 1e-9;
  double tie_tol = 1e-7;
  int n_random_starts = 8;
  std::uint64_t seed = 1;
  // cap on deterministic data-driven starts for large samples
  int max_spread_starts = 12;

  SolverConfig with_seed(std::uint64_t s) const {
    SolverConfig c = *this;
    c.seed = s;
    return c;
  }
};

struct FrechetResult {
  struct Candidate {
    ManifoldPoint point;
    double value;
  };

  ManifoldPoint mean;
  double value = 0.0;
  std::vector<Candidate> candidates;  // near-minimal, best first
  bool converged = false;
  int iterations = 0;
};

// Global minimizer of F_n over the sample. On the circle (and componentwise
// on the flat torus) the exact candidate-enumeration algorithm is used; on
// the other geometries multistart Riemannian gradient descent with step
// halving. Candidates tying within tie_tol are resolved by a uniform draw
// from the configured seed.
FrechetResult empirical_mean(const std::vector<ManifoldPoint>& sample,
                             const SolverConfig& config);

// Fréchet mean of a law: exact atom expansion for discrete laws, quadrature
// gradients for the von Mises component on the circle.
FrechetResult population_mean(const Distribution& dist,
                              const SolverConfig& config);

// Population variance V = F(mean).
double variance(const Distribution& dist, const ManifoldPoint& mean);

struct TangentCoords {
  std::vector<Eigen::VectorXd> coords;  // components in tangent_basis(mean)
  std::size_t dropped = 0;              // points at the cut locus of mean
};

// log_mean of every sample point, in the orthonormal basis at mean. Points
// within tolerance of the cut locus are dropped and counted, not errored.
TangentCoords tangent_coords(const ManifoldPoint& mean,
                             const std::vector<ManifoldPoint>& sample);

// Shared weighted-atom solver used by empirical_mean and population_mean.
FrechetResult weighted_frechet_mean(const Geometry& geom,
                                    const std::vector<WeightedPoint>& atoms,
                                    const SolverConfig& config);

}  // namespace manistats
