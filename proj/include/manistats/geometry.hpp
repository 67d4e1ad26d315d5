#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "manistats/errors.hpp"

namespace manistats {

class Rng;

// Geometry descriptor for the five supported spaces.
//
// Conventions:
//  - Circle: points are angles in [0, 2*pi).
//  - Sphere(m, K): embedded in R^{m+1} with radius 1/sqrt(K), so the
//    sectional curvature parameter K is literal and the cut distance is
//    pi/sqrt(K).
//  - FlatTorus(m): m independent angles in [0, 2*pi).
//  - KendallPlanar(k): centered unit-norm complex k-vector (pre-shape),
//    stored as 2k reals interleaved (re0, im0, re1, im1, ...). Points equal
//    up to a unit complex scalar are identified; distances live on the
//    complex projective quotient with diameter pi/2.
struct Geometry {
  enum class Kind { Euclidean, Circle, Sphere, FlatTorus, KendallPlanar };

  Kind kind = Kind::Euclidean;
  int size = 1;            // m for Euclidean/Sphere/FlatTorus, landmarks k for KendallPlanar
  double curvature = 1.0;  // Sphere only, K > 0

  static Geometry euclidean(int m);
  static Geometry circle();
  static Geometry sphere(int m, double K);
  static Geometry flat_torus(int m);
  static Geometry kendall_planar(int k);

  int dim() const;
  int ambient_size() const;
  // distance from a generic point to its cut locus (infinity for Euclidean)
  double cut_distance() const;

  bool operator==(const Geometry& o) const;
  bool operator!=(const Geometry& o) const { return !(*this == o); }

  std::string describe() const;
};

struct ManifoldPoint {
  Geometry geom;
  Eigen::VectorXd coords;
};

// Tangent vector expressed in the deterministic orthonormal basis attached
// to its base point (see tangent_basis).
struct TangentVector {
  ManifoldPoint base;
  Eigen::VectorXd components;

  const Geometry& geometry() const { return base.geom; }
  double norm() const { return components.norm(); }
};

// Riemannian distance. Throws GeometryMismatchError if a and b disagree.
double dist(const ManifoldPoint& a, const ManifoldPoint& b);

// Riemannian exponential; defined for all tangent vectors (the supported
// geometries are complete).
ManifoldPoint exp_map(const TangentVector& v);

// Riemannian logarithm; throws CutLocusError when target lies in (or within
// numerical tolerance of) the cut locus of base.
TangentVector log_map(const ManifoldPoint& base, const ManifoldPoint& target);

// True iff dist(base, target) >= cut_distance - tol. Always false on
// Euclidean space. On the flat torus the check is per component.
bool in_cut_locus(const ManifoldPoint& base, const ManifoldPoint& target,
                  double tol);

// Deterministic orthonormal tangent basis at base (Gram-Schmidt from a fixed
// ambient frame). For KendallPlanar the basis spans the horizontal subspace.
std::vector<TangentVector> tangent_basis(const ManifoldPoint& base);

// Ambient-representation tangent operations used by the solvers. For
// Euclidean/Circle/FlatTorus the ambient representation coincides with the
// intrinsic components; for Sphere/KendallPlanar it is the embedded tangent
// vector. All ambient tangent vectors are measured with the plain Euclidean
// inner product, which agrees with the Riemannian metric under the embedding
// conventions above.
Eigen::VectorXd log_ambient(const ManifoldPoint& base,
                            const ManifoldPoint& target);

// Like log_ambient but never throws: at (or numerically on) the cut locus it
// returns one of the minimizing directions, chosen deterministically.
Eigen::VectorXd log_ambient_any(const ManifoldPoint& base,
                                const ManifoldPoint& target);

ManifoldPoint exp_ambient(const ManifoldPoint& base, const Eigen::VectorXd& w);

// Columns are the ambient representations of tangent_basis(base);
// ambient_size x dim with orthonormal columns.
Eigen::MatrixXd tangent_basis_matrix(const ManifoldPoint& base);

// Uniform-ish random point (uniform on circle/torus/sphere/pre-shape sphere,
// standard normal coordinates on Euclidean space). Used for solver restarts
// and property tests.
ManifoldPoint random_point(const Geometry& g, Rng& rng);

// Checks the representation invariants (norms, centering, ranges); throws
// ValidationError on violation.
void validate_point(const ManifoldPoint& p);

// Convenience constructors.
ManifoldPoint circle_point(double angle);
ManifoldPoint euclidean_point(const Eigen::VectorXd& x);
ManifoldPoint torus_point(const Eigen::VectorXd& angles);
ManifoldPoint sphere_point(const Geometry& g, const Eigen::VectorXd& ambient);
// Centers and normalizes the landmarks (re/im interleaved, length 2k).
ManifoldPoint kendall_point(int k, const Eigen::VectorXd& landmarks);

double wrap_angle(double a);                  // into [0, 2*pi)
double circle_diff(double from, double to);   // signed, in [-pi, pi]

}  // namespace manistats
