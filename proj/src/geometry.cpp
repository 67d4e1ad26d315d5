#include "manistats/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "manistats/rng.hpp"

namespace manistats {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// relative tolerance for the "numerically at the cut locus" test inside log
constexpr double kLogCutTol = 1e-10;

using ComplexVec = Eigen::VectorXcd;

Eigen::Map<const ComplexVec> as_complex(const Eigen::VectorXd& v) {
  return Eigen::Map<const ComplexVec>(
      reinterpret_cast<const std::complex<double>*>(v.data()), v.size() / 2);
}

Eigen::VectorXd from_complex(const ComplexVec& z) {
  Eigen::VectorXd out(2 * z.size());
  Eigen::Map<ComplexVec>(reinterpret_cast<std::complex<double>*>(out.data()),
                         z.size()) = z;
  return out;
}

void require_same_geometry(const ManifoldPoint& a, const ManifoldPoint& b) {
  if (a.geom != b.geom) {
    throw GeometryMismatchError("points live on different geometries: " +
                                a.geom.describe() + " vs " + b.geom.describe());
  }
}

double clamp1(double x) { return std::min(1.0, std::max(-1.0, x)); }

}  // namespace

Geometry Geometry::euclidean(int m) {
  if (m < 1) throw ValidationError("Euclidean dimension must be >= 1");
  Geometry g;
  g.kind = Kind::Euclidean;
  g.size = m;
  return g;
}

Geometry Geometry::circle() {
  Geometry g;
  g.kind = Kind::Circle;
  g.size = 1;
  return g;
}

Geometry Geometry::sphere(int m, double K) {
  if (m < 1) throw ValidationError("sphere dimension must be >= 1");
  if (!(K > 0.0)) throw ValidationError("sphere curvature must be positive");
  Geometry g;
  g.kind = Kind::Sphere;
  g.size = m;
  g.curvature = K;
  return g;
}

Geometry Geometry::flat_torus(int m) {
  if (m < 1) throw ValidationError("torus dimension must be >= 1");
  Geometry g;
  g.kind = Kind::FlatTorus;
  g.size = m;
  return g;
}

Geometry Geometry::kendall_planar(int k) {
  if (k < 3) throw ValidationError("Kendall planar shapes need >= 3 landmarks");
  Geometry g;
  g.kind = Kind::KendallPlanar;
  g.size = k;
  return g;
}

int Geometry::dim() const {
  switch (kind) {
    case Kind::Euclidean:
    case Kind::Sphere:
    case Kind::FlatTorus:
      return size;
    case Kind::Circle:
      return 1;
    case Kind::KendallPlanar:
      return 2 * size - 4;
  }
  return 0;
}

int Geometry::ambient_size() const {
  switch (kind) {
    case Kind::Euclidean:
    case Kind::FlatTorus:
      return size;
    case Kind::Circle:
      return 1;
    case Kind::Sphere:
      return size + 1;
    case Kind::KendallPlanar:
      return 2 * size;
  }
  return 0;
}

double Geometry::cut_distance() const {
  switch (kind) {
    case Kind::Euclidean:
      return std::numeric_limits<double>::infinity();
    case Kind::Circle:
    case Kind::FlatTorus:
      return kPi;
    case Kind::Sphere:
      return kPi / std::sqrt(curvature);
    case Kind::KendallPlanar:
      return kPi / 2.0;
  }
  return 0.0;
}

bool Geometry::operator==(const Geometry& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::Sphere) return size == o.size && curvature == o.curvature;
  if (kind == Kind::Circle) return true;
  return size == o.size;
}

std::string Geometry::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Euclidean:
      os << "euclidean(" << size << ")";
      break;
    case Kind::Circle:
      os << "circle";
      break;
    case Kind::Sphere:
      os << "sphere(" << size << ", K=" << curvature << ")";
      break;
    case Kind::FlatTorus:
      os << "flat_torus(" << size << ")";
      break;
    case Kind::KendallPlanar:
      os << "kendall_planar(" << size << ")";
      break;
  }
  return os.str();
}

double wrap_angle(double a) {
  double w = a - kTwoPi * std::floor(a / kTwoPi);
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double circle_diff(double from, double to) {
  return std::remainder(to - from, kTwoPi);
}

double dist(const ManifoldPoint& a, const ManifoldPoint& b) {
  require_same_geometry(a, b);
  switch (a.geom.kind) {
    case Geometry::Kind::Euclidean:
      return (a.coords - b.coords).norm();
    case Geometry::Kind::Circle:
      return std::abs(circle_diff(a.coords[0], b.coords[0]));
    case Geometry::Kind::FlatTorus: {
      double s = 0.0;
      for (int i = 0; i < a.geom.size; ++i) {
        double d = circle_diff(a.coords[i], b.coords[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Geometry::Kind::Sphere: {
      double rk = std::sqrt(a.geom.curvature);
      // unit-sphere representatives
      Eigen::VectorXd ua = a.coords * rk;
      Eigen::VectorXd ub = b.coords * rk;
      double c = clamp1(ua.dot(ub));
      double s = (ub - c * ua).norm();
      return std::atan2(s, c) / rk;
    }
    case Geometry::Kind::KendallPlanar: {
      auto za = as_complex(a.coords);
      auto zb = as_complex(b.coords);
      std::complex<double> h = za.dot(zb);  // conjugate-linear in za
      double c = clamp1(std::abs(h));
      // rotation-aligned residual gives a stable sine
      ComplexVec aligned =
          (c > 0.0) ? ComplexVec(zb * (std::conj(h) / std::abs(h))) : ComplexVec(zb);
      double s = (aligned - c * za.matrix()).norm();
      return std::atan2(s, c);
    }
  }
  return 0.0;
}

Eigen::VectorXd log_ambient_impl(const ManifoldPoint& base,
                                 const ManifoldPoint& target, bool allow_cut) {
  require_same_geometry(base, target);
  const Geometry& g = base.geom;
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
      return target.coords - base.coords;
    case Geometry::Kind::Circle: {
      double d = circle_diff(base.coords[0], target.coords[0]);
      if (std::abs(d) >= kPi * (1.0 - kLogCutTol)) {
        if (!allow_cut) {
          throw CutLocusError("circle log at the antipode");
        }
        d = kPi;  // deterministic choice between the two minimizing arcs
      }
      Eigen::VectorXd v(1);
      v[0] = d;
      return v;
    }
    case Geometry::Kind::FlatTorus: {
      Eigen::VectorXd v(g.size);
      for (int i = 0; i < g.size; ++i) {
        double d = circle_diff(base.coords[i], target.coords[i]);
        if (std::abs(d) >= kPi * (1.0 - kLogCutTol)) {
          if (!allow_cut) {
            throw CutLocusError("torus log: component at the antipode");
          }
          d = kPi;
        }
        v[i] = d;
      }
      return v;
    }
    case Geometry::Kind::Sphere: {
      double rk = std::sqrt(g.curvature);
      Eigen::VectorXd ua = base.coords * rk;
      Eigen::VectorXd ub = target.coords * rk;
      double c = clamp1(ua.dot(ub));
      Eigen::VectorXd w = ub - c * ua;
      double s = w.norm();
      double theta = std::atan2(s, c);
      if (theta >= kPi * (1.0 - kLogCutTol)) {
        if (!allow_cut) {
          throw CutLocusError("sphere log at the antipode");
        }
        // any direction is minimizing; pick a deterministic unit tangent
        int j = 0;
        for (int i = 1; i < ua.size(); ++i) {
          if (std::abs(ua[i]) < std::abs(ua[j])) j = i;
        }
        Eigen::VectorXd e = Eigen::VectorXd::Zero(ua.size());
        e[j] = 1.0;
        w = e - ua[j] * ua;
        s = w.norm();
        return (kPi / rk) * (w / s);
      }
      if (s == 0.0) return Eigen::VectorXd::Zero(ua.size());
      return (theta / rk) * (w / s);
    }
    case Geometry::Kind::KendallPlanar: {
      auto za = as_complex(base.coords);
      auto zb = as_complex(target.coords);
      std::complex<double> h = za.dot(zb);
      double c = clamp1(std::abs(h));
      double theta = std::acos(c);
      if (theta >= (kPi / 2.0) * (1.0 - kLogCutTol)) {
        if (!allow_cut) {
          throw CutLocusError("shape log at the cut locus (orthogonal shapes)");
        }
        // alignment is arbitrary at the cut locus; use the raw representative
        ComplexVec w0 = zb - (za.dot(zb)) * za.matrix();
        double s0 = w0.norm();
        if (s0 == 0.0) return Eigen::VectorXd::Zero(base.coords.size());
        return from_complex(ComplexVec((kPi / 2.0) * (w0 / s0)));
      }
      ComplexVec aligned =
          (c > 0.0) ? ComplexVec(zb * (std::conj(h) / std::abs(h))) : ComplexVec(zb);
      ComplexVec w = aligned - c * za.matrix();
      double s = w.norm();
      if (s == 0.0) return Eigen::VectorXd::Zero(base.coords.size());
      return from_complex(ComplexVec(theta * (w / s)));
    }
  }
  return Eigen::VectorXd();
}

Eigen::VectorXd log_ambient(const ManifoldPoint& base,
                            const ManifoldPoint& target) {
  return log_ambient_impl(base, target, false);
}

Eigen::VectorXd log_ambient_any(const ManifoldPoint& base,
                                const ManifoldPoint& target) {
  return log_ambient_impl(base, target, true);
}

ManifoldPoint exp_ambient(const ManifoldPoint& base, const Eigen::VectorXd& w) {
  const Geometry& g = base.geom;
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
      return {g, base.coords + w};
    case Geometry::Kind::Circle: {
      Eigen::VectorXd c(1);
      c[0] = wrap_angle(base.coords[0] + w[0]);
      return {g, c};
    }
    case Geometry::Kind::FlatTorus: {
      Eigen::VectorXd c(g.size);
      for (int i = 0; i < g.size; ++i) c[i] = wrap_angle(base.coords[i] + w[i]);
      return {g, c};
    }
    case Geometry::Kind::Sphere: {
      double rk = std::sqrt(g.curvature);
      double t = w.norm();
      if (t == 0.0) return base;
      double theta = t * rk;
      Eigen::VectorXd out =
          std::cos(theta) * base.coords + (std::sin(theta) / rk) * (w / t);
      out *= (1.0 / rk) / out.norm();
      return {g, out};
    }
    case Geometry::Kind::KendallPlanar: {
      double t = w.norm();
      if (t == 0.0) return base;
      auto z = as_complex(base.coords);
      auto u = as_complex(w);
      ComplexVec out = std::cos(t) * z.matrix() + (std::sin(t) / t) * u.matrix();
      std::complex<double> mean = out.sum() / static_cast<double>(g.size);
      out.array() -= mean;
      out /= out.norm();
      return {g, from_complex(out)};
    }
  }
  return base;
}

Eigen::MatrixXd tangent_basis_matrix(const ManifoldPoint& base) {
  const Geometry& g = base.geom;
  const int dim = g.dim();
  const int amb = g.ambient_size();
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
    case Geometry::Kind::Circle:
    case Geometry::Kind::FlatTorus:
      return Eigen::MatrixXd::Identity(amb, dim);
    case Geometry::Kind::Sphere: {
      double rk = std::sqrt(g.curvature);
      Eigen::VectorXd u = base.coords * rk;  // unit normal
      Eigen::MatrixXd B(amb, dim);
      int got = 0;
      for (int j = 0; j < amb && got < dim; ++j) {
        Eigen::VectorXd cand = Eigen::VectorXd::Zero(amb);
        cand[j] = 1.0;
        cand -= u[j] * u;
        for (int c = 0; c < got; ++c) cand -= B.col(c).dot(cand) * B.col(c);
        double n = cand.norm();
        if (n > 1e-8) {
          B.col(got++) = cand / n;
        }
      }
      return B;
    }
    case Geometry::Kind::KendallPlanar: {
      auto z = as_complex(base.coords);
      const int k = g.size;
      Eigen::MatrixXd B(amb, dim);
      int got = 0;
      for (int j = 0; j < k && got < dim; ++j) {
        for (int part = 0; part < 2 && got < dim; ++part) {
          ComplexVec cand = ComplexVec::Zero(k);
          cand[j] = (part == 0) ? std::complex<double>(1.0, 0.0)
                                : std::complex<double>(0.0, 1.0);
          // center, then remove the complex span of z (radius and rotation)
          cand.array() -= cand.sum() / static_cast<double>(k);
          cand -= z.dot(cand) * z.matrix();
          Eigen::VectorXd real_cand = from_complex(cand);
          for (int c = 0; c < got; ++c) {
            real_cand -= B.col(c).dot(real_cand) * B.col(c);
          }
          double n = real_cand.norm();
          if (n > 1e-8) {
            B.col(got++) = real_cand / n;
          }
        }
      }
      if (got != dim) {
        throw ValidationError("tangent basis construction failed at shape");
      }
      return B;
    }
  }
  return Eigen::MatrixXd();
}

std::vector<TangentVector> tangent_basis(const ManifoldPoint& base) {
  Eigen::MatrixXd B = tangent_basis_matrix(base);
  std::vector<TangentVector> out;
  const int dim = base.geom.dim();
  out.reserve(dim);
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXd comps = Eigen::VectorXd::Zero(dim);
    comps[j] = 1.0;
    out.push_back(TangentVector{base, comps});
  }
  return out;
}

ManifoldPoint exp_map(const TangentVector& v) {
  if (v.components.size() != v.base.geom.dim()) {
    throw ValidationError("tangent vector has wrong component count");
  }
  const Geometry& g = v.base.geom;
  if (g.kind == Geometry::Kind::Euclidean ||
      g.kind == Geometry::Kind::Circle ||
      g.kind == Geometry::Kind::FlatTorus) {
    return exp_ambient(v.base, v.components);
  }
  Eigen::MatrixXd B = tangent_basis_matrix(v.base);
  return exp_ambient(v.base, B * v.components);
}

TangentVector log_map(const ManifoldPoint& base, const ManifoldPoint& target) {
  Eigen::VectorXd w = log_ambient(base, target);
  const Geometry& g = base.geom;
  if (g.kind == Geometry::Kind::Euclidean ||
      g.kind == Geometry::Kind::Circle ||
      g.kind == Geometry::Kind::FlatTorus) {
    return TangentVector{base, w};
  }
  Eigen::MatrixXd B = tangent_basis_matrix(base);
  return TangentVector{base, B.transpose() * w};
}

bool in_cut_locus(const ManifoldPoint& base, const ManifoldPoint& target,
                  double tol) {
  require_same_geometry(base, target);
  const Geometry& g = base.geom;
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
      return false;
    case Geometry::Kind::FlatTorus: {
      for (int i = 0; i < g.size; ++i) {
        if (std::abs(circle_diff(base.coords[i], target.coords[i])) >=
            kPi - tol) {
          return true;
        }
      }
      return false;
    }
    default:
      return dist(base, target) >= g.cut_distance() - tol;
  }
}

ManifoldPoint random_point(const Geometry& g, Rng& rng) {
  switch (g.kind) {
    case Geometry::Kind::Euclidean: {
      Eigen::VectorXd c(g.size);
      for (int i = 0; i < g.size; ++i) c[i] = rng.normal();
      return {g, c};
    }
    case Geometry::Kind::Circle: {
      Eigen::VectorXd c(1);
      c[0] = rng.uniform(0.0, kTwoPi);
      return {g, c};
    }
    case Geometry::Kind::FlatTorus: {
      Eigen::VectorXd c(g.size);
      for (int i = 0; i < g.size; ++i) c[i] = rng.uniform(0.0, kTwoPi);
      return {g, c};
    }
    case Geometry::Kind::Sphere: {
      Eigen::VectorXd c(g.size + 1);
      double n = 0.0;
      do {
        for (int i = 0; i <= g.size; ++i) c[i] = rng.normal();
        n = c.norm();
      } while (n < 1e-12);
      c *= (1.0 / std::sqrt(g.curvature)) / n;
      return {g, c};
    }
    case Geometry::Kind::KendallPlanar: {
      Eigen::VectorXd raw(2 * g.size);
      for (;;) {
        for (int i = 0; i < raw.size(); ++i) raw[i] = rng.normal();
        auto z = as_complex(raw);
        ComplexVec centered = z;
        centered.array() -= z.sum() / static_cast<double>(g.size);
        double n = centered.norm();
        if (n > 1e-9) {
          centered /= n;
          return {g, from_complex(centered)};
        }
      }
    }
  }
  return {g, Eigen::VectorXd()};
}

void validate_point(const ManifoldPoint& p) {
  const Geometry& g = p.geom;
  if (p.coords.size() != g.ambient_size()) {
    throw ValidationError("point has wrong coordinate count for " +
                          g.describe());
  }
  if (!p.coords.allFinite()) {
    throw ValidationError("point has non-finite coordinates");
  }
  switch (g.kind) {
    case Geometry::Kind::Euclidean:
      break;
    case Geometry::Kind::Circle:
    case Geometry::Kind::FlatTorus:
      for (int i = 0; i < p.coords.size(); ++i) {
        if (p.coords[i] < 0.0 || p.coords[i] >= kTwoPi) {
          throw ValidationError("angle outside [0, 2*pi)");
        }
      }
      break;
    case Geometry::Kind::Sphere: {
      double want = 1.0 / std::sqrt(g.curvature);
      if (std::abs(p.coords.norm() - want) > 1e-9 * (1.0 + want)) {
        throw ValidationError("sphere point off the radius-1/sqrt(K) sphere");
      }
      break;
    }
    case Geometry::Kind::KendallPlanar: {
      auto z = as_complex(p.coords);
      if (std::abs(z.sum()) > 1e-9) {
        throw ValidationError("pre-shape not centered");
      }
      if (std::abs(z.norm() - 1.0) > 1e-9) {
        throw ValidationError("pre-shape not unit norm");
      }
      break;
    }
  }
}

ManifoldPoint circle_point(double angle) {
  Eigen::VectorXd c(1);
  c[0] = wrap_angle(angle);
  return {Geometry::circle(), c};
}

ManifoldPoint euclidean_point(const Eigen::VectorXd& x) {
  return {Geometry::euclidean(static_cast<int>(x.size())), x};
}

ManifoldPoint torus_point(const Eigen::VectorXd& angles) {
  Eigen::VectorXd c(angles.size());
  for (int i = 0; i < angles.size(); ++i) c[i] = wrap_angle(angles[i]);
  return {Geometry::flat_torus(static_cast<int>(angles.size())), c};
}

ManifoldPoint sphere_point(const Geometry& g, const Eigen::VectorXd& ambient) {
  if (g.kind != Geometry::Kind::Sphere) {
    throw ValidationError("sphere_point needs a sphere geometry");
  }
  double n = ambient.norm();
  if (n == 0.0) throw ValidationError("cannot project zero vector to sphere");
  Eigen::VectorXd c = ambient * ((1.0 / std::sqrt(g.curvature)) / n);
  return {g, c};
}

ManifoldPoint kendall_point(int k, const Eigen::VectorXd& landmarks) {
  if (landmarks.size() != 2 * k) {
    throw ValidationError("kendall_point expects 2k interleaved coordinates");
  }
  Geometry g = Geometry::kendall_planar(k);
  auto z = as_complex(landmarks);
  ComplexVec centered = z;
  centered.array() -= z.sum() / static_cast<double>(k);
  double n = centered.norm();
  if (n < 1e-14) {
    throw ValidationError("degenerate configuration (all landmarks equal)");
  }
  centered /= n;
  return {g, from_complex(centered)};
}

}  // namespace manistats
