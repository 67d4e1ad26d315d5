#include "manistats/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "manistats/rng.hpp"

namespace manistats {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool coords_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

double weighted_value(const std::vector<WeightedPoint>& atoms,
                      const ManifoldPoint& p) {
  double s = 0.0;
  for (const auto& a : atoms) {
    double r = dist(a.point, p);
    s += a.weight * r * r;
  }
  return s;
}

// Merge bit-identical points; samples from discrete laws collapse to a few
// weighted atoms, which keeps Monte Carlo mean solves cheap.
std::vector<WeightedPoint> dedup_atoms(const std::vector<WeightedPoint>& in) {
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<WeightedPoint> out;
  for (const auto& a : in) {
    std::vector<double> key(a.point.coords.data(),
                            a.point.coords.data() + a.point.coords.size());
    auto [it, inserted] = seen.emplace(std::move(key), out.size());
    if (inserted) {
      out.push_back(a);
    } else {
      out[it->second].weight += a.weight;
    }
  }
  return out;
}

struct CircleSolution {
  double angle = 0.0;
  double value = 0.0;
  std::vector<FrechetResult::Candidate> ties;  // tie set, best first
};

// Exact circle mean by candidate enumeration: with atoms sorted and the k
// smallest lifted by 2*pi, the k-th candidate is the lifted weighted average
// theta_bar + 2*pi*W_k. Lifted squared distances upper-bound the wrapped
// ones with equality at feasible candidates, so the enumeration argmin is a
// global minimizer of F_n. Evaluated in O(1) per candidate via prefix sums.
CircleSolution circle_mean_exact(std::vector<WeightedPoint> atoms,
                                 const SolverConfig& config, Rng& tie_rng) {
  std::sort(atoms.begin(), atoms.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) {
              return a.point.coords[0] < b.point.coords[0];
            });
  const std::size_t n = atoms.size();
  double wsum = 0.0;
  for (const auto& a : atoms) wsum += a.weight;

  double m1 = 0.0, m2 = 0.0;
  for (const auto& a : atoms) {
    double w = a.weight / wsum;
    double th = a.point.coords[0];
    m1 += w * th;
    m2 += w * th * th;
  }

  struct Cand {
    double angle;
    double value;
  };
  std::vector<Cand> cands(n);
  double wk = 0.0;      // cumulative normalized weight of lifted atoms
  double s_theta = 0.0; // cumulative weighted angle of lifted atoms
  for (std::size_t k = 0; k < n; ++k) {
    double mu = m1 + kTwoPi * wk;
    double value =
        m2 - 2.0 * mu * m1 + mu * mu + 4.0 * kPi * (s_theta + kPi * wk - mu * wk);
    cands[k] = {wrap_angle(mu), value};
    double w = atoms[k].weight / wsum;
    wk += w;
    s_theta += w * atoms[k].point.coords[0];
  }

  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.angle < b.angle;
  });

  CircleSolution sol;
  std::size_t tie_count = 1;
  while (tie_count < cands.size() &&
         cands[tie_count].value <= cands[0].value + config.tie_tol) {
    ++tie_count;
  }
  std::size_t pick =
      tie_count > 1 ? static_cast<std::size_t>(tie_rng.uniform_below(tie_count))
                    : 0;
  sol.angle = cands[pick].angle;
  sol.value = cands[pick].value;
  for (std::size_t i = 0; i < tie_count; ++i) {
    sol.ties.push_back({circle_point(cands[i].angle), cands[i].value});
  }
  return sol;
}

struct GdOutcome {
  ManifoldPoint point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

GdOutcome gradient_descent(const std::vector<WeightedPoint>& atoms,
                           const ManifoldPoint& start,
                           const SolverConfig& config) {
  GdOutcome out{start, weighted_value(atoms, start), 0, false};
  ManifoldPoint p = start;
  for (int it = 0; it < config.max_iter; ++it) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(p.geom.ambient_size());
    for (const auto& a : atoms) {
      step += a.weight * log_ambient_any(p, a.point);
    }
    double gnorm = 2.0 * step.norm();  // gradient of F is -2 E[log_p X]
    out.iterations = it;
    if (gnorm < config.grad_tol) {
      out.converged = true;
      break;
    }
    // full Karcher step first, then halve until the value decreases
    double tau = 1.0;
    double f0 = out.value;
    bool accepted = false;
    for (int half = 0; half < 50; ++half) {
      ManifoldPoint trial = exp_ambient(p, tau * step);
      double f1 = weighted_value(atoms, trial);
      if (f1 < f0) {
        p = trial;
        out.value = f1;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // numerical floor reached; the gradient norm is the honest verdict
      out.converged = gnorm < 1e3 * config.grad_tol;
      break;
    }
  }
  out.point = p;
  return out;
}

// deterministic well-spread subset: medoid, then farthest-point traversal
std::vector<std::size_t> spread_starts(const std::vector<WeightedPoint>& atoms,
                                       std::size_t want) {
  const std::size_t n = atoms.size();
  std::vector<std::size_t> chosen;
  if (n == 0) return chosen;
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double r = dist(atoms[i].point, atoms[j].point);
      c += atoms[j].weight * r * r;
    }
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  chosen.push_back(best);
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  while (chosen.size() < want && chosen.size() < n) {
    for (std::size_t j = 0; j < n; ++j) {
      min_d[j] = std::min(min_d[j], dist(atoms[chosen.back()].point,
                                         atoms[j].point));
    }
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (min_d[j] > far_d) {
        far_d = min_d[j];
        far = j;
      }
    }
    if (far_d <= 0.0) break;
    chosen.push_back(far);
  }
  return chosen;
}

FrechetResult multistart_gd(const Geometry& geom,
                            const std::vector<WeightedPoint>& atoms,
                            const SolverConfig& config, Rng& rng) {
  std::vector<ManifoldPoint> starts;
  if (atoms.size() <= 32) {
    for (const auto& a : atoms) starts.push_back(a.point);
  } else {
    for (std::size_t i :
         spread_starts(atoms, static_cast<std::size_t>(config.max_spread_starts))) {
      starts.push_back(atoms[i].point);
    }
  }
  for (int i = 0; i < config.n_random_starts; ++i) {
    starts.push_back(random_point(geom, rng));
  }

  std::vector<GdOutcome> outcomes;
  outcomes.reserve(starts.size());
  for (const auto& s : starts) {
    outcomes.push_back(gradient_descent(atoms, s, config));
  }
  // dedupe coincident minima; sort deterministically before the tie draw
  std::vector<GdOutcome> unique;
  for (const auto& o : outcomes) {
    bool dup = false;
    for (auto& u : unique) {
      if (dist(u.point, o.point) < 1e-6) {
        if (o.value < u.value) u = o;
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(o);
  }
  std::sort(unique.begin(), unique.end(),
            [](const GdOutcome& a, const GdOutcome& b) {
              if (a.value != b.value) return a.value < b.value;
              return coords_less(a.point.coords, b.point.coords);
            });

  std::size_t tie_count = 1;
  while (tie_count < unique.size() &&
         unique[tie_count].value <= unique[0].value + config.tie_tol) {
    ++tie_count;
  }
  std::size_t pick =
      tie_count > 1 ? static_cast<std::size_t>(rng.uniform_below(tie_count)) : 0;

  FrechetResult res;
  res.mean = unique[pick].point;
  res.value = unique[pick].value;
  res.converged = unique[pick].converged;
  res.iterations = unique[pick].iterations;
  for (std::size_t i = 0; i < tie_count; ++i) {
    res.candidates.push_back({unique[i].point, unique[i].value});
  }
  return res;
}

}  // namespace

FrechetResult weighted_frechet_mean(const Geometry& geom,
                                    const std::vector<WeightedPoint>& atoms_in,
                                    const SolverConfig& config) {
  if (atoms_in.empty()) throw EmptySampleError("no atoms to average");
  for (const auto& a : atoms_in) {
    if (a.point.geom != geom) {
      throw GeometryMismatchError("atom off the requested geometry");
    }
  }
  std::vector<WeightedPoint> atoms = dedup_atoms(atoms_in);
  Rng rng = Rng::stream(config.seed, {0x6d65616eull});

  if (geom.kind == Geometry::Kind::Circle) {
    CircleSolution sol = circle_mean_exact(atoms, config, rng);
    FrechetResult res;
    res.mean = circle_point(sol.angle);
    res.value = sol.value;
    res.candidates = std::move(sol.ties);
    res.converged = true;
    res.iterations = static_cast<int>(atoms.size());
    return res;
  }

  if (geom.kind == Geometry::Kind::FlatTorus) {
    // the squared torus distance separates over components, so each angle is
    // an independent exact circle problem
    Eigen::VectorXd mean(geom.size);
    double value = 0.0;
    int iterations = 0;
    for (int c = 0; c < geom.size; ++c) {
      std::vector<WeightedPoint> comp;
      comp.reserve(atoms.size());
      for (const auto& a : atoms) {
        comp.push_back({a.weight, circle_point(a.point.coords[c])});
      }
      comp = dedup_atoms(comp);
      CircleSolution sol = circle_mean_exact(comp, config, rng);
      mean[c] = sol.angle;
      value += sol.value;
      iterations += static_cast<int>(comp.size());
    }
    FrechetResult res;
    res.mean = {geom, mean};
    res.value = value;
    res.candidates.push_back({res.mean, value});
    res.converged = true;
    res.iterations = iterations;
    return res;
  }

  return multistart_gd(geom, atoms, config, rng);
}

FrechetResult empirical_mean(const std::vector<ManifoldPoint>& sample,
                             const SolverConfig& config) {
  if (sample.empty()) throw EmptySampleError("empirical_mean of empty sample");
  const Geometry geom = sample.front().geom;
  const double w = 1.0 / static_cast<double>(sample.size());
  std::vector<WeightedPoint> atoms;
  atoms.reserve(sample.size());
  for (const auto& p : sample) atoms.push_back({w, p});
  return weighted_frechet_mean(geom, atoms, config);
}

namespace {

// population mean for laws with a von Mises component: gradient descent on
// the circle driven by the quadrature gradient, with grid and random starts
FrechetResult continuous_circle_mean(const Distribution& dist,
                                     const SolverConfig& config) {
  Rng rng = Rng::stream(config.seed, {0x706f70ull});
  std::vector<double> start_angles;
  // coarse scan keeps multistart honest on multimodal Fréchet functions
  const int scan = 64;
  double best_scan = std::numeric_limits<double>::infinity();
  double best_angle = 0.0;
  for (int i = 0; i < scan; ++i) {
    double a = kTwoPi * i / scan;
    double f = frechet_value(dist, circle_point(a));
    if (f < best_scan) {
      best_scan = f;
      best_angle = a;
    }
    if (i % 8 == 0) start_angles.push_back(a);
  }
  start_angles.push_back(best_angle);
  for (int i = 0; i < config.n_random_starts; ++i) {
    start_angles.push_back(rng.uniform(0.0, kTwoPi));
  }

  struct Out {
    double angle, value;
    int iterations;
    bool converged;
  };
  std::vector<Out> outs;
  for (double a0 : start_angles) {
    ManifoldPoint p = circle_point(a0);
    double f = frechet_value(dist, p);
    int it = 0;
    bool conv = false;
    for (; it < config.max_iter; ++it) {
      Eigen::VectorXd step = expected_log_ambient(dist, p);
      if (2.0 * step.norm() < config.grad_tol) {
        conv = true;
        break;
      }
      double tau = 1.0;
      bool accepted = false;
      for (int half = 0; half < 50; ++half) {
        ManifoldPoint trial = exp_ambient(p, tau * step);
        double f1 = frechet_value(dist, trial);
        if (f1 < f) {
          p = trial;
          f = f1;
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) {
        conv = 2.0 * step.norm() < 1e3 * config.grad_tol;
        break;
      }
    }
    outs.push_back({p.coords[0], f, it, conv});
  }
  std::sort(outs.begin(), outs.end(), [](const Out& a, const Out& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.angle < b.angle;
  });
  std::vector<Out> unique;
  for (const auto& o : outs) {
    bool dup = false;
    for (const auto& u : unique) {
      if (std::abs(circle_diff(u.angle, o.angle)) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(o);
  }
  std::size_t tie_count = 1;
  while (tie_count < unique.size() &&
         unique[tie_count].value <= unique[0].value + config.tie_tol) {
    ++tie_count;
  }
  std::size_t pick =
      tie_count > 1 ? static_cast<std::size_t>(rng.uniform_below(tie_count)) : 0;
  FrechetResult res;
  res.mean = circle_point(unique[pick].angle);
  res.value = unique[pick].value;
  res.converged = unique[pick].converged;
  res.iterations = unique[pick].iterations;
  for (std::size_t i = 0; i < tie_count; ++i) {
    res.candidates.push_back({circle_point(unique[i].angle), unique[i].value});
  }
  return res;
}

}  // namespace

FrechetResult population_mean(const Distribution& dist,
                              const SolverConfig& config) {
  if (dist.is_discrete()) {
    return weighted_frechet_mean(dist.geometry(), dist.atoms(), config);
  }
  return continuous_circle_mean(dist, config);
}

double variance(const Distribution& dist, const ManifoldPoint& mean) {
  return frechet_value(dist, mean);
}

TangentCoords tangent_coords(const ManifoldPoint& mean,
                             const std::vector<ManifoldPoint>& sample) {
  TangentCoords out;
  Eigen::MatrixXd B = tangent_basis_matrix(mean);
  const double cut = mean.geom.cut_distance();
  const double tol = std::isfinite(cut) ? 1e-9 * (1.0 + cut) : 0.0;
  for (const auto& x : sample) {
    if (in_cut_locus(mean, x, tol)) {
      ++out.dropped;
      continue;
    }
    out.coords.push_back(B.transpose() * log_ambient(mean, x));
  }
  return out;
}

}  // namespace manistats
