#include "manistats/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "manistats/inference.hpp"
#include "manistats/report.hpp"
#include "manistats/rng.hpp"
#include "manistats/smeary.hpp"

namespace manistats {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kExperimentNames[6] = {"modulation",       "construct-kappa",
                                         "construct-directional", "hessian",
                                         "two-sample",       "power-table"};

namespace {

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw ValidationError(where + " must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double get_number(const json& j, const std::string& key, double fallback,
                  bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ValidationError("missing required key '" + key + "'");
    return fallback;
  }
  if (!j[key].is_number()) {
    throw ValidationError("key '" + key + "' must be a number");
  }
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int fallback,
            bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ValidationError("missing required key '" + key + "'");
    return fallback;
  }
  if (!j[key].is_number_integer()) {
    throw ValidationError("key '" + key + "' must be an integer");
  }
  return j[key].get<int>();
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(where + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

Geometry parse_geometry(const json& j) {
  check_keys(j, "geometry", {"kind", "m", "curvature", "landmarks"});
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ValidationError("geometry needs a string 'kind'");
  }
  std::string kind = j["kind"].get<std::string>();
  if (kind == "euclidean") return Geometry::euclidean(get_int(j, "m", 0, true));
  if (kind == "circle") return Geometry::circle();
  if (kind == "sphere") {
    return Geometry::sphere(get_int(j, "m", 0, true),
                            get_number(j, "curvature", 0.0, true));
  }
  if (kind == "flat_torus") return Geometry::flat_torus(get_int(j, "m", 0, true));
  if (kind == "kendall_planar") {
    return Geometry::kendall_planar(get_int(j, "landmarks", 0, true));
  }
  throw ValidationError("unknown geometry kind '" + kind + "'");
}

SolverConfig parse_solver(const json& j, std::uint64_t seed) {
  SolverConfig c;
  c.seed = seed;
  if (j.is_null()) return c;
  check_keys(j, "solver",
             {"max_iter", "grad_tol", "tie_tol", "n_random_starts", "seed"});
  c.max_iter = get_int(j, "max_iter", c.max_iter);
  c.grad_tol = get_number(j, "grad_tol", c.grad_tol);
  c.tie_tol = get_number(j, "tie_tol", c.tie_tol);
  c.n_random_starts = get_int(j, "n_random_starts", c.n_random_starts);
  if (j.contains("seed")) {
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (c.max_iter < 1 || !(c.grad_tol > 0.0) || c.tie_tol < 0.0 ||
      c.n_random_starts < 0) {
    throw ValidationError("solver settings out of range");
  }
  return c;
}

ManifoldPoint parse_point(const Geometry& g, const json& coords) {
  Eigen::VectorXd v = parse_vector(coords, "point coordinates");
  switch (g.kind) {
    case Geometry::Kind::Circle:
      if (v.size() != 1) throw ValidationError("circle point needs one angle");
      return circle_point(v[0]);
    case Geometry::Kind::FlatTorus:
      if (v.size() != g.size) {
        throw ValidationError("torus point needs m angles");
      }
      return torus_point(v);
    case Geometry::Kind::Euclidean:
      if (v.size() != g.size) {
        throw ValidationError("euclidean point has wrong dimension");
      }
      return euclidean_point(v);
    case Geometry::Kind::Sphere: {
      if (v.size() != g.ambient_size()) {
        throw ValidationError("sphere point needs m+1 ambient coordinates");
      }
      double want = 1.0 / std::sqrt(g.curvature);
      if (std::abs(v.norm() - want) > 1e-6 * (1.0 + want)) {
        throw ValidationError("sphere point is off the embedding radius");
      }
      return sphere_point(g, v);
    }
    case Geometry::Kind::KendallPlanar:
      if (v.size() != g.ambient_size()) {
        throw ValidationError("shape point needs 2k interleaved coordinates");
      }
      return kendall_point(g.size, v);
  }
  throw ValidationError("unhandled geometry");
}

Distribution parse_distribution(const Geometry& g, const json& j,
                                const SolverConfig& solver) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ValidationError("distribution needs a string 'type'");
  }
  std::string type = j["type"].get<std::string>();
  if (type == "point_mass") {
    check_keys(j, "point_mass", {"type", "coords"});
    if (!j.contains("coords")) throw ValidationError("point_mass needs coords");
    return Distribution::point_mass(parse_point(g, j["coords"]));
  }
  if (type == "discrete") {
    check_keys(j, "discrete", {"type", "atoms"});
    if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty()) {
      throw ValidationError("discrete law needs an atoms array");
    }
    std::vector<double> weights;
    std::vector<ManifoldPoint> points;
    for (const auto& a : j["atoms"]) {
      check_keys(a, "atom", {"weight", "coords"});
      weights.push_back(get_number(a, "weight", 0.0, true));
      if (!a.contains("coords")) throw ValidationError("atom needs coords");
      points.push_back(parse_point(g, a["coords"]));
    }
    return Distribution::discrete(std::move(weights), std::move(points));
  }
  if (type == "von_mises") {
    check_keys(j, "von_mises", {"type", "mean_angle", "concentration"});
    if (g.kind != Geometry::Kind::Circle) {
      throw ValidationError("von Mises law lives on the circle");
    }
    return Distribution::von_mises(get_number(j, "mean_angle", 0.0, true),
                                   get_number(j, "concentration", 0.0, true));
  }
  if (type == "mixture") {
    check_keys(j, "mixture", {"type", "components"});
    if (!j.contains("components") || !j["components"].is_array()) {
      throw ValidationError("mixture needs a components array");
    }
    std::vector<double> weights;
    std::vector<Distribution> comps;
    for (const auto& c : j["components"]) {
      check_keys(c, "mixture component", {"weight", "distribution"});
      weights.push_back(get_number(c, "weight", 0.0, true));
      if (!c.contains("distribution")) {
        throw ValidationError("mixture component needs a distribution");
      }
      comps.push_back(parse_distribution(g, c["distribution"], solver));
    }
    return Distribution::mixture(std::move(weights), std::move(comps));
  }
  if (type == "two_smeary_circle") {
    check_keys(j, "two_smeary_circle",
               {"type", "mean_angle", "amplitude", "n_atoms"});
    if (g.kind != Geometry::Kind::Circle) {
      throw ValidationError("two_smeary_circle lives on the circle");
    }
    return two_smeary_circle_base(get_number(j, "mean_angle", 0.0),
                                  get_number(j, "amplitude", 8.0 / 9.0),
                                  get_int(j, "n_atoms", 1000));
  }
  if (type == "kappa_mixture") {
    check_keys(j, "kappa_mixture", {"type", "kappa", "base"});
    if (!j.contains("base")) throw ValidationError("kappa_mixture needs a base");
    double kappa = get_number(j, "kappa", 0.0, true);
    Distribution base = parse_distribution(g, j["base"], solver);
    ManifoldPoint mu = population_mean(base, solver).mean;
    return construct_kappa_mixture(base, mu, kappa);
  }
  if (type == "directional_smeary") {
    check_keys(j, "directional_smeary", {"type", "epsilon", "direction_index"});
    if (g.kind != Geometry::Kind::Sphere) {
      throw ValidationError("directional_smeary lives on a sphere");
    }
    double epsilon = get_number(j, "epsilon", 0.0, true);
    int dir_index = get_int(j, "direction_index", 0);
    if (dir_index < 0 || dir_index >= g.dim()) {
      throw ValidationError("direction_index out of range");
    }
    Eigen::VectorXd north = Eigen::VectorXd::Zero(g.ambient_size());
    north[g.ambient_size() - 1] = 1.0 / std::sqrt(g.curvature);
    ManifoldPoint mu{g, north};
    Eigen::VectorXd comps = Eigen::VectorXd::Zero(g.dim());
    comps[dir_index] = 1.0;
    return construct_directional_smeary(mu, TangentVector{mu, comps}, epsilon);
  }
  throw ValidationError("unknown distribution type '" + type + "'");
}

BuckleParams parse_buckle_params(const json& j) {
  check_keys(j, "buckle params",
             {"amplitude_mean", "amplitude_sd", "length", "landmark_noise_sd",
              "mode"});
  BuckleParams p;
  p.amplitude_mean = get_number(j, "amplitude_mean", 0.0, true);
  p.amplitude_sd = get_number(j, "amplitude_sd", 0.0, true);
  p.length = get_number(j, "length", 1.0);
  p.landmark_noise_sd = get_number(j, "landmark_noise_sd", 0.0, true);
  if (!j.contains("mode") || !j["mode"].is_string()) {
    throw ValidationError("buckle params need a mode");
  }
  std::string mode = j["mode"].get<std::string>();
  if (mode == "with_vimentin") {
    p.mode = VimentinMode::WithVimentin;
  } else if (mode == "without_vimentin") {
    p.mode = VimentinMode::WithoutVimentin;
  } else {
    throw ValidationError("mode must be with_vimentin or without_vimentin");
  }
  validate_params(p);
  return p;
}

namespace {

struct PendingOutputs {
  std::vector<std::pair<std::string, std::string>> files;  // path -> content
  void add(const fs::path& dir, const std::string& name,
           const std::string& content) {
    files.emplace_back((dir / name).string(), content);
  }
};

struct CommonConfig {
  json raw;
  std::string experiment;
  std::uint64_t seed = 0;
  fs::path out_dir;
  int threads = 1;
  SolverConfig solver;
};

CommonConfig load_common(const std::string& subcommand,
                         const std::string& config_path,
                         const RunOverrides& overrides) {
  CommonConfig c;
  std::string text = read_file(config_path);
  try {
    c.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.raw.is_object()) throw ValidationError("config must be a JSON object");
  if (!c.raw.contains("experiment") || !c.raw["experiment"].is_string()) {
    throw ValidationError("config needs an 'experiment' string");
  }
  c.experiment = c.raw["experiment"].get<std::string>();
  bool known = false;
  for (const char* name : kExperimentNames) {
    if (c.experiment == name) known = true;
  }
  if (!known) throw ValidationError("unknown experiment '" + c.experiment + "'");
  if (!subcommand.empty() && subcommand != c.experiment) {
    throw ValidationError("subcommand '" + subcommand +
                          "' does not match config experiment '" +
                          c.experiment + "'");
  }
  if (overrides.seed) {
    c.seed = *overrides.seed;
  } else if (c.raw.contains("seed") && c.raw["seed"].is_number_unsigned()) {
    c.seed = c.raw["seed"].get<std::uint64_t>();
  } else if (c.raw.contains("seed") && c.raw["seed"].is_number_integer() &&
             c.raw["seed"].get<long long>() >= 0) {
    c.seed = static_cast<std::uint64_t>(c.raw["seed"].get<long long>());
  } else {
    throw ValidationError(
        "a nonnegative integer 'seed' is required (config key or --seed)");
  }
  if (overrides.out_dir) {
    c.out_dir = *overrides.out_dir;
  } else if (c.raw.contains("out") && c.raw["out"].is_string()) {
    c.out_dir = c.raw["out"].get<std::string>();
  } else {
    throw ValidationError("an output directory is required ('out' or --out)");
  }
  if (overrides.threads) {
    c.threads = *overrides.threads;
  } else {
    c.threads = get_int(c.raw, "threads", 1);
  }
  if (c.threads < 0) throw ValidationError("threads must be >= 0");
  c.solver = parse_solver(c.raw.contains("solver") ? c.raw["solver"] : json(),
                          c.seed);
  return c;
}

std::vector<int> parse_sizes(const json& mc) {
  if (!mc.contains("sample_sizes")) {
    return {10, 30, 100, 300, 1000, 3000, 10000};
  }
  if (!mc["sample_sizes"].is_array() || mc["sample_sizes"].empty()) {
    throw ValidationError("sample_sizes must be a nonempty array");
  }
  std::vector<int> out;
  int prev = 0;
  for (const auto& v : mc["sample_sizes"]) {
    if (!v.is_number_integer()) {
      throw ValidationError("sample_sizes must hold integers");
    }
    int n = v.get<int>();
    if (n <= prev) {
      throw ValidationError("sample_sizes must be strictly increasing");
    }
    out.push_back(n);
    prev = n;
  }
  return out;
}

void run_modulation(const CommonConfig& c, PendingOutputs& out,
                    std::ostream& log) {
  check_keys(c.raw, "modulation config",
             {"experiment", "seed", "out", "threads", "solver", "geometry",
              "distribution", "monte_carlo", "mu", "direction_components"});
  if (!c.raw.contains("geometry") || !c.raw.contains("distribution")) {
    throw ValidationError("modulation needs geometry and distribution");
  }
  Geometry g = parse_geometry(c.raw["geometry"]);
  Distribution law = parse_distribution(g, c.raw["distribution"], c.solver);

  ManifoldPoint mu =
      c.raw.contains("mu")
          ? parse_point(g, c.raw["mu"])
          : population_mean(law, c.solver).mean;

  ModulationOptions opts;
  json mc = c.raw.contains("monte_carlo") ? c.raw["monte_carlo"] : json::object();
  check_keys(mc, "monte_carlo", {"sample_sizes", "replicates"});
  opts.sample_sizes = parse_sizes(mc);
  opts.replicates = get_int(mc, "replicates", 1000);
  opts.seed = c.seed;
  opts.solver = c.solver;
  opts.threads = c.threads;
  if (c.raw.contains("direction_components")) {
    Eigen::VectorXd comps =
        parse_vector(c.raw["direction_components"], "direction_components");
    if (comps.size() != g.dim()) {
      throw ValidationError("direction_components must have dim entries");
    }
    opts.direction = TangentVector{mu, comps};
  }

  log << "modulation: " << law.geometry().describe() << ", "
      << opts.sample_sizes.size() << " sizes, B=" << opts.replicates << "\n";
  ModulationCurve curve = modulation_curve(law, mu, opts);
  RegimeVerdict verdict = classify_regime(curve);
  RateEstimate rate = estimate_rate(curve);

  TextReport rep;
  rep.scalar("regime", regime_name(verdict.regime));
  rep.scalar("sup_m", verdict.sup_m);
  rep.scalar("tail_slope", verdict.slope);
  rep.scalar("r_hat", rate.r_hat);
  rep.boolean("rate_conclusive", rate.conclusive);
  rep.scalar("evidence", verdict.evidence);
  rep.section("curve");
  std::vector<double> ns(curve.sample_sizes.begin(), curve.sample_sizes.end());
  rep.list("n", ns);
  rep.list("m_hat", curve.m_hat);
  rep.list("std_err", curve.std_err);
  rep.end_section();

  out.add(c.out_dir, "curve.csv", modulation_curve_csv(curve));
  out.add(c.out_dir, "verdict.txt", rep.str());
}

void run_construct_kappa(const CommonConfig& c, PendingOutputs& out,
                         std::ostream& log) {
  check_keys(c.raw, "construct-kappa config",
             {"experiment", "seed", "out", "threads", "solver", "geometry",
              "base", "kappa"});
  if (!c.raw.contains("geometry") || !c.raw.contains("base")) {
    throw ValidationError("construct-kappa needs geometry and base");
  }
  Geometry g = parse_geometry(c.raw["geometry"]);
  double kappa = get_number(c.raw, "kappa", 0.0, true);
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw ValidationError("kappa must lie in (0, 1)");
  }
  Distribution base = parse_distribution(g, c.raw["base"], c.solver);
  FrechetResult base_mean = population_mean(base, c.solver);
  Distribution mixed = construct_kappa_mixture(base, base_mean.mean, kappa);
  FrechetResult mixed_mean = population_mean(mixed, c.solver);
  double v_base = variance(base, base_mean.mean);
  double v_mixed = variance(mixed, mixed_mean.mean);

  log << "construct-kappa: kappa=" << kappa << "\n";
  TextReport rep;
  rep.scalar("kappa", kappa);
  rep.scalar("expected_modulation_plateau", 1.0 / (kappa * kappa));
  rep.scalar("base_variance", v_base);
  rep.scalar("mixture_variance", v_mixed);
  rep.scalar("variance_ratio", v_mixed / v_base);
  rep.scalar("expected_variance_ratio", 1.0 - kappa);
  rep.scalar("mean_shift", dist(base_mean.mean, mixed_mean.mean));
  rep.list("mean_coords",
           std::vector<double>(base_mean.mean.coords.data(),
                               base_mean.mean.coords.data() +
                                   base_mean.mean.coords.size()));
  out.add(c.out_dir, "report.txt", rep.str());
}

void run_construct_directional(const CommonConfig& c, PendingOutputs& out,
                               std::ostream& log) {
  check_keys(c.raw, "construct-directional config",
             {"experiment", "seed", "out", "threads", "solver", "curvature",
              "epsilon", "fd_step"});
  double K = get_number(c.raw, "curvature", 0.0, true);
  double epsilon = get_number(c.raw, "epsilon", 0.0, true);
  double h = get_number(c.raw, "fd_step", 1e-3);
  if (!(K > 0.0)) throw ValidationError("curvature must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (!(h > 0.0)) throw ValidationError("fd_step must be positive");

  double t_closed = solve_t(K, epsilon);
  double t_emp = solve_t_empirical(K, epsilon, h);

  Geometry g = Geometry::sphere(2, K);
  Eigen::VectorXd north(3);
  north << 0.0, 0.0, 1.0 / std::sqrt(K);
  ManifoldPoint mu{g, north};
  Eigen::VectorXd v_comps = Eigen::VectorXd::Zero(2);
  v_comps[0] = 1.0;
  Distribution law =
      construct_directional_smeary(mu, TangentVector{mu, v_comps}, epsilon);
  Eigen::MatrixXd H = hessian_fd(law, mu, h / std::sqrt(K));

  Eigen::MatrixXd B = tangent_basis_matrix(mu);
  Eigen::VectorXd v_amb = B.col(0);
  Eigen::VectorXd w_amb = B.col(1);
  auto law_at = [&](double t) {
    ManifoldPoint plus = exp_ambient(mu, t * v_amb);
    ManifoldPoint minus = exp_ambient(mu, -t * v_amb);
    return Distribution::discrete(
        {1.0 - epsilon, epsilon / 2.0, epsilon / 2.0}, {mu, plus, minus});
  };
  double hess_fd_ww_closed =
      directional_hessian_fd(law_at(t_closed), mu, w_amb, h / std::sqrt(K));

  log << "construct-directional: K=" << K << " eps=" << epsilon << "\n";
  TextReport rep;
  rep.scalar("curvature", K);
  rep.scalar("epsilon", epsilon);
  rep.scalar("fd_step", h);
  rep.section("root_conditions");
  rep.scalar("t_closed_form", t_closed);
  rep.scalar("t_empirical", t_emp);
  rep.end_section();
  rep.section("hessian_values");
  rep.scalar("closed_form_at_t_closed",
             hessian_closed_form(K, epsilon, t_closed));
  rep.scalar("closed_form_at_t_empirical",
             hessian_closed_form(K, epsilon, t_emp));
  rep.scalar("fd_ww_at_t_empirical", H(1, 1));
  rep.scalar("fd_ww_at_t_closed", hess_fd_ww_closed);
  rep.scalar("fd_vv_at_t_empirical", H(0, 0));
  rep.end_section();
  rep.section("atoms");
  auto atoms = law.atoms();
  for (const auto& a : atoms) {
    rep.list("atom_w_" + format_double(a.weight),
             std::vector<double>(a.point.coords.data(),
                                 a.point.coords.data() + a.point.coords.size()));
  }
  rep.end_section();
  out.add(c.out_dir, "report.txt", rep.str());
}

void run_hessian(const CommonConfig& c, PendingOutputs& out,
                 std::ostream& log) {
  check_keys(c.raw, "hessian config",
             {"experiment", "seed", "out", "threads", "solver", "geometry",
              "distribution", "point", "fd_step"});
  if (!c.raw.contains("geometry") || !c.raw.contains("distribution")) {
    throw ValidationError("hessian needs geometry and distribution");
  }
  Geometry g = parse_geometry(c.raw["geometry"]);
  Distribution law = parse_distribution(g, c.raw["distribution"], c.solver);
  double h = get_number(c.raw, "fd_step", 1e-4);
  if (!(h > 0.0)) throw ValidationError("fd_step must be positive");
  ManifoldPoint p = c.raw.contains("point")
                        ? parse_point(g, c.raw["point"])
                        : population_mean(law, c.solver).mean;
  log << "hessian: dim=" << g.dim() << " h=" << h << "\n";
  Eigen::MatrixXd H = hessian_fd(law, p, h);
  out.add(c.out_dir, "hessian.csv", matrix_csv(H));
}

void run_two_sample(const CommonConfig& c, PendingOutputs& out,
                    std::ostream& log) {
  check_keys(c.raw, "two-sample config",
             {"experiment", "seed", "out", "threads", "solver", "group1",
              "group2", "alpha", "bootstrap_reps"});
  double alpha = get_number(c.raw, "alpha", 0.05);
  int reps = get_int(c.raw, "bootstrap_reps", 1000);
  auto parse_group = [&](const std::string& key, std::uint64_t tag) {
    if (!c.raw.contains(key)) {
      throw ValidationError("two-sample needs " + key);
    }
    const json& gj = c.raw[key];
    check_keys(gj, key, {"buckle", "n"});
    if (!gj.contains("buckle")) {
      throw ValidationError(key + " needs a buckle generator spec");
    }
    BuckleParams params = parse_buckle_params(gj["buckle"]);
    int n = get_int(gj, "n", 20);
    if (n < 1) throw ValidationError("group size must be >= 1");
    return sample_group(params, n, derive_seed(c.seed, {tag}));
  };
  std::vector<ManifoldPoint> g1 = parse_group("group1", 1);
  std::vector<ManifoldPoint> g2 = parse_group("group2", 2);
  log << "two-sample: n1=" << g1.size() << " n2=" << g2.size() << "\n";

  std::vector<TestResult> results;
  results.push_back(quantile_test(g1, g2, alpha, c.solver));
  results.push_back(
      bootstrap_test(g1, g2, alpha, reps, derive_seed(c.seed, {3}), c.solver));

  out.add(c.out_dir, "tests.csv", test_results_csv(results));
  out.add(c.out_dir, "group1.csv", points_csv(g1));
  out.add(c.out_dir, "group2.csv", points_csv(g2));
}

void run_power_table(const CommonConfig& c, PendingOutputs& out,
                     std::ostream& log) {
  check_keys(c.raw, "power-table config",
             {"experiment", "seed", "out", "threads", "solver",
              "with_vimentin", "without_vimentin", "n_per_group", "alpha",
              "n_simulations", "bootstrap_reps"});
  if (!c.raw.contains("with_vimentin") || !c.raw.contains("without_vimentin")) {
    throw ValidationError(
        "power-table needs with_vimentin and without_vimentin buckle params");
  }
  BuckleParams with_v = parse_buckle_params(c.raw["with_vimentin"]);
  BuckleParams without_v = parse_buckle_params(c.raw["without_vimentin"]);
  if (!(with_v.amplitude_mean < without_v.amplitude_mean)) {
    throw ValidationError(
        "with_vimentin amplitude must be below without_vimentin (stiffness)");
  }
  int n = get_int(c.raw, "n_per_group", 20);
  if (n < 2) throw ValidationError("n_per_group must be >= 2");

  PowerStudyOptions opts;
  opts.alpha = get_number(c.raw, "alpha", 0.05);
  opts.n_simulations = get_int(c.raw, "n_simulations", 100);
  opts.bootstrap_reps = get_int(c.raw, "bootstrap_reps", 1000);
  opts.solver = c.solver;
  opts.threads = c.threads;

  auto generator = [&](const BuckleParams& params, std::uint64_t tag) {
    return GroupGenerator([params, tag, seed = c.seed, n](std::uint64_t sim) {
      return sample_group(params, n, derive_seed(seed, {tag, sim}));
    });
  };
  GroupGenerator null_a = generator(with_v, 0xa1);
  GroupGenerator null_b = generator(with_v, 0xa2);
  GroupGenerator alt_a = generator(with_v, 0xa3);
  GroupGenerator alt_b = generator(without_v, 0xa4);

  std::vector<PowerReport> reports;
  for (TestMethod method : {TestMethod::Quantile, TestMethod::Bootstrap}) {
    PowerStudyOptions o = opts;
    o.scenario = "both_with_vimentin";
    o.seed = derive_seed(c.seed, {0x9u, method == TestMethod::Quantile ? 0u : 1u});
    log << "power-table: " << o.scenario << " / " << method_name(method)
        << "\n";
    reports.push_back(power_study(null_a, null_b, method, o));
    o.scenario = "with_vs_without_vimentin";
    o.seed = derive_seed(c.seed, {0xau, method == TestMethod::Quantile ? 0u : 1u});
    log << "power-table: " << o.scenario << " / " << method_name(method)
        << "\n";
    reports.push_back(power_study(alt_a, alt_b, method, o));
  }

  out.add(c.out_dir, "power.csv", power_reports_csv(reports));
  out.add(c.out_dir, "table.txt", render_power_table(reports));
}

}  // namespace

int exit_code_for(const Error& e) {
  const std::string& cat = e.category();
  if (cat == "validation" || cat == "geometry_mismatch") return 2;
  if (cat == "io") return 4;
  return 3;  // numerical failures
}

RunResult run_experiment(const std::string& subcommand,
                         const std::string& config_path,
                         const RunOverrides& overrides, std::ostream& log) {
  auto t0 = std::chrono::steady_clock::now();
  CommonConfig c = load_common(subcommand, config_path, overrides);
  PendingOutputs out;

  if (c.experiment == "modulation") {
    run_modulation(c, out, log);
  } else if (c.experiment == "construct-kappa") {
    run_construct_kappa(c, out, log);
  } else if (c.experiment == "construct-directional") {
    run_construct_directional(c, out, log);
  } else if (c.experiment == "hessian") {
    run_hessian(c, out, log);
  } else if (c.experiment == "two-sample") {
    run_two_sample(c, out, log);
  } else if (c.experiment == "power-table") {
    run_power_table(c, out, log);
  }

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  TextReport manifest;
  manifest.scalar("experiment", c.experiment);
  manifest.scalar("version", std::string(MANISTATS_VERSION));
  manifest.scalar("seed", static_cast<long long>(c.seed));
  manifest.scalar("threads", static_cast<long long>(c.threads));
  manifest.scalar("wall_time_s", wall);
  manifest.section("outputs");
  for (const auto& [path, content] : out.files) {
    manifest.scalar("file", path);
  }
  manifest.end_section();
  manifest.section("config");
  manifest.scalar("path", config_path);
  manifest.scalar("echo", c.raw.dump());
  manifest.end_section();

  RunResult result;
  for (const auto& [path, content] : out.files) {
    write_file_atomic(path, content);
    result.outputs.push_back(path);
  }
  std::string manifest_path = (c.out_dir / "manifest.txt").string();
  write_file_atomic(manifest_path, manifest.str());
  result.outputs.push_back(manifest_path);
  return result;
}

std::string print_table(const std::vector<std::string>& files) {
  std::vector<PowerReport> all;
  for (const auto& f : files) {
    std::vector<PowerReport> rows = parse_power_csv(read_file(f));
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return render_power_table(all);
}

}  // namespace manistats
