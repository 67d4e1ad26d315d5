#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manistats/distribution.hpp"
#include "manistats/frechet.hpp"
#include "manistats/geometry.hpp"

namespace manistats {

// Per-sample-size estimates of the modulation m_n = n*V_n/V, where V_n is
// the expected squared distance of the empirical Fréchet mean from the
// population mean and V the population variance.
struct ModulationCurve {
  std::vector<int> sample_sizes;
  std::vector<double> m_hat;
  std::vector<double> std_err;
  int replicates = 0;
  double population_variance = 0.0;
  std::uint64_t seed = 0;
};

struct ModulationOptions {
  std::vector<int> sample_sizes{10, 30, 100, 300, 1000, 3000, 10000};
  int replicates = 1000;
  std::uint64_t seed = 1;
  SolverConfig solver;
  int threads = 0;
  // When set, V_n is replaced by the second moment of the component of
  // log_mu(mean_hat) along this unit tangent direction at mu. The population
  // variance in the denominator is unchanged (the restricted law variance
  // can be zero), so only slopes are meaningful for restricted curves.
  std::optional<TangentVector> direction;
};

// Monte Carlo modulation curve: for each n, draws `replicates` independent
// samples of size n, solves for the empirical mean, and averages squared
// deviations from mu. Throws ZeroVarianceError when V = 0.
ModulationCurve modulation_curve(const Distribution& dist,
                                 const ManifoldPoint& mu,
                                 const ModulationOptions& options);

enum class Regime { Euclidean, FiniteSampleSmeary, Smeary, Inconclusive };

std::string regime_name(Regime r);

struct RegimeThresholds {
  double euclidean_band_se = 3.0;  // |m_hat - 1| <= band * std_err for all n
  double slope_min = 0.15;         // tail slope above this reads as smeary
  double fss_band_se = 5.0;        // sup m_hat must exceed 1 by this margin
};

struct RegimeVerdict {
  Regime regime = Regime::Inconclusive;
  double sup_m = 0.0;
  double slope = 0.0;
  std::string evidence;
};

// Requires >= 4 sample sizes spanning >= 2 decades (InsufficientDataError).
RegimeVerdict classify_regime(const ModulationCurve& curve,
                              const RegimeThresholds& thresholds = {});

struct RateEstimate {
  double slope = 0.0;   // least-squares slope of log m_hat vs log n (tail)
  double r_hat = 0.0;   // slope/(1-slope), the implied smeariness exponent
  bool conclusive = false;
};

RateEstimate estimate_rate(const ModulationCurve& curve);

// Point-mass contamination of a base law at its own mean: keeps the mean,
// scales the variance by (1-kappa), and forces the modulation plateau at
// 1/kappa^2 over a smeary base.
Distribution construct_kappa_mixture(const Distribution& base,
                                     const ManifoldPoint& mu, double kappa);

// Root of t*sqrt(K)*cot(t*sqrt(K)) = -(1-eps)/(2*eps) in (pi/2, pi)/sqrt(K),
// by bisection to residual below 1e-12.
double solve_t(double K, double epsilon);

// Root in t of the finite-difference Hessian entry orthogonal to the atom
// direction, bracketed in (pi/(2 sqrt K), pi/sqrt K). This is the t at which
// the constructed law is genuinely degenerate, independent of the Hessian
// normalization convention; solve_t provides the bracket sanity check.
double solve_t_empirical(double K, double epsilon, double fd_step = 1e-3);

// Three-atom law on a sphere: mass 1-eps at mu and eps/2 at exp(+-t*v_dir),
// with t = solve_t_empirical. The Fréchet function Hessian at mu vanishes in
// every direction orthogonal to v_dir.
Distribution construct_directional_smeary(const ManifoldPoint& mu,
                                          const TangentVector& v_dir,
                                          double epsilon);

// Symmetric matrix of second central differences of F(exp_p(x)) in the
// orthonormal basis at p; discretization error O(h^2).
Eigen::MatrixXd hessian_fd(const Distribution& dist, const ManifoldPoint& p,
                           double h);

// Second central difference of F along a single unit tangent direction
// (ambient representation). Cheaper than the full matrix.
double directional_hessian_fd(const Distribution& dist, const ManifoldPoint& p,
                              const Eigen::VectorXd& dir_ambient, double h);

// (1-eps) + 2*eps*(t*sqrt(K))*cot(t*sqrt(K)), verbatim.
double hessian_closed_form(double K, double epsilon, double t);

// Local expansion data: F(exp_mu x) = sum_j T_j |(R x)_j|^{r+2} + o(...).
// Zero T entries are only legal on coordinates flagged directional.
struct SmearinessProfile {
  double r = 0.0;
  Eigen::MatrixXd rotation;  // orthogonal, dim x dim
  Eigen::VectorXd T;         // positive unless flagged
  std::vector<bool> directional;

  static SmearinessProfile make(double r, Eigen::MatrixXd rotation,
                                Eigen::VectorXd T,
                                std::vector<bool> directional = {});
};

// (4/(r+2)^2) * T^{-1} * cov_log * T^{-1} with T = diag(T_1..T_dim).
// Throws ValidationError when T is singular (directional zeros).
Eigen::MatrixXd gclt_covariance(const SmearinessProfile& profile,
                                const Eigen::MatrixXd& cov_log);

// Discrete circle law with an exactly vanishing second derivative of the
// Fréchet function at mean_angle and quartic growth there (smeariness of
// order r = 2): a midpoint discretization, with n_atoms atoms, of the
// density (1 + a*cos(theta) + a*cos(2*theta))/(2*pi) relative to the mean.
// Requires 0 < a <= 8/9 for nonnegativity; mean uniqueness holds for all
// such a. Population variance is pi^2/3 - 3a/2 up to O(1/n_atoms^2).
Distribution two_smeary_circle_base(double mean_angle = 0.0,
                                    double amplitude = 8.0 / 9.0,
                                    int n_atoms = 1000);

}  // namespace manistats
