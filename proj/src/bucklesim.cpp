#include "manistats/bucklesim.hpp"

#include <cmath>
#include <numbers>

#include "manistats/rng.hpp"

namespace manistats {

void validate_params(const BuckleParams& params) {
  if (!(params.amplitude_mean > 0.0)) {
    throw ValidationError("buckle amplitude mean must be positive");
  }
  if (params.amplitude_sd < 0.0) {
    throw ValidationError("buckle amplitude sd must be >= 0");
  }
  if (!(params.length > 0.0)) {
    throw ValidationError("buckle length must be positive");
  }
  if (params.landmark_noise_sd < 0.0) {
    throw ValidationError("landmark noise sd must be >= 0");
  }
}

ManifoldPoint sample_buckle(const BuckleParams& params, std::uint64_t seed,
                            std::uint64_t index) {
  validate_params(params);
  Rng rng = Rng::stream(seed, {0xb0c41eull, index});
  double amplitude = 0.0;
  int attempts = 0;
  do {
    amplitude = params.amplitude_mean + params.amplitude_sd * rng.normal();
    if (++attempts > 10000) {
      throw ValidationError("truncated amplitude draw failed to land positive");
    }
  } while (amplitude <= 0.0);

  const int k = BuckleParams::n_landmarks;
  Eigen::VectorXd landmarks(2 * k);
  for (int i = 0; i < k; ++i) {
    double x = params.length * static_cast<double>(i) / (k - 1);
    double y = amplitude * std::sin(std::numbers::pi * x / params.length);
    landmarks[2 * i] = x + params.landmark_noise_sd * rng.normal();
    landmarks[2 * i + 1] = y + params.landmark_noise_sd * rng.normal();
  }
  return kendall_point(k, landmarks);
}

std::vector<ManifoldPoint> sample_group(const BuckleParams& params, int n,
                                        std::uint64_t seed) {
  if (n < 0) throw ValidationError("group size must be >= 0");
  std::vector<ManifoldPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(sample_buckle(params, seed, static_cast<std::uint64_t>(i)));
  }
  return out;
}

}  // namespace manistats
