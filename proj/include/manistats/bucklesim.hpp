#pragma once

#include <cstdint>
#include <vector>

#include "manistats/geometry.hpp"

namespace manistats {

enum class VimentinMode { WithVimentin, WithoutVimentin };

// Sine-arch model of a planar microtubule buckle: 5 landmarks at quarter
// points of the span, heights A*sin(pi*x/L), with per-coordinate Gaussian
// landmark noise. Vimentin stiffening enters as a smaller buckle amplitude.
struct BuckleParams {
  double amplitude_mean = 0.3;
  double amplitude_sd = 0.1;
  double length = 1.0;
  double landmark_noise_sd = 0.02;
  VimentinMode mode = VimentinMode::WithoutVimentin;
  static constexpr int n_landmarks = 5;
};

void validate_params(const BuckleParams& params);

// One configuration mapped to its Kendall pre-shape; pure function of
// (params, seed, index).
ManifoldPoint sample_buckle(const BuckleParams& params, std::uint64_t seed,
                            std::uint64_t index);

std::vector<ManifoldPoint> sample_group(const BuckleParams& params, int n,
                                        std::uint64_t seed);

}  // namespace manistats
