#pragma once

#include <span>

namespace genv2v::content {

/// Size of the captured road image the skeleton replaces (~6.7 MB). Used for
/// reporting the compression ratio only; it is never transmitted.
inline constexpr double kOriginalImageBits = 6.7e6 * 8.0;

/// Parametric stand-in for receiver-side diffusion generation.
struct ContentParams {
  double similarity_floor = 0.50;
  double similarity_ceiling = 0.95;
  double similarity_timescale = 8.0;  // steps
  double per_step_gen_time_s = 1e-3;
  double skeleton_bits = 4.0e6;  // ~0.5 MB skeleton
  double prompt_bits = 1024.0;

  void validate() const;
  double payload_bits() const { return skeleton_bits + prompt_bits; }
};

struct ContentProfile {
  int diffusion_steps = 0;
  double similarity = 0.0;
  double generation_time_s = 0.0;
  double payload_bits = 0.0;
};

/// Saturating similarity: floor + (ceiling - floor) * (1 - exp(-d / tau)).
double similarity(int diffusion_steps, const ContentParams& params);

double generation_time(int diffusion_steps, const ContentParams& params);

/// Throws std::out_of_range when `diffusion_steps` is not one of `levels`.
ContentProfile build_profile(int diffusion_steps, const ContentParams& params,
                             std::span<const int> levels);

/// Returns a copy whose skeleton is resized so the transmitted payload equals
/// `payload_bits`. The prompt stays as configured.
ContentParams with_payload(ContentParams params, double payload_bits);

inline double compression_ratio(const ContentParams& params) {
  return kOriginalImageBits / params.skeleton_bits;
}

}  // namespace genv2v::content
