#include "genv2v/content.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace genv2v::content {

void ContentParams::validate() const {
  auto fail = [](const char* field, const char* what) {
    throw std::invalid_argument(std::string("content.") + field + ": " + what);
  };
  if (!(similarity_floor > 0 && similarity_floor < 1)) fail("similarity_floor", "must lie in (0, 1)");
  if (!(similarity_ceiling > 0 && similarity_ceiling <= 1)) fail("similarity_ceiling", "must lie in (0, 1]");
  if (!(similarity_floor < similarity_ceiling)) fail("similarity_ceiling", "must exceed similarity_floor");
  if (!(similarity_timescale > 0)) fail("similarity_timescale", "must be positive");
  if (per_step_gen_time_s < 0) fail("per_step_gen_time_s", "must be non-negative");
  if (prompt_bits < 0) fail("prompt_bits", "must be non-negative");
  if (!(skeleton_bits > prompt_bits)) fail("skeleton_bits", "must exceed prompt_bits");
}

double similarity(int diffusion_steps, const ContentParams& params) {
  if (diffusion_steps < 0) throw std::domain_error("similarity: negative diffusion steps");
  const double span = params.similarity_ceiling - params.similarity_floor;
  return params.similarity_floor - span * std::expm1(-diffusion_steps / params.similarity_timescale);
}

double generation_time(int diffusion_steps, const ContentParams& params) {
  if (diffusion_steps < 0) throw std::domain_error("generation_time: negative diffusion steps");
  return params.per_step_gen_time_s * diffusion_steps;
}

ContentProfile build_profile(int diffusion_steps, const ContentParams& params,
                             std::span<const int> levels) {
  if (std::find(levels.begin(), levels.end(), diffusion_steps) == levels.end()) {
    throw std::out_of_range("build_profile: " + std::to_string(diffusion_steps) +
                            " is not a configured diffusion level");
  }
  return ContentProfile{diffusion_steps, similarity(diffusion_steps, params),
                        generation_time(diffusion_steps, params), params.payload_bits()};
}

ContentParams with_payload(ContentParams params, double payload_bits) {
  params.skeleton_bits = payload_bits - params.prompt_bits;
  params.validate();
  return params;
}

}  // namespace genv2v::content
