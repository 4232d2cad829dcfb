#include "threshcal/reduction.hpp"

#include <stdexcept>

namespace threshcal {

const char* to_string(LossMode mode) {
  switch (mode) {
    case LossMode::kPlain: return "plain";
    case LossMode::kClassWeighted: return "class";
    case LossMode::kSampleWeighted: return "sample";
    case LossMode::kRaw: return "raw";
  }
  throw std::invalid_argument("unknown loss mode");
}

LossMode loss_mode_from_string(const std::string& name) {
  if (name == "plain") return LossMode::kPlain;
  if (name == "class") return LossMode::kClassWeighted;
  if (name == "sample") return LossMode::kSampleWeighted;
  if (name == "raw") return LossMode::kRaw;
  throw std::invalid_argument("unknown loss mode '" + name + "'");
}

Sample reduce_to_linear(const LabeledObservation& obs, const LossSpec& spec) {
  if (obs.y != 0 && obs.y != 1)
    throw std::invalid_argument("reduce_to_linear: label must be 0 or 1");
  if (!(obs.beta > 0) || !std::isfinite(obs.beta))
    throw std::invalid_argument("reduce_to_linear: weight must be positive");
  if (!(spec.alpha > 0) || !std::isfinite(spec.alpha))
    throw std::invalid_argument("reduce_to_linear: alpha must be positive");
  switch (spec.mode) {
    case LossMode::kPlain:
      return Sample(obs.x, 1.0 - 2.0 * obs.y);
    case LossMode::kClassWeighted:
      return Sample(obs.x, 1.0 - (spec.alpha + 1.0) * obs.y);
    case LossMode::kSampleWeighted:
      return Sample(obs.x, obs.beta - obs.beta * (spec.alpha + 1.0) * obs.y);
    case LossMode::kRaw:
      break;
  }
  throw std::invalid_argument("reduce_to_linear: raw mode carries z directly");
}

Real weighted_error_offset(std::span<const LabeledObservation> observations, const LossSpec& spec) {
  if (spec.mode == LossMode::kRaw)
    throw std::invalid_argument("weighted_error_offset: raw mode has no labels");
  const Real alpha = spec.mode == LossMode::kPlain ? 1.0 : spec.alpha;
  Real offset = 0;
  for (const auto& obs : observations) {
    if (obs.y != 0 && obs.y != 1)
      throw std::invalid_argument("weighted_error_offset: label must be 0 or 1");
    const Real beta = spec.mode == LossMode::kSampleWeighted ? obs.beta : 1.0;
    offset += beta * alpha * obs.y;
  }
  return offset;
}

ThresholdSolution evaluate_threshold(std::span<const Sample> samples, std::size_t split_index,
                                     const MappingBounds& bounds) {
  const std::size_t n = samples.size();
  if (split_index > n) throw std::invalid_argument("evaluate_threshold: split index out of range");
  for (std::size_t i = 1; i < n; ++i)
    if (!(samples[i - 1].x < samples[i].x))
      throw std::invalid_argument("evaluate_threshold: scores must be strictly ascending");

  ThresholdSolution sol;
  sol.n = n;
  for (std::size_t i = 0; i < split_index; ++i) sol.l0 += samples[i].z;
  for (std::size_t i = split_index; i < n; ++i) sol.l1 += samples[i].z;
  sol.x0 = split_index == 0 ? kLow : samples[split_index - 1].x;
  sol.x1 = split_index == n ? kHigh : samples[split_index].x;
  sol.loss = bounds.q0 * sol.l0 + bounds.q1 * sol.l1;
  return sol;
}

}  // namespace threshcal
