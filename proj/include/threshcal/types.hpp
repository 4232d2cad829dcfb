#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace threshcal {

using Real = double;

// Bracket endpoint placeholders. kLow marks an empty lower (q0) side of a
// split, kHigh an empty upper (q1) side. Scores themselves must be finite,
// so the sentinels never collide with data.
inline constexpr Real kLow = -std::numeric_limits<Real>::infinity();
inline constexpr Real kHigh = std::numeric_limits<Real>::infinity();

inline bool is_low(Real v) { return v == kLow; }
inline bool is_high(Real v) { return v == kHigh; }
inline bool is_concrete(Real v) { return std::isfinite(v); }

/// One (score, linear-loss coefficient) pair, the unit of ingestion.
struct Sample {
  Real x = 0;
  Real z = 0;

  Sample() = default;
  Sample(Real score, Real coeff) : x(score), z(coeff) {
    if (!std::isfinite(x)) throw std::invalid_argument("Sample: score must be finite");
    if (!std::isfinite(z)) throw std::invalid_argument("Sample: loss coefficient must be finite");
  }

  bool operator==(const Sample&) const = default;
};

/// A scored observation with its binary label and positive weight.
struct LabeledObservation {
  Real x = 0;
  int y = 0;
  Real beta = 1.0;

  LabeledObservation() = default;
  LabeledObservation(Real score, int label, Real weight = 1.0) : x(score), y(label), beta(weight) {
    if (!std::isfinite(x)) throw std::invalid_argument("LabeledObservation: score must be finite");
    if (y != 0 && y != 1) throw std::invalid_argument("LabeledObservation: label must be 0 or 1");
    if (!std::isfinite(beta) || beta <= 0)
      throw std::invalid_argument("LabeledObservation: weight must be positive");
  }
};

enum class LossMode {
  kPlain,           // z = 1 - 2y
  kClassWeighted,   // z = 1 - (alpha+1)y
  kSampleWeighted,  // z = beta - beta(alpha+1)y
  kRaw,             // z supplied directly
};

const char* to_string(LossMode mode);
LossMode loss_mode_from_string(const std::string& name);

/// How labeled observations turn into linear-loss coefficients.
struct LossSpec {
  LossMode mode = LossMode::kPlain;
  Real alpha = 1.0;  // class-1 error weight

  LossSpec() = default;
  explicit LossSpec(LossMode m, Real a = 1.0) : mode(m), alpha(a) {
    if (!std::isfinite(alpha) || alpha <= 0)
      throw std::invalid_argument("LossSpec: alpha must be positive");
  }
};

/// The two-point target set {q0, q1}, q0 strictly below q1.
struct MappingBounds {
  Real q0 = 0.0;
  Real q1 = 1.0;

  MappingBounds() = default;
  MappingBounds(Real lo, Real hi) : q0(lo), q1(hi) {
    if (!std::isfinite(q0) || !std::isfinite(q1))
      throw std::invalid_argument("MappingBounds: bounds must be finite");
    if (!(q0 < q1)) throw std::invalid_argument("MappingBounds: q0 must be strictly below q1");
  }
};

/// A solved split: scores up to x0 map to q0, scores from x1 up map to q1.
/// x0 is kLow when no sample maps to q0; x1 is kHigh when none maps to q1.
struct ThresholdSolution {
  Real x0 = kLow;
  Real x1 = kHigh;
  Real l0 = 0;    // sum of z over the q0 side
  Real l1 = 0;    // sum of z over the q1 side
  Real loss = 0;  // q0*l0 + q1*l1
  std::size_t n = 0;

  bool operator==(const ThresholdSolution&) const = default;
};

}  // namespace threshcal
