#include "threshcal/calibrator.hpp"

namespace threshcal {

Calibrator::Calibrator(LossSpec spec, MappingBounds bounds, Real tie_tol)
    : spec_(spec), bounds_(bounds), tree_(tie_tol) {}

ThresholdSolution Calibrator::observe(const LabeledObservation& obs) {
  if (spec_.mode == LossMode::kRaw)
    throw std::invalid_argument("Calibrator: raw mode expects (x, z) samples");
  const Sample s = reduce_to_linear(obs, spec_);
  const Real alpha = spec_.mode == LossMode::kPlain ? 1.0 : spec_.alpha;
  const Real beta = spec_.mode == LossMode::kSampleWeighted ? obs.beta : 1.0;
  return apply(s.x, s.z, beta * alpha * obs.y, obs.y);
}

ThresholdSolution Calibrator::observe(const Sample& s) {
  if (spec_.mode != LossMode::kRaw)
    throw std::invalid_argument("Calibrator: labeled mode expects labeled observations");
  if (!std::isfinite(s.x) || !std::isfinite(s.z))
    throw std::invalid_argument("Calibrator: sample must be finite");
  return apply(s.x, s.z, 0.0, -1);
}

ThresholdSolution Calibrator::apply(Real x, Real z, Real offset_contrib, int label) {
  auto it = leaves_.find(x);
  if (it == leaves_.end()) {
    last_updates_ = tree_.insert(Sample(x, z));
    LeafStat st;
    st.z = z;
    st.offset = offset_contrib;
    if (label == 0) st.n0 = 1;
    if (label == 1) st.n1 = 1;
    leaves_.emplace(x, st);
  } else {
    // Repeated score: fold into the existing leaf and refresh its path.
    LeafStat& st = it->second;
    st.z += z;
    st.offset += offset_contrib;
    if (label == 0) ++st.n0;
    if (label == 1) ++st.n1;
    last_updates_ = tree_.update_leaf(x, st.z);
  }
  offset_total_ += offset_contrib;
  ++n_obs_;
  return solution();
}

ThresholdSolution Calibrator::solution() const {
  if (tree_.empty()) throw std::logic_error("Calibrator: no observations yet");
  return tree_.root_solution(bounds_);
}

Real Calibrator::predict(Real x) const {
  if (!std::isfinite(x)) throw std::invalid_argument("Calibrator::predict: score must be finite");
  if (tree_.empty()) throw std::logic_error("Calibrator: no observations yet");
  const AuxSummary& r = tree_.root();
  if (x <= r.x0) return bounds_.q0;
  if (x >= r.x1) return bounds_.q1;
  return bounds_.q0;  // open interval inside the bracket stays on the q0 side
}

Metrics Calibrator::metrics() const {
  Metrics m;
  m.n = n_obs_;
  if (tree_.empty()) {
    if (spec_.mode != LossMode::kRaw) m.weighted_error = 0.0;
    return m;
  }
  const ThresholdSolution sol = solution();
  m.loss = sol.loss;
  if (spec_.mode == LossMode::kRaw) return m;

  // The fitted split is bounds-independent, so the weighted error is the
  // offset plus the linear loss at (0, 1).
  m.weighted_error = offset_total_ + sol.l1;

  std::uint64_t errors = 0, labeled = 0;
  for (const auto& [x, st] : leaves_) {
    const bool low_side = x <= sol.x0;
    errors += low_side ? st.n1 : st.n0;
    labeled += st.n0 + st.n1;
  }
  if (labeled > 0)
    m.accuracy = 1.0 - static_cast<Real>(errors) / static_cast<Real>(labeled);
  return m;
}

}  // namespace threshcal
