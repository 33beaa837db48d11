#pragma once

#include <cmath>

namespace mlagg::detail {

/// Relative-improvement stopping rule: (ℒ_t − ℒ_{t−1}) / |ℒ_{t−1}| < eta.
class ConvergenceMonitor {
 public:
  explicit ConvergenceMonitor(double eta) : eta_(eta) {}

  /// Records a new ELBO value; returns true once the rule fires.
  bool push(double value) {
    const double previous = last_;
    const bool first = !has_last_;
    last_ = value;
    has_last_ = true;
    if (first) return false;
    const double scale = std::abs(previous);
    if (scale == 0.0) return value - previous <= 0.0;
    return (value - previous) / scale < eta_;
  }

 private:
  double eta_;
  double last_ = 0.0;
  bool has_last_ = false;
};

}  // namespace mlagg::detail
