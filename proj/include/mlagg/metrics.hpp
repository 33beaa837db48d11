#pragma once

#include <optional>
#include <vector>

#include "mlagg/data.hpp"
#include "mlagg/simulate.hpp"

namespace mlagg::metrics {

/// Label j of instance i is 1 iff strictly more than half of the instance's
/// annotators marked it. Instances without annotators get an all-zero row.
LabelMatrix majority_vote(const AnnotationSet& y);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
  double example = 0.0;
};

/// Micro (pooled), macro (per-label mean) and example-based (per-instance
/// mean) F1. A unit with no true and no predicted positives scores 1.
/// Throws std::invalid_argument on a shape mismatch.
F1Scores f1_scores(const LabelMatrix& truth, const LabelMatrix& predicted);

/// Empirical frequency of each label subset among the rows of z.
LabelSetDistribution empirical_label_distribution(const LabelMatrix& z);

/// KL(P ‖ P̂) with P̂ floored at eps and 0·log(0/·) = 0.
double kl_labelsets(const LabelSetDistribution& p, const LabelSetDistribution& p_hat,
                    double eps = 1e-10);

/// Centers used to classify an annotator's mean estimated reliability,
/// indexed by AnnotatorKind: midpoints of the simulated intervals.
inline constexpr double kKindCenters[3] = {0.92, 0.755, 0.5};

/// Nearest kind center to the given mean reliability; ties go to the lower kind index.
sim::AnnotatorKind classify_annotator(double mean_reliability);

/// Fraction of annotators whose nearest-center kind matches their true kind.
double annotator_type_recovery(const std::vector<sim::AnnotatorProfile>& truth,
                               const Matrix& reliability_hat);

struct EvalReport {
  F1Scores f1;
  std::optional<double> kl_labelsets;
  std::optional<double> type_recovery_rate;
};

}  // namespace mlagg::metrics
