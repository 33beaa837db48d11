#include "mlagg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlagg::metrics {
namespace {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

LabelMatrix majority_vote(const AnnotationSet& y) {
  const std::size_t c = y.num_labels();
  LabelMatrix out(y.num_instances(), c);
  std::vector<std::size_t> votes(c);
  for (std::size_t i = 0; i < y.num_instances(); ++i) {
    const auto records = y.by_instance(i);
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t rec : records) {
      const auto bits = y.labels(rec);
      for (std::size_t j = 0; j < c; ++j) votes[j] += bits[j];
    }
    for (std::size_t j = 0; j < c; ++j) out(i, j) = 2 * votes[j] > records.size() ? 1 : 0;
  }
  return out;
}

F1Scores f1_scores(const LabelMatrix& truth, const LabelMatrix& predicted) {
  if (truth.rows != predicted.rows || truth.cols != predicted.cols) {
    throw std::invalid_argument("f1_scores: shape mismatch");
  }
  const std::size_t n = truth.rows;
  const std::size_t c = truth.cols;
  std::vector<std::size_t> tp(c), fp(c), fn(c);
  double example_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row_tp = 0, row_fp = 0, row_fn = 0;
    for (std::size_t j = 0; j < c; ++j) {
      const bool t = truth(i, j) != 0;
      const bool p = predicted(i, j) != 0;
      if (t && p) ++row_tp, ++tp[j];
      if (!t && p) ++row_fp, ++fp[j];
      if (t && !p) ++row_fn, ++fn[j];
    }
    example_sum += f1_from_counts(row_tp, row_fp, row_fn);
  }
  F1Scores scores;
  std::size_t all_tp = 0, all_fp = 0, all_fn = 0;
  double macro_sum = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    all_tp += tp[j];
    all_fp += fp[j];
    all_fn += fn[j];
    macro_sum += f1_from_counts(tp[j], fp[j], fn[j]);
  }
  scores.micro = f1_from_counts(all_tp, all_fp, all_fn);
  scores.macro = c ? macro_sum / static_cast<double>(c) : 1.0;
  scores.example = n ? example_sum / static_cast<double>(n) : 1.0;
  return scores;
}

LabelSetDistribution empirical_label_distribution(const LabelMatrix& z) {
  LabelSetDistribution::check_capacity(z.cols);
  if (z.rows == 0) throw std::invalid_argument("empirical distribution of an empty matrix");
  LabelSetDistribution dist;
  dist.num_labels = z.cols;
  std::vector<std::size_t> counts(std::size_t{1} << z.cols, 0);
  for (std::size_t i = 0; i < z.rows; ++i) ++counts[label_mask(z.row(i))];
  dist.probs.resize(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    dist.probs[s] = static_cast<double>(counts[s]) / static_cast<double>(z.rows);
  }
  return dist;
}

double kl_labelsets(const LabelSetDistribution& p, const LabelSetDistribution& p_hat, double eps) {
  if (p.num_labels != p_hat.num_labels || p.probs.size() != p_hat.probs.size()) {
    throw std::invalid_argument("kl_labelsets: distributions over different label sets");
  }
  double kl = 0.0;
  for (std::size_t s = 0; s < p.probs.size(); ++s) {
    if (p.probs[s] <= 0.0) continue;
    kl += p.probs[s] * std::log(p.probs[s] / std::max(p_hat.probs[s], eps));
  }
  // Rounding can leave a tiny negative value when P ≈ P̂.
  return std::max(kl, 0.0);
}

sim::AnnotatorKind classify_annotator(double mean_reliability) {
  std::size_t best = 0;
  double best_distance = std::abs(mean_reliability - kKindCenters[0]);
  for (std::size_t k = 1; k < 3; ++k) {
    const double d = std::abs(mean_reliability - kKindCenters[k]);
    // Distances within rounding of each other count as a tie.
    if (d < best_distance - 1e-12) {
      best = k;
      best_distance = d;
    }
  }
  return static_cast<sim::AnnotatorKind>(best);
}

double annotator_type_recovery(const std::vector<sim::AnnotatorProfile>& truth,
                               const Matrix& reliability_hat) {
  if (truth.size() != reliability_hat.rows) {
    throw std::invalid_argument("annotator_type_recovery: annotator count mismatch");
  }
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& profile : truth) {
    const auto row = reliability_hat.row(profile.annotator_id);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    if (classify_annotator(mean) == profile.kind) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace mlagg::metrics
