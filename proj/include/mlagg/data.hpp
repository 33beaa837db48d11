#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlagg {

/// Malformed or inconsistent input data (parse failures, bad ids, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// N×C binary matrix: ground truth z or a prediction.
struct LabelMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> data;

  LabelMatrix() = default;
  LabelMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  std::uint8_t& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const std::uint8_t> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool operator==(const LabelMatrix&) const = default;
};

/// One annotation event: a complete C-bit label vector from one annotator for one instance.
struct Annotation {
  std::size_t annotator = 0;
  std::size_t instance = 0;
  std::vector<std::uint8_t> labels;

  bool operator==(const Annotation&) const = default;
};

/// Sparse store of annotations Y.
///
/// Records are kept sorted by (annotator, instance). Two CSR-style indices
/// give N(l), the records of annotator l, and L(i), the records of instance i
/// (ordered by annotator).
class AnnotationSet {
 public:
  AnnotationSet() = default;

  /// Validates ids, label lengths and uniqueness of (annotator, instance).
  /// Throws DataError on violation.
  AnnotationSet(std::size_t num_instances, std::size_t num_labels, std::size_t num_annotators,
                std::vector<Annotation> records);

  std::size_t num_instances() const { return num_instances_; }
  std::size_t num_labels() const { return num_labels_; }
  std::size_t num_annotators() const { return num_annotators_; }
  std::size_t size() const { return annotator_.size(); }
  bool empty() const { return annotator_.empty(); }

  std::size_t annotator(std::size_t record) const { return annotator_[record]; }
  std::size_t instance(std::size_t record) const { return instance_[record]; }
  std::span<const std::uint8_t> labels(std::size_t record) const {
    return {bits_.data() + record * num_labels_, num_labels_};
  }
  std::uint8_t label(std::size_t record, std::size_t j) const {
    return bits_[record * num_labels_ + j];
  }

  /// Record indices of N(l); contiguous because records are annotator-major.
  std::span<const std::size_t> by_annotator(std::size_t l) const {
    return {annotator_order_.data() + annotator_offsets_[l],
            annotator_offsets_[l + 1] - annotator_offsets_[l]};
  }
  /// Record indices of L(i).
  std::span<const std::size_t> by_instance(std::size_t i) const {
    return {instance_order_.data() + instance_offsets_[i],
            instance_offsets_[i + 1] - instance_offsets_[i]};
  }

  /// Materialized records in canonical (annotator, instance) order.
  std::vector<Annotation> records() const;

  bool operator==(const AnnotationSet& other) const;

 private:
  std::size_t num_instances_ = 0;
  std::size_t num_labels_ = 0;
  std::size_t num_annotators_ = 0;
  std::vector<std::size_t> annotator_;
  std::vector<std::size_t> instance_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::size_t> annotator_offsets_{0};
  std::vector<std::size_t> annotator_order_;
  std::vector<std::size_t> instance_offsets_{0};
  std::vector<std::size_t> instance_order_;
};

/// Prior hyperparameters. BNC ignores gamma and num_components.
struct Hyperparams {
  double a = 4.0;
  double b = 1.0;
  double alpha = 0.06;
  double beta = 0.84;
  double gamma = 1.0;
  std::size_t num_components = 1;

  /// Annotator prior (a, b) with the weak τ prior α = 0.06, β = 0.84 and γ = 1/K.
  static Hyperparams with_defaults(double a, double b, std::size_t num_components = 1);

  /// Throws std::invalid_argument unless every value is positive and K ≥ 1.
  void validate() const;
};

struct FitConfig {
  double eta = 1e-4;
  std::size_t max_iter = 500;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;

  static FitConfig bnc_defaults() { return {}; }
  static FitConfig bmmb_defaults() {
    FitConfig cfg;
    cfg.restarts = 3;
    return cfg;
  }

  void validate() const;
};

/// Variational parameters of the label-independent model.
struct BncState {
  Matrix g, h;         // L×C, q(Ψ) = Beta(g, h)
  Matrix lambda;       // N×C, q(z) = Bernoulli(λ)
  std::vector<double> e, f;  // C, q(τ_j) = Beta(e_j, f_j)
};

/// Variational parameters of the Bernoulli-mixture model.
struct BmmbState {
  Matrix g, h;       // L×C
  Matrix lambda;     // N×C
  Matrix e, f;       // K×C, q(τ_k,j) = Beta(e, f)
  Matrix r;          // N×K responsibilities
  std::vector<double> m;  // K, q(π) = Dirichlet(m)
};

enum class ModelTag { MajorityVote, Bnc, Bmmb };

std::string to_string(ModelTag tag);
/// Accepts "mv", "bnc", "bmmb"; throws std::invalid_argument otherwise.
ModelTag parse_model_tag(const std::string& text);

/// Posterior means of the mixture: Ê[π_k] = m_k / Σm and Ê[τ_k,j] = e / (e + f).
struct MixtureEstimate {
  std::vector<double> pi;
  Matrix tau;
};

struct FitResult {
  ModelTag model = ModelTag::Bnc;
  Matrix lambda;
  Matrix reliability;
  std::vector<double> elbo_trace;
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<MixtureEstimate> mixture;
};

/// Probability vector over the 2^C label subsets, indexed by bitmask
/// (bit j set means label j present).
struct LabelSetDistribution {
  static constexpr std::size_t kMaxLabels = 20;

  std::size_t num_labels = 0;
  std::vector<double> probs;

  /// Throws std::length_error when C exceeds kMaxLabels.
  static void check_capacity(std::size_t num_labels);
};

/// Bitmask of a binary label row.
std::uint32_t label_mask(std::span<const std::uint8_t> row);

/// 1 where λ ≥ threshold.
LabelMatrix binarize(const Matrix& lambda, double threshold = 0.5);

struct AnnotationStats {
  double avg_per_instance = 0.0;
  std::vector<std::size_t> per_annotator_counts;
};

AnnotationStats annotation_stats(const AnnotationSet& y);

struct AnnotatorPrior {
  double a;
  double b;
};

/// Annotator prior chosen from the mean number of annotations per instance.
AnnotatorPrior choose_prior(double avg_per_instance);

}  // namespace mlagg
