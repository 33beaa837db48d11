#include "mlagg/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace mlagg {

AnnotationSet::AnnotationSet(std::size_t num_instances, std::size_t num_labels,
                             std::size_t num_annotators, std::vector<Annotation> records)
    : num_instances_(num_instances), num_labels_(num_labels), num_annotators_(num_annotators) {
  for (const auto& rec : records) {
    if (rec.annotator >= num_annotators) {
      throw DataError("annotator id " + std::to_string(rec.annotator) + " out of range [0, " +
                      std::to_string(num_annotators) + ")");
    }
    if (rec.instance >= num_instances) {
      throw DataError("instance id " + std::to_string(rec.instance) + " out of range [0, " +
                      std::to_string(num_instances) + ")");
    }
    if (rec.labels.size() != num_labels) {
      throw DataError("label vector of length " + std::to_string(rec.labels.size()) +
                      ", expected " + std::to_string(num_labels));
    }
    for (auto bit : rec.labels) {
      if (bit > 1) throw DataError("label values must be 0 or 1");
    }
  }
  std::sort(records.begin(), records.end(), [](const Annotation& x, const Annotation& y) {
    return std::tie(x.annotator, x.instance) < std::tie(y.annotator, y.instance);
  });
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].annotator == records[r - 1].annotator &&
        records[r].instance == records[r - 1].instance) {
      throw DataError("duplicate annotation for (annotator " +
                      std::to_string(records[r].annotator) + ", instance " +
                      std::to_string(records[r].instance) + ")");
    }
  }

  const std::size_t n = records.size();
  annotator_.resize(n);
  instance_.resize(n);
  bits_.resize(n * num_labels);
  annotator_offsets_.assign(num_annotators + 1, 0);
  instance_offsets_.assign(num_instances + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    annotator_[r] = records[r].annotator;
    instance_[r] = records[r].instance;
    std::copy(records[r].labels.begin(), records[r].labels.end(),
              bits_.begin() + static_cast<std::ptrdiff_t>(r * num_labels));
    ++annotator_offsets_[annotator_[r] + 1];
    ++instance_offsets_[instance_[r] + 1];
  }
  std::partial_sum(annotator_offsets_.begin(), annotator_offsets_.end(),
                   annotator_offsets_.begin());
  std::partial_sum(instance_offsets_.begin(), instance_offsets_.end(), instance_offsets_.begin());

  annotator_order_.resize(n);
  std::iota(annotator_order_.begin(), annotator_order_.end(), std::size_t{0});

  // Counting sort keeps annotator order within each instance bucket.
  instance_order_.resize(n);
  std::vector<std::size_t> cursor(instance_offsets_.begin(), instance_offsets_.end() - 1);
  for (std::size_t r = 0; r < n; ++r) instance_order_[cursor[instance_[r]]++] = r;
}

std::vector<Annotation> AnnotationSet::records() const {
  std::vector<Annotation> out;
  out.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) {
    auto bits = labels(r);
    out.push_back({annotator_[r], instance_[r], {bits.begin(), bits.end()}});
  }
  return out;
}

bool AnnotationSet::operator==(const AnnotationSet& other) const {
  return num_instances_ == other.num_instances_ && num_labels_ == other.num_labels_ &&
         num_annotators_ == other.num_annotators_ && annotator_ == other.annotator_ &&
         instance_ == other.instance_ && bits_ == other.bits_;
}

Hyperparams Hyperparams::with_defaults(double a, double b, std::size_t num_components) {
  Hyperparams hp;
  hp.a = a;
  hp.b = b;
  hp.num_components = num_components;
  hp.gamma = num_components > 0 ? 1.0 / static_cast<double>(num_components) : 1.0;
  return hp;
}

void Hyperparams::validate() const {
  for (double v : {a, b, alpha, beta, gamma}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("hyperparameters must be finite and positive");
    }
  }
  if (num_components < 1) throw std::invalid_argument("number of components K must be >= 1");
}

void FitConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::MajorityVote: return "mv";
    case ModelTag::Bnc: return "bnc";
    case ModelTag::Bmmb: return "bmmb";
  }
  return "unknown";
}

ModelTag parse_model_tag(const std::string& text) {
  if (text == "mv") return ModelTag::MajorityVote;
  if (text == "bnc") return ModelTag::Bnc;
  if (text == "bmmb") return ModelTag::Bmmb;
  throw std::invalid_argument("unknown model '" + text + "' (expected mv, bnc or bmmb)");
}

void LabelSetDistribution::check_capacity(std::size_t num_labels) {
  if (num_labels > kMaxLabels) {
    throw std::length_error("label-set distribution supports at most " +
                            std::to_string(kMaxLabels) + " labels, got " +
                            std::to_string(num_labels));
  }
}

std::uint32_t label_mask(std::span<const std::uint8_t> row) {
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j]) mask |= (std::uint32_t{1} << j);
  }
  return mask;
}

LabelMatrix binarize(const Matrix& lambda, double threshold) {
  LabelMatrix out(lambda.rows, lambda.cols);
  for (std::size_t k = 0; k < lambda.data.size(); ++k) {
    out.data[k] = lambda.data[k] >= threshold ? 1 : 0;
  }
  return out;
}

AnnotationStats annotation_stats(const AnnotationSet& y) {
  AnnotationStats stats;
  stats.per_annotator_counts.resize(y.num_annotators());
  for (std::size_t l = 0; l < y.num_annotators(); ++l) {
    stats.per_annotator_counts[l] = y.by_annotator(l).size();
  }
  if (y.num_instances() > 0) {
    stats.avg_per_instance =
        static_cast<double>(y.size()) / static_cast<double>(y.num_instances());
  }
  return stats;
}

AnnotatorPrior choose_prior(double avg_per_instance) {
  if (avg_per_instance < 2.0) return {12.0, 1.0};
  if (avg_per_instance < 4.0) return {6.0, 1.0};
  return {4.0, 1.0};
}

}  // namespace mlagg
