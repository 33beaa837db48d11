#include "mlagg/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mlagg::sim {
namespace {

// Stream domains; every annotator gets one stream per domain.
constexpr std::uint64_t kPoolDomain = 11;
constexpr std::uint64_t kAnnotationDomain = 12;

}  // namespace

std::string to_string(AnnotatorKind kind) {
  switch (kind) {
    case AnnotatorKind::Reliable: return "reliable";
    case AnnotatorKind::Normal: return "normal";
    case AnnotatorKind::Random: return "random";
  }
  return "unknown";
}

AnnotatorKind parse_kind(const std::string& text) {
  if (text == "reliable") return AnnotatorKind::Reliable;
  if (text == "normal") return AnnotatorKind::Normal;
  if (text == "random") return AnnotatorKind::Random;
  throw std::invalid_argument("unknown annotator kind '" + text + "'");
}

ReliabilityRange reliability_range(AnnotatorKind kind) {
  switch (kind) {
    case AnnotatorKind::Reliable: return {0.85, 0.99};
    case AnnotatorKind::Normal: return {0.66, 0.85};
    case AnnotatorKind::Random: return {0.5, 0.5};
  }
  return {0.5, 0.5};
}

Ratio Ratio::parse(const std::string& text) {
  if (std::count(text.begin(), text.end(), ':') != 2) {
    throw std::invalid_argument("ratio needs three parts reliable:normal:random, got '" + text + "'");
  }
  Ratio ratio;
  std::size_t start = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto end = k < 2 ? text.find(':', start) : text.size();
    if (end == std::string::npos) throw std::invalid_argument("ratio must look like a:b:c");
    unsigned value = 0;
    const char* first = text.data() + start;
    const char* last = text.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc() || ptr != last) {
      throw std::invalid_argument("ratio must look like a:b:c, got '" + text + "'");
    }
    ratio.parts[k] = value;
    start = end + 1;
  }
  if (ratio.parts[0] + ratio.parts[1] + ratio.parts[2] == 0) {
    throw std::invalid_argument("ratio must not be all zero");
  }
  return ratio;
}

std::string Ratio::str() const {
  return std::to_string(parts[0]) + ":" + std::to_string(parts[1]) + ":" +
         std::to_string(parts[2]);
}

std::array<std::size_t, 3> apportion(const Ratio& ratio, std::size_t total) {
  const unsigned sum = ratio.parts[0] + ratio.parts[1] + ratio.parts[2];
  if (sum == 0) throw std::invalid_argument("ratio must not be all zero");
  std::array<std::size_t, 3> counts{};
  std::array<std::size_t, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    // Exact integer arithmetic: share = total * part / sum.
    const std::size_t numer = total * ratio.parts[k];
    counts[k] = numer / sum;
    remainders[k] = numer % sum;
    assigned += counts[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainders[x] > remainders[y]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k]];
  return counts;
}

std::vector<AnnotatorProfile> sample_annotator_pool(const SimConfig& cfg, std::size_t num_labels) {
  const auto counts = apportion(cfg.ratio, cfg.num_annotators);
  std::vector<AnnotatorProfile> pool;
  pool.reserve(cfg.num_annotators);
  std::size_t id = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto kind = static_cast<AnnotatorKind>(k);
    const auto range = reliability_range(kind);
    for (std::size_t n = 0; n < counts[k]; ++n, ++id) {
      RandomStream rng(cfg.seed, id, kPoolDomain);
      AnnotatorProfile profile{id, kind, std::vector<double>(num_labels, 0.5)};
      if (kind != AnnotatorKind::Random) {
        for (auto& psi : profile.psi) psi = rng.uniform(range.lo, range.hi);
      }
      pool.push_back(std::move(profile));
    }
  }
  return pool;
}

AnnotationSet generate_annotations(const LabelMatrix& truth,
                                   const std::vector<AnnotatorProfile>& profiles,
                                   std::size_t annotations_per_annotator, std::uint64_t seed) {
  const std::size_t n = truth.rows;
  const std::size_t c = truth.cols;
  const std::size_t t = annotations_per_annotator;
  if (t > n) {
    throw std::invalid_argument("annotations per annotator (" + std::to_string(t) +
                                ") exceeds the number of instances (" + std::to_string(n) + ")");
  }
  std::vector<Annotation> records;
  records.reserve(profiles.size() * t);
  std::vector<std::size_t> chosen;
  std::vector<std::uint8_t> marks;
  for (const auto& profile : profiles) {
    if (profile.psi.size() != c) {
      throw std::invalid_argument("annotator profile has wrong number of reliabilities");
    }
    RandomStream rng(seed, profile.annotator_id, kAnnotationDomain);
    // Floyd's algorithm: a uniform t-subset of [0, n).
    chosen.clear();
    const bool use_marks = t * t > n;
    if (use_marks) marks.assign(n, 0);
    for (std::size_t k = n - t; k < n; ++k) {
      const std::size_t pick = rng.below(k + 1);
      const bool taken = use_marks ? marks[pick] != 0
                                   : std::find(chosen.begin(), chosen.end(), pick) != chosen.end();
      const std::size_t accepted = taken ? k : pick;
      chosen.push_back(accepted);
      if (use_marks) marks[accepted] = 1;
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i : chosen) {
      Annotation rec{profile.annotator_id, i, std::vector<std::uint8_t>(c)};
      for (std::size_t j = 0; j < c; ++j) {
        const bool agree = rng.bernoulli(profile.psi[j]);
        rec.labels[j] = agree ? truth(i, j) : static_cast<std::uint8_t>(1 - truth(i, j));
      }
      records.push_back(std::move(rec));
    }
  }
  std::size_t num_annotators = 0;
  for (const auto& p : profiles) num_annotators = std::max(num_annotators, p.annotator_id + 1);
  return AnnotationSet(n, c, num_annotators, std::move(records));
}

PlantedTruth plant_mixture_ground_truth(std::size_t num_instances, const PlantedMixture& mixture,
                                        RandomStream& rng) {
  const std::size_t k_count = mixture.pi.size();
  const std::size_t c = mixture.tau.cols;
  if (k_count == 0 || mixture.tau.rows != k_count) {
    throw std::invalid_argument("mixture weights and tau rows disagree");
  }
  std::vector<double> cumulative(k_count);
  std::partial_sum(mixture.pi.begin(), mixture.pi.end(), cumulative.begin());
  PlantedTruth out{LabelMatrix(num_instances, c), std::vector<std::size_t>(num_instances)};
  for (std::size_t i = 0; i < num_instances; ++i) {
    const double u = rng.uniform() * cumulative.back();
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    k = std::min(k, k_count - 1);
    out.assignments[i] = k;
    for (std::size_t j = 0; j < c; ++j) {
      out.labels(i, j) = rng.bernoulli(mixture.tau(k, j)) ? 1 : 0;
    }
  }
  return out;
}

PlantedMixture random_planted_mixture(std::size_t num_components, std::size_t num_labels,
                                      RandomStream& rng) {
  PlantedMixture mixture{std::vector<double>(num_components),
                         Matrix(num_components, num_labels)};
  double total = 0.0;
  for (auto& w : mixture.pi) {
    w = 0.5 + rng.uniform();
    total += w;
  }
  for (auto& w : mixture.pi) w /= total;
  for (auto& t : mixture.tau.data) {
    t = rng.bernoulli(0.35) ? rng.uniform(0.80, 0.95) : rng.uniform(0.02, 0.15);
  }
  return mixture;
}

}  // namespace mlagg::sim
