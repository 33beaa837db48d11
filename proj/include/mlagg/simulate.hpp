#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mlagg/data.hpp"
#include "mlagg/random.hpp"

namespace mlagg::sim {

enum class AnnotatorKind { Reliable = 0, Normal = 1, Random = 2 };

std::string to_string(AnnotatorKind kind);
AnnotatorKind parse_kind(const std::string& text);

/// Half-open reliability interval [lo, hi) of each kind; Random is the point 0.5.
struct ReliabilityRange {
  double lo;
  double hi;
};
ReliabilityRange reliability_range(AnnotatorKind kind);

struct AnnotatorProfile {
  std::size_t annotator_id = 0;
  AnnotatorKind kind = AnnotatorKind::Reliable;
  std::vector<double> psi;  // per-label probability of agreeing with the truth
};

/// Heterogeneity ratio reliable:normal:random.
struct Ratio {
  std::array<unsigned, 3> parts{1, 1, 1};

  /// Parses "a:b:c". Throws std::invalid_argument on malformed text or all zeros.
  static Ratio parse(const std::string& text);
  std::string str() const;
};

struct SimConfig {
  Ratio ratio;
  std::size_t annotations_per_annotator = 5;  // T
  std::size_t num_annotators = 0;             // L
  std::uint64_t seed = 0;
};

/// Splits `total` across the ratio parts by largest remainder; ties go to the
/// lower kind index.
std::array<std::size_t, 3> apportion(const Ratio& ratio, std::size_t total);

/// Annotator ids are assigned kind by kind (reliable first). Each annotator
/// draws its reliabilities from its own stream.
std::vector<AnnotatorProfile> sample_annotator_pool(const SimConfig& cfg, std::size_t num_labels);

/// Each annotator labels a uniform size-T subset of instances; every bit
/// matches the truth with probability psi_j. Throws std::invalid_argument if T > N.
AnnotationSet generate_annotations(const LabelMatrix& truth,
                                   const std::vector<AnnotatorProfile>& profiles,
                                   std::size_t annotations_per_annotator, std::uint64_t seed);

struct PlantedMixture {
  std::vector<double> pi;  // K mixing weights
  Matrix tau;              // K×C Bernoulli means
};

struct PlantedTruth {
  LabelMatrix labels;
  std::vector<std::size_t> assignments;
};

/// Draws x_i ~ Discrete(π), then z_i,j ~ Bernoulli(τ_{x_i, j}).
PlantedTruth plant_mixture_ground_truth(std::size_t num_instances, const PlantedMixture& mixture,
                                        RandomStream& rng);

/// A random K-component mixture with sparse, well-separated label patterns:
/// each τ entry is high (0.80–0.95) with probability 0.35, low (0.02–0.15)
/// otherwise, and weights are proportional to 0.5 + U(0, 1).
PlantedMixture random_planted_mixture(std::size_t num_components, std::size_t num_labels,
                                      RandomStream& rng);

}  // namespace mlagg::sim
