#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlagg/data.hpp"
#include "mlagg/ingest.hpp"
#include "mlagg/metrics.hpp"
#include "mlagg/simulate.hpp"

namespace mlagg::experiments {

using nlohmann::json;

/// Explicit hyperparameter values that replace the defaults.
struct PriorOverrides {
  std::optional<double> a, b, alpha, beta, gamma;
};

/// Annotator prior from annotation density, α = 0.06, β = 0.84, γ = 1/K,
/// then any overrides.
Hyperparams resolve_hyperparams(const AnnotationSet& y, std::size_t num_components,
                                const PriorOverrides& overrides = {});

struct FitRequest {
  ModelTag model = ModelTag::Bmmb;
  std::size_t num_components = 6;
  PriorOverrides overrides;
  double eta = 1e-4;
  std::size_t max_iter = 500;
  std::optional<std::size_t> restarts;  // model default when absent
  std::uint64_t seed = 0;
};

/// Everything a fit produces; `fit` is absent for majority voting.
struct FitOutput {
  ModelTag model = ModelTag::Bmmb;
  std::size_t num_instances = 0;
  std::size_t num_labels = 0;
  std::size_t num_annotators = 0;
  double avg_annotations_per_instance = 0.0;
  std::optional<Hyperparams> hyperparams;
  LabelMatrix predictions;
  std::optional<FitResult> fit;
};

FitOutput run_fit(const AnnotationSet& y, const FitRequest& request);

json to_json(const FitOutput& output);
FitOutput fit_output_from_json(const json& doc);

/// KL only for mixture results with C ≤ 20; recovery only with profiles and a
/// reliability estimate. Throws std::invalid_argument on a shape mismatch.
metrics::EvalReport evaluate(const LabelMatrix& truth, const FitOutput& output,
                             const std::vector<sim::AnnotatorProfile>* profiles = nullptr);

/// Profiles CSV: "annotator,kind,psi_0,...,psi_{C-1}".
void write_profiles(std::ostream& out, const std::vector<sim::AnnotatorProfile>& profiles);
void write_profiles(const std::filesystem::path& path,
                    const std::vector<sim::AnnotatorProfile>& profiles);
std::vector<sim::AnnotatorProfile> read_profiles(std::istream& in);
std::vector<sim::AnnotatorProfile> read_profiles(const std::filesystem::path& path);

/// Planted-mixture truth "N,C,K" with a fixed seed.
struct PlantedSpec {
  std::size_t num_instances = 0;
  std::size_t num_labels = 0;
  std::size_t num_components = 0;
  std::uint64_t seed = 0;

  static PlantedSpec parse(const std::string& text, std::uint64_t seed);
  std::string str() const;
};

ingest::LabeledDataset make_planted_dataset(const PlantedSpec& spec);

/// Identifying parameters of one simulate → fit → evaluate run.
struct RunKey {
  ModelTag model = ModelTag::Bmmb;
  sim::Ratio ratio;
  std::size_t annotations_per_annotator = 5;
  std::size_t num_annotators = 0;
  std::size_t num_components = 6;
  std::uint64_t seed = 0;
};

struct EvalRow {
  RunKey key;
  metrics::EvalReport report;
};

json to_json(const EvalRow& row);
json to_json(const metrics::EvalReport& report);
std::string csv_header();
std::string csv_row(const EvalRow& row);

/// Fit settings shared by every run of a sweep.
struct RunSettings {
  double eta = 1e-4;
  std::size_t max_iter = 500;
  std::optional<std::size_t> restarts;
  PriorOverrides overrides;
};

/// Simulates annotations for `seed`, fits every model in `models` on the same
/// annotations and evaluates each against the truth.
std::vector<EvalRow> run_pipeline(const LabelMatrix& truth, const std::vector<ModelTag>& models,
                                  const sim::Ratio& ratio, std::size_t annotations_per_annotator,
                                  std::size_t num_annotators, std::size_t num_components,
                                  std::uint64_t seed, const RunSettings& settings = {});

enum class SweepAxis { Ratio, T, K, L };

SweepAxis parse_axis(const std::string& text);
std::string to_string(SweepAxis axis);

struct SweepSpec {
  LabelMatrix truth;
  std::string truth_description;
  std::vector<ModelTag> models{ModelTag::MajorityVote, ModelTag::Bnc, ModelTag::Bmmb};
  SweepAxis axis = SweepAxis::K;
  std::vector<std::string> grid;  // values of the swept axis, as text
  sim::Ratio ratio;
  std::size_t annotations_per_annotator = 5;
  std::size_t num_annotators = 900;
  std::size_t num_components = 6;
  std::vector<std::uint64_t> seeds{0};
  RunSettings settings;
  std::size_t workers = 1;

  /// Throws std::invalid_argument for an empty grid, empty seeds or bad grid values.
  void validate() const;
};

/// One row per (grid point, model, seed) in grid-major order. The run seed is
/// seed + grid index. Grid points run on up to `workers` threads.
std::vector<EvalRow> run_sweep(const SweepSpec& spec);

/// CSV with a leading '#' comment line describing the sweep.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<EvalRow>& rows);

struct ComponentRow {
  std::size_t component = 0;
  double proportion = 0.0;
  std::vector<double> tau;
};

/// Mixture components ordered by decreasing mixing proportion.
std::vector<ComponentRow> report_components(const MixtureEstimate& mixture);

}  // namespace mlagg::experiments
