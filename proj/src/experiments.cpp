#include "mlagg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "mlagg/bmmb.hpp"
#include "mlagg/bnc.hpp"

namespace mlagg::experiments {
namespace {

constexpr std::uint64_t kPlantedDomain = 31;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto row = m.row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

json labels_to_json(const LabelMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    std::vector<int> row(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) row[j] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows.at(i);
    if (row.size() != cols) throw DataError("result file: ragged matrix row");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = row.at(j).get<double>();
  }
  return m;
}

LabelMatrix labels_from_json(const json& rows, std::size_t cols) {
  LabelMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows.at(i);
    if (row.size() != cols) throw DataError("result file: ragged prediction row");
    for (std::size_t j = 0; j < cols; ++j) {
      const int v = row.at(j).get<int>();
      if (v != 0 && v != 1) throw DataError("result file: non-binary prediction");
      m(i, j) = static_cast<std::uint8_t>(v);
    }
  }
  return m;
}

std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out << std::setprecision(10) << *v;
  return out.str();
}

}  // namespace

Hyperparams resolve_hyperparams(const AnnotationSet& y, std::size_t num_components,
                                const PriorOverrides& overrides) {
  if (num_components < 1) throw std::invalid_argument("K must be >= 1");
  const auto prior = choose_prior(annotation_stats(y).avg_per_instance);
  Hyperparams hp = Hyperparams::with_defaults(prior.a, prior.b, num_components);
  if (overrides.a) hp.a = *overrides.a;
  if (overrides.b) hp.b = *overrides.b;
  if (overrides.alpha) hp.alpha = *overrides.alpha;
  if (overrides.beta) hp.beta = *overrides.beta;
  if (overrides.gamma) hp.gamma = *overrides.gamma;
  hp.validate();
  return hp;
}

FitOutput run_fit(const AnnotationSet& y, const FitRequest& request) {
  FitOutput out;
  out.model = request.model;
  out.num_instances = y.num_instances();
  out.num_labels = y.num_labels();
  out.num_annotators = y.num_annotators();
  out.avg_annotations_per_instance = annotation_stats(y).avg_per_instance;
  if (request.model == ModelTag::MajorityVote) {
    out.predictions = metrics::majority_vote(y);
    return out;
  }
  const std::size_t k = request.model == ModelTag::Bmmb ? request.num_components : 1;
  const Hyperparams hp = resolve_hyperparams(y, k, request.overrides);
  FitConfig cfg =
      request.model == ModelTag::Bmmb ? FitConfig::bmmb_defaults() : FitConfig::bnc_defaults();
  cfg.eta = request.eta;
  cfg.max_iter = request.max_iter;
  cfg.seed = request.seed;
  if (request.restarts) cfg.restarts = *request.restarts;
  out.hyperparams = hp;
  out.fit = request.model == ModelTag::Bmmb ? bmmb::fit(y, hp, cfg) : bnc::fit(y, hp, cfg);
  out.predictions = binarize(out.fit->lambda);
  return out;
}

json to_json(const FitOutput& output) {
  json doc;
  doc["model"] = to_string(output.model);
  doc["num_instances"] = output.num_instances;
  doc["num_labels"] = output.num_labels;
  doc["num_annotators"] = output.num_annotators;
  doc["avg_annotations_per_instance"] = output.avg_annotations_per_instance;
  if (output.hyperparams) {
    const auto& hp = *output.hyperparams;
    doc["hyperparams"] = {{"a", hp.a},         {"b", hp.b},         {"alpha", hp.alpha},
                          {"beta", hp.beta},   {"gamma", hp.gamma}, {"K", hp.num_components}};
  }
  doc["predictions"] = labels_to_json(output.predictions);
  if (output.fit) {
    const auto& fit = *output.fit;
    doc["lambda"] = matrix_to_json(fit.lambda);
    doc["reliability"] = matrix_to_json(fit.reliability);
    doc["elbo_trace"] = fit.elbo_trace;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    if (fit.mixture) {
      doc["mixture"] = {{"pi", fit.mixture->pi}, {"tau", matrix_to_json(fit.mixture->tau)}};
    }
  }
  return doc;
}

FitOutput fit_output_from_json(const json& doc) {
  try {
    FitOutput out;
    out.model = parse_model_tag(doc.at("model").get<std::string>());
    out.num_instances = doc.at("num_instances").get<std::size_t>();
    out.num_labels = doc.at("num_labels").get<std::size_t>();
    out.num_annotators = doc.at("num_annotators").get<std::size_t>();
    out.avg_annotations_per_instance = doc.value("avg_annotations_per_instance", 0.0);
    const std::size_t c = out.num_labels;
    out.predictions = labels_from_json(doc.at("predictions"), c);
    if (doc.contains("hyperparams")) {
      const auto& h = doc["hyperparams"];
      Hyperparams hp;
      hp.a = h.at("a").get<double>();
      hp.b = h.at("b").get<double>();
      hp.alpha = h.at("alpha").get<double>();
      hp.beta = h.at("beta").get<double>();
      hp.gamma = h.at("gamma").get<double>();
      hp.num_components = h.at("K").get<std::size_t>();
      out.hyperparams = hp;
    }
    if (doc.contains("lambda")) {
      FitResult fit;
      fit.model = out.model;
      fit.lambda = matrix_from_json(doc["lambda"], c);
      fit.reliability = matrix_from_json(doc.at("reliability"), c);
      fit.elbo_trace = doc.at("elbo_trace").get<std::vector<double>>();
      fit.iterations = doc.at("iterations").get<std::size_t>();
      fit.converged = doc.at("converged").get<bool>();
      if (doc.contains("mixture")) {
        MixtureEstimate mix;
        mix.pi = doc["mixture"].at("pi").get<std::vector<double>>();
        mix.tau = matrix_from_json(doc["mixture"].at("tau"), c);
        if (mix.tau.rows != mix.pi.size()) throw DataError("result file: mixture shape mismatch");
        fit.mixture = std::move(mix);
      }
      out.fit = std::move(fit);
    }
    if (out.predictions.rows != out.num_instances) {
      throw DataError("result file: prediction rows do not match num_instances");
    }
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed result file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed result file: ") + e.what());
  }
}

metrics::EvalReport evaluate(const LabelMatrix& truth, const FitOutput& output,
                             const std::vector<sim::AnnotatorProfile>* profiles) {
  metrics::EvalReport report;
  report.f1 = metrics::f1_scores(truth, output.predictions);
  if (output.fit && output.fit->mixture &&
      truth.cols <= LabelSetDistribution::kMaxLabels && truth.rows > 0) {
    report.kl_labelsets = metrics::kl_labelsets(metrics::empirical_label_distribution(truth),
                                                bmmb::estimate_label_distribution(*output.fit));
  }
  if (profiles && output.fit) {
    report.type_recovery_rate = metrics::annotator_type_recovery(*profiles, output.fit->reliability);
  }
  return report;
}

void write_profiles(std::ostream& out, const std::vector<sim::AnnotatorProfile>& profiles) {
  const std::size_t c = profiles.empty() ? 0 : profiles.front().psi.size();
  out << "annotator,kind";
  for (std::size_t j = 0; j < c; ++j) out << ",psi_" << j;
  out << '\n';
  out << std::setprecision(17);
  for (const auto& p : profiles) {
    out << p.annotator_id << ',' << sim::to_string(p.kind);
    for (double v : p.psi) out << ',' << v;
    out << '\n';
  }
}

void write_profiles(const std::filesystem::path& path,
                    const std::vector<sim::AnnotatorProfile>& profiles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_profiles(out, profiles);
}

std::vector<sim::AnnotatorProfile> read_profiles(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("annotator,kind", 0) != 0) {
    throw DataError("profiles: expected header 'annotator,kind,psi_0,...'");
  }
  std::vector<sim::AnnotatorProfile> profiles;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string cell;
    sim::AnnotatorProfile p;
    try {
      std::getline(cells, cell, ',');
      p.annotator_id = parse_count(cell, "annotator id");
      std::getline(cells, cell, ',');
      p.kind = sim::parse_kind(cell);
      while (std::getline(cells, cell, ',')) p.psi.push_back(std::stod(cell));
    } catch (const std::exception& e) {
      throw DataError("profiles: line " + std::to_string(line_no) + ": " + e.what());
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<sim::AnnotatorProfile> read_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_profiles(in);
}

PlantedSpec PlantedSpec::parse(const std::string& text, std::uint64_t seed) {
  PlantedSpec spec;
  spec.seed = seed;
  std::stringstream in(text);
  std::string part;
  std::vector<std::size_t> values;
  while (std::getline(in, part, ',')) values.push_back(parse_count(part, "planted spec value"));
  if (values.size() != 3 || values[0] == 0 || values[1] == 0 || values[2] == 0) {
    throw std::invalid_argument("planted spec must be N,C,K with positive values");
  }
  spec.num_instances = values[0];
  spec.num_labels = values[1];
  spec.num_components = values[2];
  return spec;
}

std::string PlantedSpec::str() const {
  return "planted(N=" + std::to_string(num_instances) + ",C=" + std::to_string(num_labels) +
         ",K=" + std::to_string(num_components) + ",seed=" + std::to_string(seed) + ")";
}

ingest::LabeledDataset make_planted_dataset(const PlantedSpec& spec) {
  RandomStream rng(spec.seed, 0, kPlantedDomain);
  const auto mixture = sim::random_planted_mixture(spec.num_components, spec.num_labels, rng);
  auto planted = sim::plant_mixture_ground_truth(spec.num_instances, mixture, rng);
  ingest::LabeledDataset ds;
  ds.descriptor.name = spec.str();
  ds.descriptor.num_instances = spec.num_instances;
  ds.descriptor.num_labels = spec.num_labels;
  for (std::size_t j = 0; j < spec.num_labels; ++j) {
    ds.descriptor.label_names.push_back("label" + std::to_string(j));
  }
  ds.labels = std::move(planted.labels);
  return ds;
}

json to_json(const metrics::EvalReport& report) {
  json doc;
  doc["f1_micro"] = report.f1.micro;
  doc["f1_macro"] = report.f1.macro;
  doc["f1_example"] = report.f1.example;
  doc["kl"] = report.kl_labelsets ? json(*report.kl_labelsets) : json(nullptr);
  doc["recovery"] = report.type_recovery_rate ? json(*report.type_recovery_rate) : json(nullptr);
  return doc;
}

json to_json(const EvalRow& row) {
  json doc = to_json(row.report);
  doc["model"] = to_string(row.key.model);
  doc["R"] = row.key.ratio.str();
  doc["T"] = row.key.annotations_per_annotator;
  doc["L"] = row.key.num_annotators;
  doc["K"] = row.key.num_components;
  doc["seed"] = row.key.seed;
  return doc;
}

std::string csv_header() {
  return "model,R,T,L,K,seed,f1_micro,f1_macro,f1_example,kl,recovery";
}

std::string csv_row(const EvalRow& row) {
  std::ostringstream out;
  out << std::setprecision(10) << to_string(row.key.model) << ',' << row.key.ratio.str() << ','
      << row.key.annotations_per_annotator << ',' << row.key.num_annotators << ','
      << row.key.num_components << ',' << row.key.seed << ',' << row.report.f1.micro << ','
      << row.report.f1.macro << ',' << row.report.f1.example << ','
      << format_optional(row.report.kl_labelsets) << ','
      << format_optional(row.report.type_recovery_rate);
  return out.str();
}

std::vector<EvalRow> run_pipeline(const LabelMatrix& truth, const std::vector<ModelTag>& models,
                                  const sim::Ratio& ratio, std::size_t annotations_per_annotator,
                                  std::size_t num_annotators, std::size_t num_components,
                                  std::uint64_t seed, const RunSettings& settings) {
  sim::SimConfig sim_cfg{ratio, annotations_per_annotator, num_annotators, seed};
  const auto profiles = sim::sample_annotator_pool(sim_cfg, truth.cols);
  const auto y = sim::generate_annotations(truth, profiles, annotations_per_annotator, seed);
  std::vector<EvalRow> rows;
  for (const auto model : models) {
    FitRequest request;
    request.model = model;
    request.num_components = num_components;
    request.overrides = settings.overrides;
    request.eta = settings.eta;
    request.max_iter = settings.max_iter;
    request.restarts = settings.restarts;
    request.seed = seed;
    const auto output = run_fit(y, request);
    EvalRow row;
    row.key = {model, ratio, annotations_per_annotator, num_annotators, num_components, seed};
    row.report = evaluate(truth, output, &profiles);
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepAxis parse_axis(const std::string& text) {
  if (text == "R") return SweepAxis::Ratio;
  if (text == "T") return SweepAxis::T;
  if (text == "K") return SweepAxis::K;
  if (text == "L") return SweepAxis::L;
  throw std::invalid_argument("sweep axis must be one of R, T, K, L; got '" + text + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Ratio: return "R";
    case SweepAxis::T: return "T";
    case SweepAxis::K: return "K";
    case SweepAxis::L: return "L";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  if (models.empty()) throw std::invalid_argument("sweep needs at least one model");
  for (const auto& value : grid) {
    if (axis == SweepAxis::Ratio) {
      sim::Ratio::parse(value);
    } else if (parse_count(value, "grid value") == 0) {
      throw std::invalid_argument("grid values must be positive");
    }
  }
}

std::vector<EvalRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t points = spec.grid.size();
  const std::size_t seeds = spec.seeds.size();
  // results[point][seed] holds one row per model.
  std::vector<std::vector<std::vector<EvalRow>>> results(
      points, std::vector<std::vector<EvalRow>>(seeds));

  auto run_task = [&](std::size_t task) {
    const std::size_t g = task / seeds;
    const std::size_t s = task % seeds;
    sim::Ratio ratio = spec.ratio;
    std::size_t t = spec.annotations_per_annotator;
    std::size_t l = spec.num_annotators;
    std::size_t k = spec.num_components;
    switch (spec.axis) {
      case SweepAxis::Ratio: ratio = sim::Ratio::parse(spec.grid[g]); break;
      case SweepAxis::T: t = parse_count(spec.grid[g], "T"); break;
      case SweepAxis::K: k = parse_count(spec.grid[g], "K"); break;
      case SweepAxis::L: l = parse_count(spec.grid[g], "L"); break;
    }
    results[g][s] = run_pipeline(spec.truth, spec.models, ratio, t, l, k, spec.seeds[s] + g,
                                 spec.settings);
  };

  const std::size_t tasks = points * seeds;
  const std::size_t workers = std::clamp<std::size_t>(spec.workers, 1, tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      try {
        run_task(task);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EvalRow> rows;
  rows.reserve(tasks * spec.models.size());
  for (std::size_t g = 0; g < points; ++g) {
    for (std::size_t m = 0; m < spec.models.size(); ++m) {
      for (std::size_t s = 0; s < seeds; ++s) rows.push_back(results[g][s][m]);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<EvalRow>& rows) {
  out << "# sweep axis=" << to_string(spec.axis) << " grid=";
  for (std::size_t g = 0; g < spec.grid.size(); ++g) out << (g ? ";" : "") << spec.grid[g];
  out << " truth=" << spec.truth_description << " N=" << spec.truth.rows
      << " C=" << spec.truth.cols << " R=" << spec.ratio.str()
      << " T=" << spec.annotations_per_annotator << " L=" << spec.num_annotators
      << " K=" << spec.num_components << " eta=" << spec.settings.eta
      << " max_iter=" << spec.settings.max_iter << " seeds=";
  for (std::size_t s = 0; s < spec.seeds.size(); ++s) out << (s ? ";" : "") << spec.seeds[s];
  out << " run_seed=seed+grid_index\n";
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
}

std::vector<ComponentRow> report_components(const MixtureEstimate& mixture) {
  std::vector<ComponentRow> rows;
  for (std::size_t k = 0; k < mixture.pi.size(); ++k) {
    const auto tau = mixture.tau.row(k);
    rows.push_back({k, mixture.pi[k], {tau.begin(), tau.end()}});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComponentRow& x, const ComponentRow& y) {
    return x.proportion > y.proportion;
  });
  return rows;
}

}  // namespace mlagg::experiments
