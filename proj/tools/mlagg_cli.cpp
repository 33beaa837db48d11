// Command-line driver: simulate annotations, fit aggregation models, evaluate
// results and run parameter sweeps that emit plot-ready CSV.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlagg/experiments.hpp"
#include "mlagg/ingest.hpp"
#include "mlagg/math.hpp"
#include "mlagg/simulate.hpp"

namespace {

using namespace mlagg;
namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TruthOptions {
  std::string dataset;
  std::string labels_file;
  std::string planted;
  std::uint64_t planted_seed = 0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--dataset", dataset, "Label matrix CSV, or ARFF file with --labels-file");
    cmd.add_option("--labels-file", labels_file, "Label names (one per line) for an ARFF dataset");
    cmd.add_option("--planted", planted, "Planted-mixture truth N,C,K instead of a dataset");
    cmd.add_option("--planted-seed", planted_seed, "Seed of the planted mixture");
  }

  ingest::LabeledDataset load() const {
    if (!planted.empty()) {
      if (!dataset.empty()) throw UsageError("--dataset and --planted are mutually exclusive");
      return experiments::make_planted_dataset(
          experiments::PlantedSpec::parse(planted, planted_seed));
    }
    if (dataset.empty()) throw UsageError("one of --dataset or --planted is required");
    std::optional<fs::path> labels;
    if (!labels_file.empty()) labels = labels_file;
    return ingest::load_dataset(dataset, labels);
  }

  std::string describe() const {
    return planted.empty() ? dataset
                           : experiments::PlantedSpec::parse(planted, planted_seed).str();
  }
};

struct PriorOptions {
  std::optional<double> a, b, alpha, beta, gamma;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--a", a, "Override annotator prior a");
    cmd.add_option("--b", b, "Override annotator prior b");
    cmd.add_option("--alpha", alpha, "Override label prior alpha (default 0.06)");
    cmd.add_option("--beta", beta, "Override label prior beta (default 0.84)");
    cmd.add_option("--gamma", gamma, "Override Dirichlet prior gamma (default 1/K)");
  }

  experiments::PriorOverrides get() const { return {a, b, alpha, beta, gamma}; }
};

template <typename Fn>
void with_output(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write(out);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label crowdsourced annotation aggregation"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate heterogeneous annotators");
  TruthOptions sim_truth;
  sim_truth.add_to(*simulate);
  std::string sim_ratio = "1:1:1";
  std::size_t sim_t = 5;
  std::size_t sim_l = 900;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_profiles, sim_truth_out;
  simulate->add_option("-R,--ratio", sim_ratio, "Reliable:normal:random ratio");
  simulate->add_option("-T", sim_t, "Annotations per annotator");
  simulate->add_option("-L", sim_l, "Number of annotators");
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out", sim_out, "Annotation CSV to write")->required();
  simulate->add_option("--profiles", sim_profiles,
                       "Profiles CSV to write (default: <out>.profiles.csv)");
  simulate->add_option("--truth-out", sim_truth_out, "Also write the ground-truth label CSV");

  // fit
  auto* fit = app.add_subcommand("fit", "Aggregate annotations with mv, bnc or bmmb");
  std::string fit_model = "bmmb";
  std::string fit_annotations, fit_out;
  std::optional<std::size_t> fit_n, fit_l;
  std::size_t fit_k = 6;
  double fit_eta = 1e-4;
  std::size_t fit_max_iter = 500;
  std::optional<std::size_t> fit_restarts;
  std::uint64_t fit_seed = 0;
  PriorOptions fit_priors;
  fit->add_option("--model", fit_model, "mv, bnc or bmmb");
  fit->add_option("--annotations", fit_annotations, "Annotation CSV")->required();
  fit->add_option("-N,--num-instances", fit_n, "Number of instances (default: max id + 1)");
  fit->add_option("-L", fit_l, "Number of annotators (default: max id + 1)");
  fit->add_option("-K", fit_k, "Mixture components (bmmb)");
  fit->add_option("--eta", fit_eta, "Relative ELBO improvement threshold");
  fit->add_option("--max-iter", fit_max_iter, "Maximum sweeps");
  fit->add_option("--restarts", fit_restarts, "Random restarts (default 3 for bmmb, 1 for bnc)");
  fit->add_option("--seed", fit_seed, "Random seed");
  fit->add_option("--out", fit_out, "Result JSON (default: stdout)");
  fit_priors.add_to(*fit);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a fit result against the ground truth");
  TruthOptions eval_truth;
  eval_truth.add_to(*eval);
  std::string eval_result, eval_profiles, eval_out;
  eval->add_option("--result", eval_result, "Result JSON from 'fit'")->required();
  eval->add_option("--profiles", eval_profiles, "Profiles CSV from 'simulate'");
  eval->add_option("--out", eval_out, "Report JSON (default: stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Sweep one of R, T, K, L and emit CSV rows");
  TruthOptions sweep_truth;
  sweep_truth.add_to(*sweep);
  std::string sweep_models = "mv,bnc,bmmb";
  std::string sweep_axis = "K";
  std::string sweep_grid;
  std::string sweep_ratio = "1:1:1";
  std::size_t sweep_t = 5, sweep_l = 900, sweep_k = 6;
  std::string sweep_seeds = "0";
  double sweep_eta = 1e-4;
  std::size_t sweep_max_iter = 500;
  std::optional<std::size_t> sweep_restarts;
  std::size_t sweep_workers = 1;
  std::string sweep_out;
  PriorOptions sweep_priors;
  sweep->add_option("--models", sweep_models, "Comma-separated subset of mv,bnc,bmmb");
  sweep->add_option("--axis", sweep_axis, "Swept parameter: R, T, K or L");
  sweep->add_option("--grid", sweep_grid, "Comma-separated grid values (ratios as a:b:c)")
      ->required();
  sweep->add_option("-R,--ratio", sweep_ratio, "Fixed ratio");
  sweep->add_option("-T", sweep_t, "Fixed annotations per annotator");
  sweep->add_option("-L", sweep_l, "Fixed number of annotators");
  sweep->add_option("-K", sweep_k, "Fixed number of mixture components");
  sweep->add_option("--seeds", sweep_seeds, "Comma-separated base seeds");
  sweep->add_option("--eta", sweep_eta, "Relative ELBO improvement threshold");
  sweep->add_option("--max-iter", sweep_max_iter, "Maximum sweeps");
  sweep->add_option("--restarts", sweep_restarts, "Random restarts for bmmb");
  sweep->add_option("--workers", sweep_workers, "Concurrent runs");
  sweep->add_option("--out", sweep_out, "CSV output (default: stdout)");
  sweep_priors.add_to(*sweep);

  // report-components
  auto* report = app.add_subcommand("report-components",
                                    "List fitted mixture components by mixing proportion");
  std::string report_result, report_out;
  report->add_option("--result", report_result, "bmmb result JSON")->required();
  report->add_option("--out", report_out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) {
      const auto truth = sim_truth.load();
      sim::SimConfig cfg{sim::Ratio::parse(sim_ratio), sim_t, sim_l, sim_seed};
      const auto profiles = sim::sample_annotator_pool(cfg, truth.labels.cols);
      const auto y = sim::generate_annotations(truth.labels, profiles, sim_t, sim_seed);
      ingest::write_annotations(y, sim_out);
      experiments::write_profiles(sim_profiles.empty() ? sim_out + ".profiles.csv" : sim_profiles,
                                  profiles);
      if (!sim_truth_out.empty()) {
        ingest::write_label_matrix_csv(sim_truth_out, truth.descriptor.label_names, truth.labels);
      }
      std::cerr << "wrote " << y.size() << " annotations from " << profiles.size()
                << " annotators over " << truth.labels.rows << " instances\n";
    } else if (*fit) {
      ingest::AnnotationShape shape;
      shape.num_instances = fit_n;
      shape.num_annotators = fit_l;
      const auto y = ingest::read_annotations(fit_annotations, shape);
      experiments::FitRequest request;
      request.model = parse_model_tag(fit_model);
      if (fit_k < 1) throw UsageError("-K must be >= 1");
      request.num_components = fit_k;
      request.overrides = fit_priors.get();
      request.eta = fit_eta;
      request.max_iter = fit_max_iter;
      request.restarts = fit_restarts;
      request.seed = fit_seed;
      const auto output = experiments::run_fit(y, request);
      with_output(fit_out, [&](std::ostream& out) {
        out << std::setprecision(17) << experiments::to_json(output).dump(1) << '\n';
      });
    } else if (*eval) {
      const auto truth = eval_truth.load();
      std::ifstream in(eval_result);
      if (!in) throw DataError("cannot open '" + eval_result + "'");
      experiments::json doc;
      try {
        in >> doc;
      } catch (const experiments::json::exception& e) {
        throw DataError("result file is not valid JSON: " + std::string(e.what()));
      }
      const auto output = experiments::fit_output_from_json(doc);
      if (output.predictions.rows != truth.labels.rows ||
          output.predictions.cols != truth.labels.cols) {
        throw DataError("result is " + std::to_string(output.predictions.rows) + "x" +
                        std::to_string(output.predictions.cols) + " but truth is " +
                        std::to_string(truth.labels.rows) + "x" +
                        std::to_string(truth.labels.cols));
      }
      std::optional<std::vector<sim::AnnotatorProfile>> profiles;
      if (!eval_profiles.empty()) profiles = experiments::read_profiles(eval_profiles);
      const auto report =
          experiments::evaluate(truth.labels, output, profiles ? &*profiles : nullptr);
      auto doc_out = experiments::to_json(report);
      doc_out["model"] = to_string(output.model);
      with_output(eval_out, [&](std::ostream& out) { out << doc_out.dump(1) << '\n'; });
    } else if (*sweep) {
      experiments::SweepSpec spec;
      const auto truth = sweep_truth.load();
      spec.truth = truth.labels;
      spec.truth_description = sweep_truth.describe();
      spec.models.clear();
      for (const auto& m : split_list(sweep_models)) spec.models.push_back(parse_model_tag(m));
      spec.axis = experiments::parse_axis(sweep_axis);
      spec.grid = split_list(sweep_grid);
      spec.ratio = sim::Ratio::parse(sweep_ratio);
      spec.annotations_per_annotator = sweep_t;
      spec.num_annotators = sweep_l;
      spec.num_components = sweep_k;
      spec.seeds.clear();
      for (const auto& s : split_list(sweep_seeds)) spec.seeds.push_back(std::stoull(s));
      spec.settings.eta = sweep_eta;
      spec.settings.max_iter = sweep_max_iter;
      spec.settings.restarts = sweep_restarts;
      spec.settings.overrides = sweep_priors.get();
      spec.workers = sweep_workers;
      const auto rows = experiments::run_sweep(spec);
      with_output(sweep_out,
                  [&](std::ostream& out) { experiments::write_sweep_csv(out, spec, rows); });
    } else if (*report) {
      std::ifstream in(report_result);
      if (!in) throw DataError("cannot open '" + report_result + "'");
      experiments::json doc;
      try {
        in >> doc;
      } catch (const experiments::json::exception& e) {
        throw DataError("result file is not valid JSON: " + std::string(e.what()));
      }
      const auto output = experiments::fit_output_from_json(doc);
      if (!output.fit || !output.fit->mixture) {
        throw DataError("report-components needs a bmmb result");
      }
      const auto rows = experiments::report_components(*output.fit->mixture);
      with_output(report_out, [&](std::ostream& out) {
        out << "component,proportion";
        for (std::size_t j = 0; j < output.num_labels; ++j) out << ",tau_" << j;
        out << '\n' << std::setprecision(10);
        for (const auto& row : rows) {
          out << row.component << ',' << row.proportion;
          for (double t : row.tau) out << ',' << t;
          out << '\n';
        }
      });
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
