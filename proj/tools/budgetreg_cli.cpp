#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "budgetreg/core.hpp"
#include "budgetreg/datagen.hpp"
#include "budgetreg/experiment_io.hpp"
#include "budgetreg/harness.hpp"
#include "budgetreg/ingest.hpp"

namespace fs = std::filesystem;
using budgetreg::Regime;
using nlohmann::json;

namespace {

struct CsvOptions {
  bool header = false;
  std::optional<std::size_t> label_column;
  std::optional<double> positive_class;
  std::vector<double> keep;
};

void add_csv_options(CLI::App* cmd, CsvOptions& opts) {
  cmd->add_flag("--header", opts.header, "First CSV row is a header");
  cmd->add_option("--label-column", opts.label_column, "Zero-based label column (default: last)");
  cmd->add_option("--positive", opts.positive_class, "Binarize labels: this class maps to +1");
  cmd->add_option("--keep", opts.keep, "With --positive, keep only rows with these labels");
}

budgetreg::Dataset load(const std::string& path, const CsvOptions& opts) {
  budgetreg::Dataset ds = budgetreg::load_csv(path, opts.header, opts.label_column);
  if (opts.positive_class) {
    std::optional<std::vector<double>> keep;
    if (!opts.keep.empty()) keep = opts.keep;
    ds = budgetreg::binarize_labels(ds, *opts.positive_class, keep);
  }
  return ds;
}

fs::path sidecar_path(const fs::path& data) { return fs::path(data.string() + ".json"); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::optional<Regime> sidecar_regime(const fs::path& data) {
  const fs::path meta = sidecar_path(data);
  if (!fs::exists(meta)) return std::nullopt;
  std::ifstream in(meta);
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("regime") || !doc["regime"].is_string()) {
    return std::nullopt;
  }
  return budgetreg::parse_regime(doc["regime"].get<std::string>());
}

int cmd_generate(std::size_t dim, double alpha, const std::string& regime_text, std::size_t m,
                 std::uint64_t seed, const std::string& out) {
  const Regime regime = budgetreg::parse_regime(regime_text);
  const budgetreg::SyntheticData data = budgetreg::generate_synthetic(dim, alpha, regime, m, seed);
  std::ostringstream csv;
  budgetreg::write_csv(data.dataset, csv);
  write_file(out, csv.str());
  json meta;
  meta["dim"] = dim;
  meta["alpha"] = alpha;
  meta["regime"] = budgetreg::to_string(regime);
  meta["m"] = m;
  meta["seed"] = seed;
  meta["u"] = data.means;
  meta["w_star"] = data.target_weights;
  write_file(sidecar_path(out), budgetreg::dump_json(meta));
  return 0;
}

int cmd_ratios(const std::string& path, const std::string& regime_text, const CsvOptions& opts) {
  const Regime regime = budgetreg::parse_regime(regime_text);
  budgetreg::Dataset ds = load(path, opts);
  if (!budgetreg::inside_unit_ball(ds, regime)) ds = budgetreg::normalize(ds, regime);
  const budgetreg::MomentSummary s =
      budgetreg::summarize_moments(budgetreg::dataset_moments(ds.examples));
  json doc;
  doc["d"] = s.dim;
  doc["half_norm"] = s.half_norm;
  doc["l1_norm"] = s.l1;
  doc["linf_norm"] = s.linf;
  doc["rho_ridge"] = s.rho_ridge;
  doc["rho_lasso"] = s.rho_lasso;
  std::cout << budgetreg::dump_json(doc);
  return 0;
}

struct TrainArgs {
  std::string algo;
  std::string data;
  std::optional<std::string> test;
  std::optional<std::string> regime;
  std::size_t k = 4;
  double bound = 1.0;
  std::optional<double> eta;
  bool eta_auto = false;
  std::optional<double> budget_split;
  double delta = 0.1;
  double m1_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string out_model;
  CsvOptions csv;
};

int cmd_train(const TrainArgs& args) {
  const budgetreg::Algorithm algo = budgetreg::parse_algorithm(args.algo);
  const Regime regime = budgetreg::algorithm_regime(algo);
  if (args.regime && budgetreg::parse_regime(*args.regime) != regime) {
    throw std::invalid_argument(args.algo + " requires " + budgetreg::to_string(regime) + " data");
  }
  if (const auto meta = sidecar_regime(args.data); meta && *meta != regime) {
    throw std::invalid_argument(args.algo + " requires " + budgetreg::to_string(regime) +
                                " data but " + args.data + " was generated for " +
                                budgetreg::to_string(*meta));
  }
  if (budgetreg::uses_step_size(algo) && !args.eta && !args.eta_auto) {
    throw std::invalid_argument("one of --eta or --eta-auto is required");
  }

  budgetreg::Dataset train = load(args.data, args.csv);
  std::optional<budgetreg::Dataset> test;
  if (args.test) test = load(*args.test, args.csv);
  if (!budgetreg::inside_unit_ball(train, regime)) {
    const budgetreg::Normalizer normalizer = budgetreg::Normalizer::fit(train, regime);
    train = normalizer.apply(train).dataset;
    if (test) test = normalizer.apply(*test).dataset;
  }
  train.regime = regime;
  budgetreg::validate_dataset(train, args.bound);

  budgetreg::TrainParams params;
  params.bound = args.bound;
  params.k = args.k;
  params.budget_split = args.budget_split;
  params.delta = args.delta;
  params.m1_fraction = args.m1_fraction;
  if (!args.eta_auto) params.eta = args.eta;
  params.known_moments = budgetreg::dataset_moments(train.examples);
  const budgetreg::TrainOutcome outcome =
      budgetreg::train_model(algo, train.examples, params, args.seed);

  budgetreg::ModelRecord model;
  model.algorithm = algo;
  model.predictor = outcome.result.predictor;
  model.seed = args.seed;
  model.attributes_observed = outcome.result.attributes_consumed;
  model.eta = outcome.eta;
  write_file(args.out_model, budgetreg::dump_json(budgetreg::model_to_json(model)));

  json report;
  report["attributes_observed"] = model.attributes_observed;
  report["eta"] = model.eta;
  if (test) {
    report["test_relative_loss"] =
        budgetreg::relative_loss(model.predictor.weights, test->examples);
  }
  std::cout << budgetreg::dump_json(report);
  return 0;
}

int cmd_experiment(const std::string& config_path, const fs::path& out_dir, bool force,
                   std::size_t workers) {
  const budgetreg::ExperimentConfig config = budgetreg::load_experiment_config(config_path);
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force) {
    throw std::runtime_error(out_dir.string() + " is not empty (use --force to overwrite)");
  }
  const budgetreg::ExperimentResult result = budgetreg::run_experiment(config, workers);
  budgetreg::write_experiment_outputs(config, result, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-efficient ridge and lasso regression"};
  app.require_subcommand(1);

  std::size_t gen_dim = 0;
  double gen_alpha = 0.0;
  std::string gen_regime;
  std::size_t gen_m = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic power-law dataset");
  generate->add_option("--dim", gen_dim, "Number of attributes")->required()->check(CLI::PositiveNumber);
  generate->add_option("--alpha", gen_alpha, "Power-law exponent (<= 0)")
      ->required()
      ->check(CLI::Range(-1e300, 0.0));
  generate->add_option("--regime", gen_regime, "l2 or linf")
      ->required()
      ->check(CLI::IsMember({"l2", "linf"}));
  generate->add_option("--m", gen_m, "Number of examples")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "Random seed");
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  std::string ratios_data;
  std::string ratios_regime;
  CsvOptions ratios_csv;
  CLI::App* ratios = app.add_subcommand("ratios", "Print moment norms and improvement ratios");
  ratios->add_option("--data", ratios_data, "CSV dataset")->required()->check(CLI::ExistingFile);
  ratios->add_option("--regime", ratios_regime, "l2 or linf")
      ->required()
      ->check(CLI::IsMember({"l2", "linf"}));
  add_csv_options(ratios, ratios_csv);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a single model");
  train->add_option("--algo", train_args.algo, "Algorithm name")->required();
  train->add_option("--data", train_args.data, "Training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--test", train_args.test, "Test CSV")->check(CLI::ExistingFile);
  train->add_option("--regime", train_args.regime, "Expected data regime")
      ->check(CLI::IsMember({"l2", "linf"}));
  train->add_option("--k", train_args.k, "Attribute budget minus one")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 40));
  train->add_option("--b", train_args.bound, "Predictor norm bound B")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* eta = train->add_option("--eta", train_args.eta, "Step size")->check(CLI::PositiveNumber);
  auto* eta_auto = train->add_flag("--eta-auto", train_args.eta_auto, "Use the theoretical step size");
  eta->excludes(eta_auto);
  train->add_option("--budget-split", train_args.budget_split,
                    "Fraction of the budget used for point estimation")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--delta", train_args.delta, "Two-phase confidence parameter");
  train->add_option("--m1-fraction", train_args.m1_fraction, "Two-phase phase-1 share");
  train->add_option("--seed", train_args.seed, "Random seed");
  train->add_option("--out-model", train_args.out_model, "Model JSON path")->required();
  add_csv_options(train, train_args.csv);

  std::string exp_config;
  std::string exp_out;
  bool exp_force = false;
  std::size_t exp_workers = 0;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a comparative experiment");
  experiment->add_option("--config", exp_config, "Flat JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", exp_out, "Output directory")->required();
  experiment->add_flag("--force", exp_force, "Overwrite a non-empty output directory");
  experiment->add_option("--workers", exp_workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*generate) return cmd_generate(gen_dim, gen_alpha, gen_regime, gen_m, gen_seed, gen_out);
    if (*ratios) return cmd_ratios(ratios_data, ratios_regime, ratios_csv);
    if (*train) return cmd_train(train_args);
    if (*experiment) return cmd_experiment(exp_config, exp_out, exp_force, exp_workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
