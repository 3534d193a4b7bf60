#include "budgetreg/experiment_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "budgetreg/ingest.hpp"

namespace budgetreg {

namespace {

using nlohmann::json;

double as_number(const json& v) {
  if (!v.is_number()) throw std::invalid_argument("expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, std::size_t minimum) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(minimum)) {
    throw std::invalid_argument("expected an integer >= " + std::to_string(minimum));
  }
  return v.get<std::size_t>();
}

std::uint64_t as_seed(const json& v) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw std::invalid_argument("expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v) {
  if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw std::invalid_argument("expected a string");
  return v.get<std::string>();
}

double as_fraction(const json& v) {
  const double x = as_number(v);
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("expected a value in (0, 1)");
  return x;
}

template <typename T, typename F>
std::vector<T> as_list(const json& v, F element) {
  if (!v.is_array() || v.empty()) throw std::invalid_argument("expected a non-empty array");
  std::vector<T> out;
  for (const json& item : v) out.push_back(element(item));
  return out;
}

using Handler = std::function<void(const json&, ExperimentConfig&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"algorithms",
       [](const json& v, ExperimentConfig& c) {
         c.algorithms = as_list<Algorithm>(v, [](const json& item) {
           return parse_algorithm(as_string(item));
         });
       }},
      {"data_csv", [](const json& v, ExperimentConfig& c) { c.data_csv = as_string(v); }},
      {"csv_header", [](const json& v, ExperimentConfig& c) { c.csv_header = as_bool(v); }},
      {"label_column",
       [](const json& v, ExperimentConfig& c) { c.label_column = as_count(v, 0); }},
      {"positive_class",
       [](const json& v, ExperimentConfig& c) { c.positive_class = as_number(v); }},
      {"keep_labels",
       [](const json& v, ExperimentConfig& c) { c.keep_labels = as_list<double>(v, as_number); }},
      {"dim", [](const json& v, ExperimentConfig& c) { c.dim = as_count(v, 1); }},
      {"alpha",
       [](const json& v, ExperimentConfig& c) {
         c.alpha = as_number(v);
         if (c.alpha > 0.0) throw std::invalid_argument("alpha must be <= 0");
       }},
      {"regime", [](const json& v, ExperimentConfig& c) { c.regime = parse_regime(as_string(v)); }},
      {"m_total", [](const json& v, ExperimentConfig& c) { c.m_total = as_count(v, 2); }},
      {"data_seed", [](const json& v, ExperimentConfig& c) { c.data_seed = as_seed(v); }},
      {"bound",
       [](const json& v, ExperimentConfig& c) {
         c.bound = as_number(v);
         if (!(*c.bound > 0.0)) throw std::invalid_argument("bound must be positive");
       }},
      {"k", [](const json& v, ExperimentConfig& c) { c.k = as_count(v, 1); }},
      {"budget_split", [](const json& v, ExperimentConfig& c) { c.budget_split = as_fraction(v); }},
      {"repeats", [](const json& v, ExperimentConfig& c) { c.repeats = as_count(v, 1); }},
      {"prefixes",
       [](const json& v, ExperimentConfig& c) {
         c.prefixes = as_list<std::size_t>(v, [](const json& item) { return as_count(item, 1); });
       }},
      {"folds", [](const json& v, ExperimentConfig& c) { c.folds = as_count(v, 2); }},
      {"eta_grid",
       [](const json& v, ExperimentConfig& c) {
         c.eta_grid = as_list<double>(v, [](const json& item) {
           const double eta = as_number(item);
           if (!(eta > 0.0)) throw std::invalid_argument("eta values must be positive");
           return eta;
         });
       }},
      {"eta_mode",
       [](const json& v, ExperimentConfig& c) {
         const std::string mode = as_string(v);
         if (mode == "cv") {
           c.eta_mode = EtaMode::cross_validation;
         } else if (mode == "theory") {
           c.eta_mode = EtaMode::theory;
         } else {
           throw std::invalid_argument("expected \"cv\" or \"theory\"");
         }
       }},
      {"m1_fraction", [](const json& v, ExperimentConfig& c) { c.m1_fraction = as_fraction(v); }},
      {"test_fraction",
       [](const json& v, ExperimentConfig& c) { c.test_fraction = as_fraction(v); }},
      {"delta", [](const json& v, ExperimentConfig& c) { c.delta = as_fraction(v); }},
      {"epsilon_override",
       [](const json& v, ExperimentConfig& c) {
         if (v.is_null()) {
           c.epsilon_override.reset();
           return;
         }
         c.epsilon_override = as_number(v);
         if (*c.epsilon_override < 0.0) throw std::invalid_argument("must be >= 0 or null");
       }},
      {"q_floor",
       [](const json& v, ExperimentConfig& c) {
         c.q_floor = as_number(v);
         if (c.q_floor < 0.0) throw std::invalid_argument("must be >= 0");
       }},
      {"p_mode",
       [](const json& v, ExperimentConfig& c) {
         const std::string mode = as_string(v);
         if (mode == "standard") {
           c.p_mode = InnerProductMode::standard;
         } else if (mode == "improved") {
           c.p_mode = InnerProductMode::improved;
         } else {
           throw std::invalid_argument("expected \"standard\" or \"improved\"");
         }
       }},
      {"erm_passes", [](const json& v, ExperimentConfig& c) { c.erm_passes = as_count(v, 1); }},
      {"seed", [](const json& v, ExperimentConfig& c) { c.seed = as_seed(v); }},
  };
  return table;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig config;
  std::vector<std::string> problems;
  for (const auto& [key, value] : doc.items()) {
    const auto it = handlers().find(key);
    if (it == handlers().end()) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    if (value.is_object() ||
        (value.is_array() && std::any_of(value.begin(), value.end(), [](const json& item) {
           return item.is_structured();
         }))) {
      problems.push_back(key + ": nested values are not allowed");
      continue;
    }
    try {
      it->second(value, config);
    } catch (const std::exception& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  if (!doc.contains("algorithms")) problems.push_back("algorithms: required");
  if (!doc.contains("prefixes")) problems.push_back("prefixes: required");
  if (config.eta_mode == EtaMode::cross_validation && !doc.contains("eta_grid")) {
    problems.push_back("eta_grid: required when eta_mode is \"cv\"");
  }
  if (!config.algorithms.empty()) {
    const Regime regime = algorithm_regime(config.algorithms.front());
    for (Algorithm a : config.algorithms) {
      if (algorithm_regime(a) != regime) {
        problems.push_back("algorithms: ridge and lasso algorithms cannot share an experiment");
        break;
      }
    }
    if (!config.data_csv && doc.contains("regime") && config.regime != regime) {
      problems.push_back("regime: does not match the algorithms");
    }
    if (!doc.contains("regime")) config.regime = regime;
  }
  if (config.data_csv && !config.bound) problems.push_back("bound: required with data_csv");
  if (!problems.empty()) {
    std::string message = "invalid config:";
    for (const std::string& p : problems) message += "\n  " + p;
    throw std::invalid_argument(message);
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return parse_experiment_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  json names = json::array();
  for (Algorithm a : c.algorithms) names.push_back(algorithm_name(a));
  doc["algorithms"] = names;
  if (c.data_csv) {
    doc["data_csv"] = *c.data_csv;
    doc["csv_header"] = c.csv_header;
    if (c.label_column) doc["label_column"] = *c.label_column;
    if (c.positive_class) doc["positive_class"] = *c.positive_class;
    if (c.keep_labels) doc["keep_labels"] = *c.keep_labels;
  } else {
    doc["dim"] = c.dim;
    doc["alpha"] = c.alpha;
    doc["m_total"] = c.m_total;
    doc["data_seed"] = c.data_seed;
  }
  doc["regime"] = to_string(c.regime);
  if (c.bound) doc["bound"] = *c.bound;
  doc["k"] = c.k;
  doc["budget_split"] = c.budget_split;
  doc["repeats"] = c.repeats;
  doc["prefixes"] = c.prefixes;
  doc["folds"] = c.folds;
  doc["eta_grid"] = c.eta_grid;
  doc["eta_mode"] = c.eta_mode == EtaMode::theory ? "theory" : "cv";
  doc["m1_fraction"] = c.m1_fraction;
  doc["test_fraction"] = c.test_fraction;
  doc["delta"] = c.delta;
  doc["epsilon_override"] = c.epsilon_override ? json(*c.epsilon_override) : json(nullptr);
  doc["q_floor"] = c.q_floor;
  doc["p_mode"] = c.p_mode == InnerProductMode::improved ? "improved" : "standard";
  doc["erm_passes"] = c.erm_passes;
  doc["seed"] = c.seed;
  return doc;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::ostringstream records;
  records << "algorithm,seed,m,attributes_observed,relative_loss\n";
  for (const RunRecord& r : result.records) {
    records << algorithm_name(r.algorithm) << ',' << r.seed << ',' << r.m << ','
            << r.attributes_observed << ',' << format_number(r.test_relative_loss) << '\n';
  }
  write_text(dir / "records.csv", records.str());

  for (const LearningCurve& curve : result.curves) {
    std::ostringstream out;
    out << "attributes_observed,mean,std\n";
    for (const CurvePoint& p : curve.points) {
      out << format_number(p.attributes_observed) << ',' << format_number(p.mean) << ','
          << format_number(p.stddev) << '\n';
    }
    write_text(dir / ("curve_" + algorithm_name(curve.algorithm) + ".csv"), out.str());
  }

  json summary;
  summary["config"] = config_to_json(config);
  summary["bound"] = result.bound;
  summary["dim"] = result.dim;
  summary["train_size"] = result.train_size;
  summary["test_size"] = result.test_size;
  summary["test_rescaled"] = result.test_rescaled;
  json etas = json::array();
  for (const auto& [key, eta] : result.etas) {
    etas.push_back({{"algorithm", algorithm_name(key.first)}, {"m", key.second}, {"eta", eta}});
  }
  summary["selected_eta"] = etas;
  json curves = json::object();
  for (const LearningCurve& curve : result.curves) {
    json points = json::array();
    for (const CurvePoint& p : curve.points) {
      points.push_back({{"m", p.m},
                        {"attributes_observed", p.attributes_observed},
                        {"mean", p.mean},
                        {"std", p.stddev}});
    }
    curves[algorithm_name(curve.algorithm)] = points;
  }
  summary["curves"] = curves;
  write_text(dir / "summary.json", dump_json(summary));
}

json model_to_json(const ModelRecord& model) {
  json doc;
  doc["algorithm"] = algorithm_name(model.algorithm);
  doc["regime"] = to_string(model.predictor.regime);
  doc["B"] = model.predictor.norm_bound;
  doc["seed"] = model.seed;
  doc["attributes_observed"] = model.attributes_observed;
  doc["eta"] = model.eta;
  doc["weights"] = model.predictor.weights;
  return doc;
}

ModelRecord model_from_json(const json& doc) {
  ModelRecord model;
  try {
    model.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
    model.predictor.regime = parse_regime(doc.at("regime").get<std::string>());
    model.predictor.norm_bound = doc.at("B").get<double>();
    model.predictor.weights = doc.at("weights").get<std::vector<double>>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.attributes_observed = doc.at("attributes_observed").get<std::size_t>();
    model.eta = doc.at("eta").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid model file: ") + e.what());
  }
  return model;
}

}  // namespace budgetreg
