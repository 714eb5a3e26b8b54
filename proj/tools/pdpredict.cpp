// pdpredict: command-line front end for the prediction pipeline.
//
//   pdpredict generate   --out cohort.csv [--seed N] [--separation S] ...
//   pdpredict validate   --input cohort.csv
//   pdpredict train      --input cohort.csv --model boostlr --out dir
//   pdpredict evaluate   --input cohort.csv --model-file dir/model.json
//   pdpredict roc        --input cohort.csv --model-file dir/model.json --out prefix
//   pdpredict report     --input report.csv [--format text|csv]
//   pdpredict experiment [--config cfg.json] [--input f | --generate] [--seed N] ...
//
// Exit codes: 0 success, 1 data error, 2 config error. Errors are printed as
// one JSON object per line on stderr.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdpredict/pdpredict.hpp"

namespace fs = std::filesystem;
using namespace pdpredict;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_error(const std::string& code, const std::string& message,
                 std::optional<std::size_t> row = std::nullopt,
                 std::optional<std::string> column = std::nullopt) {
  nlohmann::json j = {{"error", code}, {"message", message}};
  if (row) j["row"] = *row;
  if (column) j["column"] = *column;
  std::cerr << j.dump() << std::endl;
}

std::vector<ModelKind> parse_models(const std::string& list) {
  std::vector<ModelKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") return {kAllModels.begin(), kAllModels.end()};
    const auto kind = parse_model_id(item);
    if (!kind) throw ConfigError("unknown model '" + item + "' (expected mlp, bayesnet, forest, boostlr)");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("--models selects no model");
  return out;
}

NormalizationStats load_preprocess(const fs::path& model_file,
                                   const std::optional<fs::path>& explicit_path) {
  const fs::path path = explicit_path ? *explicit_path : model_file.parent_path() / "preprocess.json";
  return normalization_from_json(read_json(path));
}

Hyperparameters hyper_from_config(const std::optional<fs::path>& config) {
  if (!config) return {};
  return config_from_json(read_json(*config), config->parent_path()).hyper;
}

int run(int argc, char** argv) {
  CLI::App app{"Parkinson's disease prediction pipeline"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic cohort CSV");
  fs::path gen_out;
  CohortSpec cohort;
  std::optional<fs::path> gen_params;
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--seed", cohort.seed, "Root seed");
  gen->add_option("--separation", cohort.separation, "Class separation scale (>= 0)");
  gen->add_option("--n-healthy", cohort.n_healthy, "Number of Healthy subjects");
  gen->add_option("--n-pd", cohort.n_pd, "Number of PD subjects");
  gen->add_option("--sbr-correlation", cohort.sbr_pair_correlation,
                  "Left/right SBR correlation (default 0, off)");
  gen->add_option("--params", gen_params, "Class-conditional parameter JSON");

  // validate
  auto* val = app.add_subcommand("validate", "List schema and invariant violations");
  fs::path val_input;
  val->add_option("--input", val_input, "CSV to check")->required();

  // train
  auto* train = app.add_subcommand("train", "Normalize a CSV and train one model on all rows");
  fs::path train_input, train_out;
  std::string train_model_id;
  std::uint64_t train_seed = 42;
  std::optional<fs::path> train_config;
  train->add_option("--input", train_input, "Training CSV")->required();
  train->add_option("--model", train_model_id, "mlp | bayesnet | forest | boostlr")->required();
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--seed", train_seed, "Root seed");
  train->add_option("--config", train_config, "Experiment config JSON (hyperparameters)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a CSV with a trained model");
  fs::path eval_input, eval_model;
  std::optional<fs::path> eval_pre, eval_report;
  eval->add_option("--input", eval_input, "Labelled CSV")->required();
  eval->add_option("--model-file", eval_model, "model.json")->required();
  eval->add_option("--preprocess", eval_pre, "preprocess.json (default: next to the model)");
  eval->add_option("--report", eval_report, "Also write a report.csv here");

  // roc
  auto* rocc = app.add_subcommand("roc", "Write ROC CSV and SVG for a trained model");
  fs::path roc_input, roc_model, roc_out;
  std::optional<fs::path> roc_pre;
  rocc->add_option("--input", roc_input, "Labelled CSV")->required();
  rocc->add_option("--model-file", roc_model, "model.json")->required();
  rocc->add_option("--preprocess", roc_pre, "preprocess.json (default: next to the model)");
  rocc->add_option("--out", roc_out, "Output prefix; writes <prefix>.csv and <prefix>.svg")->required();

  // report
  auto* rep = app.add_subcommand("report", "Render a report.csv as an aligned table");
  fs::path rep_input;
  std::string rep_format = "text";
  rep->add_option("--input", rep_input, "report.csv")->required();
  rep->add_option("--format", rep_format, "text | csv")->check(CLI::IsMember({"text", "csv"}));

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the full train/evaluate experiment");
  std::optional<fs::path> exp_config, exp_input, exp_out;
  std::optional<std::uint64_t> exp_seed;
  std::optional<double> exp_fraction, exp_separation;
  std::optional<std::string> exp_models;
  bool exp_generate = false;
  exp->add_option("--config", exp_config, "Experiment config JSON");
  auto* in_opt = exp->add_option("--input", exp_input, "Input CSV");
  exp->add_flag("--generate", exp_generate, "Use the synthetic generator")->excludes(in_opt);
  exp->add_option("--seed", exp_seed, "Root seed");
  exp->add_option("--train-fraction", exp_fraction, "Train fraction in (0, 1)");
  exp->add_option("--models", exp_models, "Comma-separated list or 'all'");
  exp->add_option("--out", exp_out, "Output directory");
  exp->add_option("--separation", exp_separation, "Generator class separation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("ConfigError", e.what());
    return kExitConfigError;
  }

  if (*gen) {
    if (gen_params) cohort.params = load_generator_params(*gen_params);
    const auto ds = generate(cohort);
    export_csv(ds, gen_out);
    const auto c = class_counts(ds);
    std::cout << "wrote " << ds.size() << " records (" << c.healthy << " Healthy, " << c.pd
              << " PD) to " << gen_out.string() << "\n";
    return kExitOk;
  }

  if (*val) {
    const auto violations = validate_csv(val_input);
    nlohmann::json list = nlohmann::json::array();
    for (const auto& v : violations) {
      list.push_back({{"code", std::string(to_string(v.code))},
                      {"row", v.row},
                      {"column", v.column},
                      {"message", v.message}});
    }
    std::cout << nlohmann::json{{"file", val_input.string()}, {"violations", list}}.dump(1) << "\n";
    return violations.empty() ? kExitOk : kExitDataError;
  }

  if (*train) {
    const auto kind = parse_model_id(train_model_id);
    if (!kind) throw ConfigError("unknown model '" + train_model_id + "'");
    const auto hyper = hyper_from_config(train_config);
    const auto raw = ingest_csv(train_input, true).dataset;
    auto [normalized, stats] = normalize_fit_transform(raw);
    const auto model = train_model(*kind, normalized, hyper, model_seed(train_seed, *kind));
    fs::create_directories(train_out);
    save_model(model, train_out / "model.json");
    write_text(train_out / "preprocess.json", preprocess_to_json(stats).dump(1) + "\n");
    std::cout << "wrote " << (train_out / "model.json").string() << "\n";
    return kExitOk;
  }

  if (*eval || *rocc) {
    const fs::path input = *eval ? eval_input : roc_input;
    const fs::path model_file = *eval ? eval_model : roc_model;
    const auto model = load_model(model_file);
    const auto stats = load_preprocess(model_file, *eval ? eval_pre : roc_pre);
    const auto ds = normalize_apply(ingest_csv(input, true).dataset, stats);
    const auto labels = ds.labels();
    const auto report = evaluate(kind_of(model), SplitKind::kTesting, labels, score_all(model, ds));
    if (*rocc) {
      write_text(roc_out.string() + ".csv", roc_to_csv(report.roc));
      write_text(roc_out.string() + ".svg",
                 roc_to_svg(report.roc, "ROC: " + std::string(model_display_name(report.model))));
      std::cout << "AUC " << format_shortest(report.roc.auc) << "\n";
      return kExitOk;
    }
    std::cout << nlohmann::json{{"model", std::string(model_id(report.model))},
                                {"records", ds.size()},
                                {"tp", report.cm.tp},
                                {"fp", report.cm.fp},
                                {"tn", report.cm.tn},
                                {"fn", report.cm.fn},
                                {"accuracy", report.metrics.accuracy},
                                {"precision", report.metrics.precision},
                                {"recall", report.metrics.recall},
                                {"f_measure", report.metrics.f_measure},
                                {"auc", report.roc.auc}}
                     .dump(1)
              << "\n";
    if (eval_report) write_text(*eval_report, render_report_csv({report}));
    return kExitOk;
  }

  if (*rep) {
    const auto cells = parse_report_csv(detail::read_file(rep_input));
    if (rep_format == "csv") {
      std::cout << "measure,model,split,value\n";
      for (const auto& c : cells) {
        std::cout << c.measure << ',' << c.model << ',' << c.split << ',' << format_shortest(c.value) << '\n';
      }
    } else {
      std::cout << render_report_text(cells);
    }
    return kExitOk;
  }

  if (*exp) {
    ExperimentConfig config;
    if (exp_config) {
      nlohmann::json j;
      try {
        j = read_json(*exp_config);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      config = config_from_json(j, exp_config->parent_path());
    }
    if (exp_input) config.input = *exp_input;
    if (exp_generate) config.input.reset();
    if (exp_seed) config.seed = *exp_seed;
    if (exp_fraction) config.train_fraction = *exp_fraction;
    if (exp_models) config.models = parse_models(*exp_models);
    if (exp_out) config.out = *exp_out;
    if (exp_separation) config.cohort.separation = *exp_separation;

    const auto manifest = cmd_experiment(config);
    std::cout << detail::read_file(config.out / "report.txt");
    std::cout << "wrote " << manifest.files.size() << " artifacts to " << config.out.string() << "\n";
    return kExitOk;
  }
  return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    print_error("ConfigError", e.what());
    return kExitConfigError;
  } catch (const Error& e) {
    print_error(std::string(to_string(e.code())), e.what(), e.row(), e.column());
    return e.code() == ErrorCode::kInvalidConfig ? kExitConfigError : kExitDataError;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return kExitDataError;
  }
}
