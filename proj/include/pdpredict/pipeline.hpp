#pragma once

// End-to-end experiment: ingest or generate -> normalize -> stratified split
// -> train each selected model -> evaluate on both splits -> artifacts.
//
// Seed derivation from the root seed:
//   generator   CohortSpec.seed = root (the generator derives "generator")
//   split       derive_seed(root, "split")
//   model m     derive_seed(root, "model/<id>")
// so adding or removing a model never changes another model's stream.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdpredict/csv.hpp"
#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/model_io.hpp"
#include "pdpredict/preprocess.hpp"
#include "pdpredict/report.hpp"
#include "pdpredict/synthgen.hpp"

namespace pdpredict {

struct ExperimentConfig {
  std::optional<std::filesystem::path> input;  // otherwise generate
  CohortSpec cohort;
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
  std::filesystem::path out = "experiment_out";
  Hyperparameters hyper;
  // Normalize the full dataset before splitting (the default), or fit the
  // min/max on the training split only and apply it to the test split.
  bool normalize_before_split = true;
  bool parallel = true;
};

inline void validate_config(const ExperimentConfig& c) {
  if (c.models.empty()) throw Error(ErrorCode::kInvalidConfig, "select at least one model");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "train_fraction must lie in (0, 1)");
  }
}

inline std::uint64_t model_seed(std::uint64_t root, ModelKind kind) {
  return derive_seed(root, "model/" + std::string(model_id(kind)));
}

struct TrainedEntry {
  ModelKind kind;
  AnyModel model;
  EvaluationReport train_report;
  EvaluationReport test_report;
};

struct ExperimentResult {
  Dataset raw;
  NormalizationStats normalization;
  Split split;
  std::vector<TrainedEntry> entries;

  std::vector<EvaluationReport> reports() const {
    std::vector<EvaluationReport> out;
    for (const auto& e : entries) {
      out.push_back(e.train_report);
      out.push_back(e.test_report);
    }
    return out;
  }
  const TrainedEntry* find(ModelKind k) const {
    for (const auto& e : entries) {
      if (e.kind == k) return &e;
    }
    return nullptr;
  }
};

inline ExperimentResult run_pipeline(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentResult res;
  if (config.input) {
    res.raw = ingest_csv(*config.input, true).dataset;
  } else {
    CohortSpec spec = config.cohort;
    spec.seed = config.seed;
    res.raw = generate(spec);
  }
  if (res.raw.empty()) throw Error(ErrorCode::kEmptyDataset, "no records to train on");

  const SplitSpec split_spec{config.train_fraction, derive_seed(config.seed, "split")};
  if (config.normalize_before_split) {
    auto [normalized, stats] = normalize_fit_transform(res.raw);
    res.normalization = std::move(stats);
    res.split = stratified_split(normalized, split_spec);
  } else {
    auto raw_split = stratified_split(res.raw, split_spec);
    res.normalization = fit_normalization(raw_split.train);
    res.split = {normalize_apply(raw_split.train, res.normalization),
                 normalize_apply(raw_split.test, res.normalization)};
  }

  const auto train_labels = res.split.train.labels();
  const auto test_labels = res.split.test.labels();
  auto run_one = [&](ModelKind kind) {
    AnyModel model = train_model(kind, res.split.train, config.hyper, model_seed(config.seed, kind));
    auto train_report =
        evaluate(kind, SplitKind::kTraining, train_labels, score_all(model, res.split.train));
    auto test_report =
        evaluate(kind, SplitKind::kTesting, test_labels, score_all(model, res.split.test));
    return TrainedEntry{kind, std::move(model), std::move(train_report), std::move(test_report)};
  };

  std::vector<ModelKind> ordered;
  for (ModelKind k : kAllModels) {
    if (std::find(config.models.begin(), config.models.end(), k) != config.models.end()) {
      ordered.push_back(k);
    }
  }
  if (config.parallel) {
    std::vector<std::future<TrainedEntry>> jobs;
    for (ModelKind k : ordered) jobs.push_back(std::async(std::launch::async, run_one, k));
    for (auto& j : jobs) res.entries.push_back(j.get());
  } else {
    for (ModelKind k : ordered) res.entries.push_back(run_one(k));
  }
  return res;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json models = nlohmann::json::array();
  for (ModelKind k : c.models) models.push_back(std::string(model_id(k)));
  nlohmann::json j = {{"seed", c.seed},
                      {"train_fraction", c.train_fraction},
                      {"models", models},
                      {"normalize_before_split", c.normalize_before_split},
                      {"rng", std::string(kRngVersion)},
                      {"mlp",
                       {{"hidden_units", c.hyper.mlp.hidden_units},
                        {"learning_rate", c.hyper.mlp.learning_rate},
                        {"momentum", c.hyper.mlp.momentum},
                        {"epochs", c.hyper.mlp.epochs}}},
                      {"bayesnet",
                       {{"max_parents", c.hyper.bayesnet.max_parents},
                        {"prior_alpha", c.hyper.bayesnet.prior_alpha},
                        {"bins", c.hyper.bayesnet.bins},
                        {"strategy", c.hyper.bayesnet.strategy == BinStrategy::kEqualFrequency
                                         ? "equal_frequency"
                                         : "equal_width"}}},
                      {"forest",
                       {{"trees", c.hyper.forest.trees},
                        {"subset_size", c.hyper.forest.subset_size},
                        {"bootstrap", c.hyper.forest.bootstrap}}},
                      {"boostlr",
                       {{"max_rounds", c.hyper.boostlr.max_rounds},
                        {"ridge", c.hyper.boostlr.base.ridge}}}};
  if (c.input) {
    j["input"] = c.input->string();
  } else {
    j["generate"] = {{"n_healthy", c.cohort.n_healthy},
                     {"n_pd", c.cohort.n_pd},
                     {"separation", c.cohort.separation},
                     {"sbr_pair_correlation", c.cohort.sbr_pair_correlation},
                     {"params", generator_params_to_json(c.cohort.params)}};
  }
  return j;
}

// Reads the keys written by config_to_json; absent keys keep their defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  try {
    if (j.contains("input")) {
      std::filesystem::path p = j.at("input").get<std::string>();
      c.input = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("generate")) {
      const auto& g = j.at("generate");
      c.cohort.n_healthy = g.value("n_healthy", c.cohort.n_healthy);
      c.cohort.n_pd = g.value("n_pd", c.cohort.n_pd);
      c.cohort.separation = g.value("separation", c.cohort.separation);
      c.cohort.sbr_pair_correlation = g.value("sbr_pair_correlation", c.cohort.sbr_pair_correlation);
      if (g.contains("params")) {
        const auto& p = g.at("params");
        if (p.is_string()) {
          std::filesystem::path pp = p.get<std::string>();
          c.cohort.params =
              load_generator_params(pp.is_relative() && !base_dir.empty() ? base_dir / pp : pp);
        } else {
          c.cohort.params = generator_params_from_json(p);
        }
      }
    }
    c.seed = j.value("seed", c.seed);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) {
        const auto kind = parse_model_id(m.get<std::string>());
        if (!kind) throw Error(ErrorCode::kInvalidConfig, "unknown model " + m.dump());
        c.models.push_back(*kind);
      }
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    c.normalize_before_split = j.value("normalize_before_split", c.normalize_before_split);
    if (j.contains("mlp")) {
      const auto& m = j.at("mlp");
      c.hyper.mlp.hidden_units = m.value("hidden_units", c.hyper.mlp.hidden_units);
      c.hyper.mlp.learning_rate = m.value("learning_rate", c.hyper.mlp.learning_rate);
      c.hyper.mlp.momentum = m.value("momentum", c.hyper.mlp.momentum);
      c.hyper.mlp.epochs = m.value("epochs", c.hyper.mlp.epochs);
    }
    if (j.contains("bayesnet")) {
      const auto& b = j.at("bayesnet");
      c.hyper.bayesnet.max_parents = b.value("max_parents", c.hyper.bayesnet.max_parents);
      c.hyper.bayesnet.prior_alpha = b.value("prior_alpha", c.hyper.bayesnet.prior_alpha);
      c.hyper.bayesnet.bins = b.value("bins", c.hyper.bayesnet.bins);
      const auto strategy = b.value("strategy", std::string("equal_frequency"));
      if (strategy != "equal_frequency" && strategy != "equal_width") {
        throw Error(ErrorCode::kInvalidConfig, "unknown discretization strategy " + strategy);
      }
      c.hyper.bayesnet.strategy = strategy == "equal_width" ? BinStrategy::kEqualWidth
                                                            : BinStrategy::kEqualFrequency;
    }
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      c.hyper.forest.trees = f.value("trees", c.hyper.forest.trees);
      c.hyper.forest.subset_size = f.value("subset_size", c.hyper.forest.subset_size);
      c.hyper.forest.bootstrap = f.value("bootstrap", c.hyper.forest.bootstrap);
    }
    if (j.contains("boostlr")) {
      const auto& b = j.at("boostlr");
      c.hyper.boostlr.max_rounds = b.value("max_rounds", c.hyper.boostlr.max_rounds);
      c.hyper.boostlr.base.ridge = b.value("ridge", c.hyper.boostlr.base.ridge);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  return c;
}

struct ArtifactManifest {
  std::vector<std::filesystem::path> files;  // relative to the output directory
};

// Writes every artifact into a staging directory first and moves them into
// `config.out` only after the whole run succeeded; on failure nothing from
// this run is left behind.
inline ArtifactManifest cmd_experiment(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  validate_config(config);
  const fs::path staging =
      config.out.parent_path() /
      (config.out.filename().string() + ".partial-" + std::to_string(::getpid()));
  fs::remove_all(staging);
  ArtifactManifest manifest;
  try {
    const auto res = run_pipeline(config);
    fs::create_directories(staging);
    auto put = [&](const fs::path& rel, const std::string& text) {
      fs::create_directories((staging / rel).parent_path());
      write_text(staging / rel, text);
      manifest.files.push_back(rel);
    };
    const auto reports = res.reports();
    put("report.csv", render_report_csv(reports));
    put("report.txt", render_report_text(reports));
    put("preprocess.json", preprocess_to_json(res.normalization).dump(1) + "\n");
    if (!config.input) put("cohort.csv", to_csv(res.raw));
    for (const auto& e : res.entries) {
      const fs::path dir = std::string(model_id(e.kind));
      put(dir / "model.json", model_to_json(e.model).dump(1) + "\n");
      put(dir / "roc_test.csv", roc_to_csv(e.test_report.roc));
      put(dir / "roc_test.svg",
          roc_to_svg(e.test_report.roc,
                     "ROC: " + std::string(model_display_name(e.kind)) + " (test)"));
    }
    put("config.json", config_to_json(config).dump(1) + "\n");

    // Timestamps live only here so every other artifact is reproducible.
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    put("metadata.json", nlohmann::json{{"created_utc", stamp}, {"rng", kRngVersion}}.dump(1) + "\n");

    fs::create_directories(config.out);
    for (const auto& rel : manifest.files) {
      fs::create_directories((config.out / rel).parent_path());
      fs::rename(staging / rel, config.out / rel);
    }
    fs::remove_all(staging);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  return manifest;
}

}  // namespace pdpredict
