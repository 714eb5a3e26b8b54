#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <variant>

#include <nlohmann/json.hpp>

#include "pdpredict/bayesnet.hpp"
#include "pdpredict/boostlr.hpp"
#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/forest.hpp"
#include "pdpredict/mlp.hpp"
#include "pdpredict/random.hpp"
#include "pdpredict/report.hpp"

namespace pdpredict {

using AnyModel = std::variant<MlpModel, BayesNetModel, ForestModel, BoostedModel>;

struct Hyperparameters {
  MlpConfig mlp;
  BayesNetConfig bayesnet;
  ForestConfig forest;
  BoostConfig boostlr;
};

inline ModelKind kind_of(const AnyModel& m) {
  return std::visit(
      [](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, MlpModel>) return ModelKind::kMlp;
        else if constexpr (std::is_same_v<T, BayesNetModel>) return ModelKind::kBayesNet;
        else if constexpr (std::is_same_v<T, ForestModel>) return ModelKind::kForest;
        else return ModelKind::kBoostLr;
      },
      m);
}

// PD score in [0, 1]; PD is predicted iff the score exceeds 0.5.
inline double score(const AnyModel& m, const SubjectRecord& r) {
  return std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, MlpModel>) return mlp_score(model, r);
        else if constexpr (std::is_same_v<T, BayesNetModel>) return bn_score(model, r);
        else if constexpr (std::is_same_v<T, ForestModel>) return forest_score(model, r);
        else return boosted_score(model, r);
      },
      m);
}

inline std::vector<double> score_all(const AnyModel& m, const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& r : ds) out.push_back(score(m, r));
  return out;
}

inline AnyModel train_model(ModelKind kind, const Dataset& train, const Hyperparameters& hp,
                            std::uint64_t seed) {
  switch (kind) {
    case ModelKind::kMlp: return mlp_train(train, hp.mlp, seed);
    case ModelKind::kBayesNet: return bayesnet_train(train, hp.bayesnet);
    case ModelKind::kForest: return forest_train(train, hp.forest, seed);
    case ModelKind::kBoostLr: return adaboost_train(train, hp.boostlr);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown model kind");
}

inline nlohmann::json model_to_json(const AnyModel& m) {
  return std::visit([](const auto& model) { return to_json(model); }, m);
}

inline AnyModel model_from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "mlp") return mlp_from_json(j);
    if (type == "bayesnet") return bayesnet_from_json(j);
    if (type == "forest") return forest_from_json(j);
    if (type == "boostlr") return boostlr_from_json(j);
    throw Error(ErrorCode::kMalformedModel, "unknown model type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedModel, e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedModel, path.string() + ": " + e.what());
  }
}

inline void save_model(const AnyModel& m, const std::filesystem::path& path) {
  write_text(path, model_to_json(m).dump(1) + "\n");
}

inline AnyModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

}  // namespace pdpredict
