#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pdpredict/pipeline.hpp"

namespace pdpredict {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.cohort.n_healthy = 60;
  c.cohort.n_pd = 90;
  c.seed = 5;
  c.out = out;
  c.hyper.mlp.epochs = 60;
  c.hyper.forest.trees = 15;
  return c;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pdpredict_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(PipelineTest, ModelsAreIndependentOfSelection) {
  auto all = small_config(dir_ / "a");
  auto one = all;
  one.models = {ModelKind::kForest};
  const auto ra = run_pipeline(all);
  const auto rb = run_pipeline(one);
  ASSERT_EQ(rb.entries.size(), 1u);
  EXPECT_EQ(ra.find(ModelKind::kForest)->test_report.roc.auc, rb.entries[0].test_report.roc.auc);
  EXPECT_EQ(model_to_json(ra.find(ModelKind::kForest)->model), model_to_json(rb.entries[0].model));
}

TEST_F(PipelineTest, SerialAndParallelAgree) {
  auto a = small_config(dir_);
  auto b = a;
  b.parallel = false;
  const auto ra = run_pipeline(a), rb = run_pipeline(b);
  EXPECT_EQ(render_report_csv(ra.reports()), render_report_csv(rb.reports()));
}

TEST_F(PipelineTest, ModelFilesRoundTripScores) {
  const auto res = run_pipeline(small_config(dir_));
  fs::create_directories(dir_);
  for (const auto& e : res.entries) {
    const auto path = dir_ / (std::string(model_id(e.kind)) + ".json");
    save_model(e.model, path);
    const auto back = load_model(path);
    EXPECT_EQ(kind_of(back), e.kind);
    EXPECT_EQ(score_all(back, res.split.test), score_all(e.model, res.split.test));
  }
}

TEST_F(PipelineTest, MalformedModelFile) {
  fs::create_directories(dir_);
  write_text(dir_ / "m.json", R"({"type": "mlp", "inputs": "x"})");
  try {
    load_model(dir_ / "m.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedModel);
  }
  write_text(dir_ / "u.json", R"({"type": "svm"})");
  EXPECT_THROW(load_model(dir_ / "u.json"), Error);
}

TEST_F(PipelineTest, ExperimentArtifactsAndDeterminism) {
  const auto cfg = small_config(dir_ / "run1");
  const auto manifest = cmd_experiment(cfg);
  std::vector<std::string> expected = {"report.csv", "report.txt", "preprocess.json",
                                       "cohort.csv", "config.json", "metadata.json"};
  for (auto k : kAllModels) {
    for (auto f : {"model.json", "roc_test.csv", "roc_test.svg"})
      expected.push_back(std::string(model_id(k)) + "/" + f);
  }
  for (const auto& rel : expected) EXPECT_TRUE(fs::exists(cfg.out / rel)) << rel;
  EXPECT_EQ(manifest.files.size(), expected.size());

  auto cfg2 = cfg;
  cfg2.out = dir_ / "run2";
  cmd_experiment(cfg2);
  for (const auto& rel : manifest.files) {
    if (rel == "metadata.json" || rel == "config.json") continue;
    EXPECT_EQ(slurp(cfg.out / rel), slurp(cfg2.out / rel)) << rel.string();
  }
  for (const auto& entry : fs::directory_iterator(dir_)) {
    EXPECT_EQ(entry.path().filename().string().find(".partial-"), std::string::npos);
  }
}

TEST_F(PipelineTest, FailedRunLeavesNothing) {
  auto cfg = small_config(dir_ / "out");
  cfg.input = dir_ / "missing.csv";
  EXPECT_THROW(cmd_experiment(cfg), Error);
  EXPECT_FALSE(fs::exists(cfg.out));
  if (fs::exists(dir_)) {
    EXPECT_TRUE(fs::is_empty(dir_));
  }
}

TEST_F(PipelineTest, ConfigJsonRoundTrip) {
  auto cfg = small_config(dir_);
  cfg.models = {ModelKind::kMlp, ModelKind::kBoostLr};
  cfg.hyper.bayesnet.strategy = BinStrategy::kEqualWidth;
  const auto back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
}

TEST_F(PipelineTest, InvalidConfig) {
  auto cfg = small_config(dir_);
  cfg.models.clear();
  EXPECT_THROW(run_pipeline(cfg), Error);
  cfg = small_config(dir_);
  cfg.train_fraction = 1.5;
  EXPECT_THROW(run_pipeline(cfg), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"models", {"svm"}}}), Error);
}

TEST_F(PipelineTest, TrainOnlyNormalizationOption) {
  auto cfg = small_config(dir_);
  cfg.normalize_before_split = false;
  const auto res = run_pipeline(cfg);
  for (const auto& r : res.split.train)
    for (double v : r.values) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
  EXPECT_EQ(res.entries.size(), 4u);
}

}  // namespace
}  // namespace pdpredict
