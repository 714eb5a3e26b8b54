#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "pdpredict/preprocess.hpp"
#include "pdpredict/synthgen.hpp"
#include "test_util.hpp"

namespace pdpredict {
namespace {

Dataset single_feature(const std::vector<double>& values) {
  std::vector<SubjectRecord> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    FeatureVector v{};
    v[0] = values[i];
    rows.push_back(testing::make_record(v, i % 2 ? Label::kPD : Label::kHealthy));
  }
  return Dataset(std::move(rows));
}

TEST(Normalization, ThreeValueColumn) {
  const auto [norm, stats] = normalize_fit_transform(single_feature({2, 4, 8}));
  EXPECT_EQ(stats[0], (MinMax{2, 8}));
  EXPECT_DOUBLE_EQ(norm[0].values[0], 0.0);
  EXPECT_DOUBLE_EQ(norm[1].values[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(norm[2].values[0], 1.0);
  // Constant columns map to zero.
  EXPECT_EQ(norm[1].values[5], 0.0);
  EXPECT_TRUE(norm.is_normalized());
}

TEST(Normalization, ApplyUsesTrainingStats) {
  const auto stats = fit_normalization(single_feature({2, 8}));
  const auto out = normalize_apply(single_feature({6, 20, -1}), stats);
  EXPECT_DOUBLE_EQ(out[0].values[0], 2.0 / 3.0);
  EXPECT_EQ(out[1].values[0], 1.0);
  EXPECT_EQ(out[2].values[0], 0.0);
}

TEST(Normalization, EmptyAndShortStats) {
  EXPECT_THROW(fit_normalization(Dataset{}), Error);
  try {
    normalize_apply(single_feature({1, 2}), NormalizationStats(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingFeatureStats);
  }
}

TEST(Normalization, OutputInUnitIntervalProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ds = generate(CohortSpec{40, 60, 1.0, seed});
    const auto [norm, stats] = normalize_fit_transform(ds);
    for (const auto& r : norm) {
      for (double v : r.values) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
    // Applying the stats again reproduces the fitted transform.
    EXPECT_EQ(normalize_apply(ds, stats), norm);
  }
}

TEST(Split, DefaultCohortCounts) {
  EXPECT_EQ(stratified_train_counts({184, 402}, 0.7), (std::array<std::size_t, 2>{129, 281}));
  const auto s = stratified_split(generate(CohortSpec{}), SplitSpec{0.7, 42});
  EXPECT_EQ(class_counts(s.train), (ClassCounts{129, 281}));
  EXPECT_EQ(class_counts(s.test), (ClassCounts{55, 121}));
}

TEST(Split, SmallBalancedCase) {
  // 0.7 * 10 = 7 total; each class has 3.5 exact, tie goes to Healthy.
  EXPECT_EQ(stratified_train_counts({5, 5}, 0.7), (std::array<std::size_t, 2>{4, 3}));
}

TEST(Split, ClassTooSmall) {
  const auto ds = generate(CohortSpec{1, 10, 1.0, 3});
  try {
    stratified_split(ds, SplitSpec{0.7, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassTooSmall);
  }
}

TEST(Split, InvalidFraction) {
  const auto ds = generate(CohortSpec{10, 10, 1.0, 3});
  EXPECT_THROW(stratified_split(ds, SplitSpec{0.0, 1}), Error);
  EXPECT_THROW(stratified_split(ds, SplitSpec{1.0, 1}), Error);
}

TEST(Split, PartitionProperties) {
  const auto ds = generate(CohortSpec{184, 402, 1.0, 11});
  const auto counts = class_counts(ds);
  for (double f : {0.5, 0.7, 0.9}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = stratified_split(ds, SplitSpec{f, seed});
      const auto tc = class_counts(s.train);
      EXPECT_LE(std::abs(double(tc.healthy) - f * double(counts.healthy)), 1.0);
      EXPECT_LE(std::abs(double(tc.pd) - f * double(counts.pd)), 1.0);
      std::set<std::string> train_ids, test_ids;
      for (const auto& r : s.train) train_ids.insert(r.subject_id);
      for (const auto& r : s.test) test_ids.insert(r.subject_id);
      for (const auto& id : test_ids) EXPECT_FALSE(train_ids.count(id));
      EXPECT_EQ(train_ids.size() + test_ids.size(), ds.size());
      const auto again = stratified_split(ds, SplitSpec{f, seed});
      EXPECT_EQ(again.train, s.train);
      EXPECT_EQ(again.test, s.test);
    }
  }
}

TEST(Split, DifferentSeedsDiffer) {
  const auto ds = generate(CohortSpec{});
  EXPECT_NE(stratified_split(ds, SplitSpec{0.7, 1}).train,
            stratified_split(ds, SplitSpec{0.7, 2}).train);
}

TEST(Discretize, EqualFrequencyFourValues) {
  EXPECT_EQ(equal_frequency_cuts({1, 2, 3, 100}, 2), (std::vector<double>{2.5}));
}

TEST(Discretize, EqualWidthRange) {
  std::vector<double> col;
  for (int i = 0; i <= 10; ++i) col.push_back(i);
  EXPECT_EQ(equal_width_cuts(col, 2), (std::vector<double>{5.0}));
}

TEST(Discretize, TiesNeverSplit) {
  const auto cuts = equal_frequency_cuts({1, 1, 1, 1, 1, 2}, 4);
  EXPECT_EQ(cuts, (std::vector<double>{1.5}));
  EXPECT_TRUE(equal_frequency_cuts({3, 3, 3}, 4).empty());
}

TEST(Discretize, BinsAreInRangeProperty) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = generate(CohortSpec{50, 50, 1.0, seed});
    for (auto strategy : {BinStrategy::kEqualFrequency, BinStrategy::kEqualWidth}) {
      const auto map = discretize_fit(ds, 10, strategy);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        EXPECT_LE(map.bins(f), 10u);
        EXPECT_TRUE(std::is_sorted(map.cuts[f].begin(), map.cuts[f].end()));
        for (const auto& r : ds) EXPECT_LT(map.bin(f, r.values[f]), map.bins(f));
        EXPECT_EQ(map.bin(f, -1e300), 0u);
        EXPECT_EQ(map.bin(f, 1e300), map.bins(f) - 1);
      }
    }
  }
}

TEST(Discretize, Errors) {
  EXPECT_THROW(discretize_fit(Dataset{}), Error);
  try {
    discretize_fit(single_feature({1, 2, 3}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBinsTooFew);
  }
}

TEST(PreprocessJson, RoundTrip) {
  const auto ds = generate(CohortSpec{30, 30, 1.0, 8});
  const auto stats = fit_normalization(ds);
  const auto map = discretize_fit(ds);
  const auto j = nlohmann::json::parse(preprocess_to_json(stats, &map).dump());
  EXPECT_EQ(normalization_from_json(j), stats);
  EXPECT_EQ(discretization_from_json(j.at("discretization")), map);
}

}  // namespace
}  // namespace pdpredict
