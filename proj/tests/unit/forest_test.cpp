#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pdpredict/forest.hpp"
#include "pdpredict/synthgen.hpp"
#include "test_util.hpp"

namespace pdpredict {
namespace {

TEST(InfoGain, HandValue) {
  // H(3/4, 1/4) with both children pure.
  EXPECT_NEAR(info_gain({3, 1}, {3, 0}, {0, 1}), 0.8112781244591328, 1e-15);
  EXPECT_EQ(info_gain({2, 2}, {1, 1}, {1, 1}), 0.0);
}

TEST(InfoGain, InconsistentCounts) {
  try {
    info_gain({3, 1}, {2, 0}, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentCounts);
  }
}

TEST(InfoGain, NonNegativeAndBoundedProperty) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const ClassCountPair l{double(rng.below(20)), double(rng.below(20))};
    const ClassCountPair r{double(rng.below(20)), double(rng.below(20))};
    const ClassCountPair p{l[0] + r[0], l[1] + r[1]};
    const double g = info_gain(p, l, r);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, entropy_bits(p) + 1e-12);
  }
}

TEST(TreeGrow, OneDimensionalThreshold) {
  std::vector<SubjectRecord> rows;
  for (double v : {0.0, 0.0, 1.0, 1.0}) {
    FeatureVector x{};
    x[0] = v;
    rows.push_back(testing::make_record(x, v > 0 ? Label::kPD : Label::kHealthy));
  }
  const Dataset ds(rows);
  Rng rng(1);
  const auto tree = tree_grow(full_sample(ds), kFeatureCount, rng);
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_FALSE(tree.nodes[0].leaf);
  EXPECT_EQ(tree.nodes[0].feature, 0u);
  EXPECT_EQ(tree.nodes[0].threshold, 0.5);
}

TEST(TreeGrow, PureLeavesOnTrainingData) {
  const auto ds = testing::random_unit_dataset(150, 4);
  Rng rng(2);
  const auto tree = tree_grow(full_sample(ds), 4, rng);
  for (const auto& r : ds) EXPECT_EQ(tree.predict(r.values), r.label);
  for (const auto& n : tree.nodes) {
    if (!n.leaf) {
      EXPECT_EQ(tree.nodes[n.left].counts[0] + tree.nodes[n.right].counts[0], n.counts[0]);
      EXPECT_EQ(tree.nodes[n.left].counts[1] + tree.nodes[n.right].counts[1], n.counts[1]);
    }
  }
}

TEST(TreeGrow, EmptySampleThrows) {
  Rng rng(0);
  EXPECT_THROW(tree_grow(TreeSample{}, 4, rng), Error);
}

TEST(Forest, DefaultSubsetSize) { EXPECT_EQ(default_subset_size(), 4u); }

TEST(Forest, SingleFullTreeMatchesReferenceTree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = generate(CohortSpec{30, 40, 0.5, seed});
    const auto forest = forest_train(ds, ForestConfig{1, kFeatureCount, false}, seed);
    std::vector<FeatureVector> x;
    for (const auto& r : ds) x.push_back(r.values);
    const oracle::ReferenceTree ref(x, ds.labels());
    const auto probe = generate(CohortSpec{50, 50, 0.5, seed + 100});
    for (const auto& r : probe) EXPECT_EQ(forest_predict(forest, r), ref.predict(r.values));
  }
}

TEST(Forest, DeterministicAndVoteFraction) {
  const auto ds = generate(CohortSpec{60, 80, 1.0, 3});
  const ForestConfig cfg{15, 4, true};
  const auto a = forest_train(ds, cfg, 77);
  const auto b = forest_train(ds, cfg, 77);
  EXPECT_EQ(a.trees, b.trees);
  for (const auto& r : ds) {
    const double s = forest_score(a, r);
    EXPECT_NEAR(s * 15.0, std::round(s * 15.0), 1e-12);
    EXPECT_EQ(forest_predict(a, r), s > 0.5 ? Label::kPD : Label::kHealthy);
  }
}

TEST(Forest, InvalidConfig) {
  const auto ds = generate(CohortSpec{10, 10, 1.0, 3});
  EXPECT_THROW(forest_train(ds, ForestConfig{0, 4, true}, 1), Error);
  EXPECT_THROW(forest_train(ds, ForestConfig{5, 0, true}, 1), Error);
  EXPECT_THROW(forest_train(ds, ForestConfig{5, 14, true}, 1), Error);
}

TEST(ForestJson, RoundTrip) {
  const auto ds = generate(CohortSpec{40, 40, 1.0, 5});
  const auto m = forest_train(ds, ForestConfig{5, 4, true}, 3);
  const auto back = forest_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.trees, m.trees);
}

}  // namespace
}  // namespace pdpredict
