#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pdpredict/bayesnet.hpp"
#include "pdpredict/synthgen.hpp"
#include "test_util.hpp"

namespace pdpredict {
namespace {

DiscreteData two_by_two() {
  DiscreteData d;
  d.arity = {2};
  d.rows = {{0}, {0}, {1}, {1}};
  return d;
}

TEST(K2Score, NoParentsHandValue) {
  // (r-1)!/(N+r-1)! * N_0! * N_1! = 1/120 * 2 * 2.
  const auto d = two_by_two();
  EXPECT_NEAR(k2_score(0, {}, d), std::log(4.0 / 120.0), 1e-12);
  EXPECT_NEAR(k2_score(0, {}, d), -3.4011973816621555, 1e-12);
}

TEST(K2Score, EmptyParentConfigsContributeNothing) {
  DiscreteData d;
  d.arity = {2, 3};
  d.rows = {{0, 0}, {1, 0}, {1, 0}};
  // Parent values 1 and 2 never occur; only config 0 counts: 1/24 * 1 * 2.
  const std::vector<std::size_t> parents = {1};
  EXPECT_NEAR(k2_score(0, parents, d), std::log(2.0 / 24.0), 1e-12);
}

TEST(ParentConfigIndex, FirstParentLeastSignificant) {
  const std::vector<std::size_t> arity = {2, 3, 4};
  const std::vector<std::size_t> parents = {1, 2};
  const std::vector<std::size_t> values = {0, 2, 3};
  EXPECT_EQ(parent_config_index(parents, arity, values), 2u + 3u * 3u);
  EXPECT_EQ(parent_config_count(parents, arity), 12u);
}

TEST(CptEstimate, PseudoCountHandValue) {
  DiscreteData d;
  d.arity = {2};
  d.rows = {{0}, {0}, {0}, {1}};
  const auto cpts = cpt_estimate({{}}, d, 0.5);
  EXPECT_NEAR(cpts[0].prob(0, 0), 0.7, 1e-15);
  EXPECT_NEAR(cpts[0].prob(0, 1), 0.3, 1e-15);
}

TEST(CptEstimate, RowsSumToOneProperty) {
  const auto data = oracle::sample_naive_bayes(300, 3, 4, 17);
  ParentSets parents = {{}, {0}, {0, 1}, {1, 2}};
  for (double alpha : {0.0, 0.5, 2.0}) {
    for (const auto& c : cpt_estimate(parents, data, alpha)) {
      for (std::size_t j = 0; j * c.arity < c.table.size(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.arity; ++k) s += c.prob(j, k);
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(BnPosterior, HandNaiveBayes) {
  BayesNetModel m;
  m.arity = {2, 2, 2};
  m.cpts = {Cpt{2, {}, {0.7, 0.3}}, Cpt{2, {0}, {0.8, 0.2, 0.3, 0.7}},
            Cpt{2, {0}, {0.6, 0.4, 0.1, 0.9}}};
  // 0.3*0.7*0.9 / (0.3*0.7*0.9 + 0.7*0.2*0.4)
  EXPECT_NEAR(bn_posterior(m, {0, 1, 1}), 0.7714285714285715, 1e-14);
}

TEST(BnPosterior, MatchesBruteForceOnThreeNodeNets) {
  Rng rng(5);
  for (const auto& parents : oracle::all_dags(3)) {
    for (std::size_t cls = 0; cls < 3; ++cls) {
      const auto net = oracle::random_cpts(parents, rng);
      const auto model = oracle::to_model(net, cls);
      for (std::uint64_t a = 0; a < 8; ++a) {
        std::vector<std::size_t> x = {a & 1, a >> 1 & 1, a >> 2 & 1};
        EXPECT_NEAR(bn_posterior(model, x), oracle::brute_force_posterior(net, cls, x), 1e-10);
      }
    }
  }
  EXPECT_EQ(oracle::all_dags(3).size(), 25u);
  EXPECT_EQ(oracle::all_dags(4).size(), 543u);
}

TEST(K2Search, RespectsOrderingAndCap) {
  const auto data = oracle::sample_naive_bayes(500, 4, 3, 3);
  const std::vector<std::size_t> ordering = {3, 0, 4, 1, 2};
  const auto parents = k2_search(data, ordering, 1);
  std::vector<std::size_t> pos(5);
  for (std::size_t i = 0; i < 5; ++i) pos[ordering[i]] = i;
  for (std::size_t v = 0; v < 5; ++v) {
    EXPECT_LE(parents[v].size(), 1u);
    for (auto p : parents[v]) EXPECT_LT(pos[p], pos[v]);
  }
  EXPECT_TRUE(parents[3].empty());
}

TEST(K2Search, RecoversNaiveBayes) {
  const auto data = oracle::sample_naive_bayes(5000, 4, 3, 1234);
  const std::vector<std::size_t> ordering = {0, 1, 2, 3, 4};
  const auto parents = k2_search(data, ordering, 3);
  const ParentSets expected = {{}, {0}, {0}, {0}, {0}};
  EXPECT_EQ(parents, expected);
}

TEST(BayesNetTrain, StructureAndScores) {
  const auto ds = generate(CohortSpec{80, 120, 1.0, 9});
  const auto m = bayesnet_train(ds);
  EXPECT_TRUE(m.cpts[kClassNode].parents.empty());
  for (std::size_t v = 1; v < kBayesNodeCount; ++v) {
    const auto& p = m.cpts[v].parents;
    EXPECT_LE(p.size(), 2u);
    EXPECT_NE(std::find(p.begin(), p.end(), kClassNode), p.end());
    for (auto q : p) EXPECT_LT(q, v);
  }
  std::size_t correct = 0;
  for (const auto& r : ds) {
    const double s = bn_score(m, r);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    correct += (s > 0.5) == (r.label == Label::kPD);
  }
  EXPECT_GT(correct, ds.size() * 8 / 10);
}

TEST(BayesNetTrain, ZeroParentsGivesPriorOnly) {
  const auto ds = generate(CohortSpec{30, 70, 1.0, 2});
  BayesNetConfig cfg;
  cfg.max_parents = 0;
  cfg.prior_alpha = 0.0;
  const auto m = bayesnet_train(ds, cfg);
  for (const auto& r : ds) EXPECT_NEAR(bn_score(m, r), 0.7, 1e-12);
}

TEST(BayesNetJson, RoundTrip) {
  const auto ds = generate(CohortSpec{40, 60, 1.0, 4});
  const auto m = bayesnet_train(ds);
  const auto back = bayesnet_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.cpts, m.cpts);
  for (const auto& r : ds) EXPECT_EQ(bn_score(back, r), bn_score(m, r));
}

TEST(BayesNetJson, RejectsWrongTableSize) {
  const auto ds = generate(CohortSpec{40, 60, 1.0, 4});
  auto j = to_json(bayesnet_train(ds));
  j["nodes"][3]["cpt"].erase(0);
  EXPECT_THROW(bayesnet_from_json(j), Error);
}

}  // namespace
}  // namespace pdpredict
