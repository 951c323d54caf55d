#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "moscal/instances.hpp"
#include "moscal/wsm.hpp"

using namespace moscal;

TEST(Wsm, SampledWeightsAreOnTheOpenSimplex) {
  const auto one = sample_weights(3, 1, 5);
  ASSERT_EQ(one.size(), 1u);
  for (const auto& w : sample_weights(4, 500, 9)) {
    double s = 0;
    for (double v : w) {
      EXPECT_GT(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_EQ(sample_weights(3, 100, 42), sample_weights(3, 100, 42));
  EXPECT_NE(sample_weights(3, 100, 42), sample_weights(3, 100, 43));
  EXPECT_THROW(sample_weights(1, 3, 1), ValidationError);
  EXPECT_THROW(sample_weights(3, 0, 1), ValidationError);
}

TEST(Wsm, SampleMeanIsCentral) {
  const std::size_t p = 3, n = 100000;
  std::vector<double> mean(p, 0.0);
  for (const auto& w : sample_weights(p, n, 7))
    for (std::size_t k = 0; k < p; ++k) mean[k] += w[k] / n;
  for (double m : mean) EXPECT_NEAR(m, 1.0 / p, 0.01);
}

TEST(Wsm, LexicographicOrder) {
  const std::vector<Weight> sorted{{0.1, 0.9}, {0.2, 0.8}, {0.5, 0.5}};
  EXPECT_EQ(order_weights(sorted, WeightOrdering::Lexicographic, 0), (std::vector<std::size_t>{0, 1, 2}));
  const std::vector<Weight> mixed{{0.5, 0.5}, {0.1, 0.9}, {0.2, 0.8}};
  EXPECT_EQ(order_weights(mixed, WeightOrdering::Lexicographic, 0), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_THROW(order_weights({}, WeightOrdering::Angle, 0), ValidationError);
}

TEST(Wsm, AngleOrderPutsUniformFirst) {
  const std::vector<Weight> w{{0.6, 0.2, 0.2}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  EXPECT_EQ(order_weights(w, WeightOrdering::Angle, 0).front(), 1u);
}

TEST(Wsm, AngleOrderMatchesRecomputedAngles) {
  const auto w = sample_weights(3, 100, 11);
  // Angle from the perpendicular distance to the diagonal via atan2.
  std::vector<double> theta(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double along = (w[i][0] + w[i][1] + w[i][2]) / std::sqrt(3.0);
    const double norm2 = w[i][0] * w[i][0] + w[i][1] * w[i][1] + w[i][2] * w[i][2];
    theta[i] = std::atan2(std::sqrt(std::max(0.0, norm2 - along * along)), along);
  }
  const auto order = order_weights(w, WeightOrdering::Angle, 0);
  for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LE(theta[order[i - 1]], theta[order[i]] + 1e-12);
}

TEST(Wsm, RandomOrderIsSeededPermutation) {
  const auto w = sample_weights(3, 50, 1);
  const auto a = order_weights(w, WeightOrdering::Random, 8);
  EXPECT_EQ(a, order_weights(w, WeightOrdering::Random, 8));
  EXPECT_NE(a, order_weights(w, WeightOrdering::Random, 9));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> id(50);
  std::iota(id.begin(), id.end(), 0);
  EXPECT_EQ(sorted, id);
}

TEST(Wsm, ScalarizedObjective) {
  Problem p;
  p.num_vars = 2;
  p.objectives = {{2, 0}, {0, 2}};
  EXPECT_EQ(scalarized_objective(p, {0.5, 0.5}), (std::vector<double>{1, 1}));
  p.objectives = {{3, -1}, {3, -1}};
  const auto r = scalarized_objective(p, {0.3, 0.7});
  EXPECT_NEAR(r[0], 3, 1e-15);
  EXPECT_NEAR(r[1], -1, 1e-15);
  EXPECT_THROW(scalarized_objective(p, {1.0}), DimensionError);

  const auto kp = gen_knapsack({Family::KP, 12, 4, 3});
  const auto w = sample_weights(4, 1, 2)[0];
  const auto row = scalarized_objective(kp, w);
  for (std::size_t j = 0; j < kp.num_vars; ++j) {
    double s = 0;
    for (std::size_t k = 4; k-- > 0;) s += kp.objectives[k][j] * w[k];
    EXPECT_NEAR(row[j], s, 1e-12);
  }
}

TEST(Wsm, SingleSample) {
  const auto kp = gen_knapsack({Family::KP, 8, 3, 2});
  WsmConfig cfg;
  cfg.num_samples = 1;
  const auto rep = run_wsm(kp, cfg);
  ASSERT_EQ(rep.archive.size(), 1u);
  const auto front = brute_force_oracle(kp).objective_vectors();
  EXPECT_TRUE(is_supported(rep.archive.entries()[0].objectives, front));
}

TEST(Wsm, PointsAreSupportedWeightedOptima) {
  const auto kp = gen_knapsack({Family::KP, 10, 3, 1});
  const auto front = brute_force_oracle(kp).objective_vectors();
  WsmConfig cfg;
  cfg.num_samples = 100;
  cfg.seed = 5;
  const auto rep = run_wsm(kp, cfg);
  for (const auto& e : rep.archive.entries()) {
    EXPECT_TRUE(is_supported(e.objectives, front));
    bool on_front = false;
    for (const auto& y : front) on_front = on_front || y == e.objectives;
    EXPECT_TRUE(on_front);
  }
  for (const auto& r : rep.records) {
    ASSERT_EQ(r.status, CellStatus::Optimal);
    double best = kInf;
    for (const auto& y : front) best = std::min(best, dot(r.params, y));
    EXPECT_NEAR(dot(r.params, r.image), best, 1e-9);
  }
}

TEST(Wsm, WarmStartAndOrderingDoNotChangeTheArchive) {
  const auto kp = gen_knapsack({Family::KP, 12, 3, 4});
  WsmConfig base;
  base.num_samples = 40;
  base.seed = 3;
  const auto cold = run_wsm(kp, base);
  std::map<std::string, SubproblemRecord> by_key;
  for (const auto& r : cold.records) by_key[r.key] = r;
  for (auto ordering : {WeightOrdering::Random, WeightOrdering::Lexicographic, WeightOrdering::Angle})
    for (auto warm : {WsmWarm::None, WsmWarm::Previous}) {
      auto cfg = base;
      cfg.ordering = ordering;
      cfg.warm_start = warm;
      const auto rep = run_wsm(kp, cfg);
      EXPECT_TRUE(rep.archive.same_front(cold.archive));
      if (warm == WsmWarm::Previous) {
        EXPECT_EQ(rep.totals.injections, base.num_samples - 1);
        EXPECT_EQ(rep.records.front().warm, WarmKind::None);
        EXPECT_EQ(rep.records.back().warm, WarmKind::Both);
      }
      // Same weight, same optimal value regardless of position.
      for (const auto& r : rep.records) {
        const auto& c = by_key.at(r.key);
        EXPECT_EQ(c.params, r.params);
        EXPECT_NEAR(c.value, r.value, 1e-6);
      }
    }
}

TEST(Wsm, Deterministic) {
  const auto ap = gen_assignment({Family::AP, 4, 3, 2});
  WsmConfig cfg;
  cfg.num_samples = 20;
  cfg.ordering = WeightOrdering::Angle;
  cfg.warm_start = WsmWarm::Previous;
  const auto a = run_wsm(ap, cfg), b = run_wsm(ap, cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].lp_iters, b.records[i].lp_iters);
    EXPECT_EQ(a.records[i].nodes, b.records[i].nodes);
    EXPECT_EQ(a.records[i].image, b.records[i].image);
  }
  EXPECT_TRUE(a.archive.same_front(b.archive));
  EXPECT_NO_THROW(a.validate());
}
