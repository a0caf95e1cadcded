#include <gtest/gtest.h>

#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/experiment.hpp"
#include "bpr/synthetic.hpp"

namespace bpr {
namespace {

Dataset small_synthetic(std::uint64_t seed = 0) {
  SyntheticConfig c;
  c.num_users = 80;
  c.num_items = 50;
  c.interactions_per_user = 6;
  c.seed = seed;
  return generate_synthetic(c);
}

TEST(ModelKind, Names) {
  for (const auto k : {ModelKind::kBprMf, ModelKind::kBprKnn, ModelKind::kCosineKnn, ModelKind::kMostPopular}) {
    EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
  }
  EXPECT_THROW(parse_model_kind("svd-mf"), ConfigError);
}

TEST(ParseGrid, KeyValueLines) {
  std::istringstream in("# grid\nalpha = 0.01, 0.05\n\nlambda=0.001\nk = 4 ,8, 16\n");
  const GridSpec g = parse_grid(in);
  ASSERT_EQ(g.axes.size(), 3u);
  EXPECT_EQ(g.axes[0].first, "alpha");
  EXPECT_EQ(g.axes[0].second, (std::vector<double>{0.01, 0.05}));
  EXPECT_EQ(g.axes[2].second, (std::vector<double>{4, 8, 16}));
  EXPECT_EQ(g.num_candidates(), 6u);
  EXPECT_EQ(g.restricted_to(ModelKind::kBprKnn).num_candidates(), 2u);
  EXPECT_TRUE(g.restricted_to(ModelKind::kMostPopular).axes.empty());
}

TEST(ParseGrid, Errors) {
  for (const char* text : {"alpha 0.1\n", "beta = 1\n", "alpha = 0.1,\n", "alpha = x\n", "k = 1\nk = 2\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_grid(in), ParseError) << text;
  }
}

TEST(GridSearch, EmptyGridIsConfigError) {
  const SplitPair s = leave_one_out_split(small_synthetic(), 0);
  EXPECT_THROW(grid_search(GridSpec{}, ModelConfig{}, s, 0), ConfigError);
  GridSpec g;
  g.axes.push_back({"alpha", {}});
  EXPECT_THROW(grid_search(g, ModelConfig{}, s, 0), ConfigError);
}

TEST(GridSearch, SingleCandidate) {
  const SplitPair s = leave_one_out_split(small_synthetic(), 0);
  GridSpec g;
  g.axes.push_back({"alpha", {0.02}});
  ModelConfig base;
  base.k = 4;
  base.hyper.step_multiplier = 5;
  const GridResult r = grid_search(g, base, s, 1);
  ASSERT_EQ(r.table.size(), 1u);
  EXPECT_EQ(r.best.hyper.alpha, 0.02);
}

TEST(GridSearch, TableSizeAndOrder) {
  const SplitPair s = leave_one_out_split(small_synthetic(), 0);
  GridSpec g;
  g.axes.push_back({"alpha", {0.01, 0.05}});
  g.axes.push_back({"lambda", {0.0, 0.01, 0.1}});
  ModelConfig base;
  base.k = 4;
  base.hyper.step_multiplier = 3;
  const GridResult r = grid_search(g, base, s, 1);
  ASSERT_EQ(r.table.size(), 6u);
  EXPECT_EQ(r.table[0].values, (std::vector<double>{0.01, 0.0}));
  EXPECT_EQ(r.table[1].values, (std::vector<double>{0.01, 0.01}));
  EXPECT_EQ(r.table[5].values, (std::vector<double>{0.05, 0.1}));
}

TEST(GridSearch, RejectsDegenerateLearningRate) {
  const SplitPair s = leave_one_out_split(small_synthetic(), 0);
  GridSpec g;
  g.axes.push_back({"alpha", {1e3, 0.05}});
  ModelConfig base;
  base.k = 8;
  base.hyper.step_multiplier = 30;
  const GridResult r = grid_search(g, base, s, 2);
  EXPECT_EQ(r.best.hyper.alpha, 0.05);
  EXPECT_FALSE(r.table[0].mean_auc >= r.table[1].mean_auc);
}

TEST(GridSearch, TiesGoToFirstCandidate) {
  const SplitPair s = leave_one_out_split(small_synthetic(), 0);
  GridSpec g;
  g.axes.push_back({"alpha", {0.5, 0.01}});  // ignored by most-popular
  ModelConfig base;
  base.kind = ModelKind::kMostPopular;
  const GridResult r = grid_search(g, base, s, 0);
  EXPECT_EQ(r.table[0].mean_auc, r.table[1].mean_auc);
  EXPECT_EQ(r.best.hyper.alpha, 0.5);
}

TEST(RepeatExperiment, SingleRepetition) {
  ModelConfig c;
  c.kind = ModelKind::kMostPopular;
  const TrialSummary s = repeat_experiment(c, small_synthetic(), 1, 0);
  EXPECT_EQ(s.num_repetitions(), 1u);
  EXPECT_FALSE(s.stddev_defined);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_THROW(repeat_experiment(c, small_synthetic(), 0, 0), ConfigError);
}

TEST(RepeatExperiment, DeterministicInBaseSeed) {
  ModelConfig c;
  c.k = 4;
  c.hyper.step_multiplier = 5;
  const Dataset d = small_synthetic();
  const TrialSummary a = repeat_experiment(c, d, 3, 7);
  const TrialSummary b = repeat_experiment(c, d, 3, 7);
  EXPECT_EQ(a.rep_auc, b.rep_auc);
  std::ostringstream out;
  a.write_csv(out);
  EXPECT_EQ(out.str().substr(0, 13), "rep,mean_auc\n");
}

TEST(RepeatExperiment, FirstSplitOverride) {
  ModelConfig c;
  c.kind = ModelKind::kCosineKnn;
  const Dataset d = small_synthetic();
  const SplitPair first = leave_one_out_split(d, 1234);
  const TrialSummary s = repeat_experiment(c, d, 2, 0, &first);
  EXPECT_EQ(s.rep_auc[0], train_and_evaluate(c, first, 0));
  EXPECT_EQ(s.rep_auc[1], train_and_evaluate(c, leave_one_out_split(d, 1), 1));
}

TEST(RepeatExperiment, StableAcrossTenSplits) {
  ModelConfig c;
  c.k = 8;
  const TrialSummary s = repeat_experiment(c, generate_synthetic({}), 10, 0);
  EXPECT_EQ(s.num_repetitions(), 10u);
  EXPECT_TRUE(s.stddev_defined);
  EXPECT_LT(s.stddev, 0.02);
}

}  // namespace
}  // namespace bpr
