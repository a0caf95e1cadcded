#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/evaluation.hpp"
#include "bpr/synthetic.hpp"
#include "oracles.hpp"

namespace bpr {
namespace {

// Per-(user, item) Gaussian scores fixed at construction.
struct RandomScores {
  std::size_t num_items;
  std::vector<double> table;

  RandomScores(std::size_t users, std::size_t items, std::uint64_t seed) : num_items(items), table(users * items) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& x : table) x = g(rng);
  }
  double operator()(UserIndex u, ItemIndex i) const { return table[u * num_items + i]; }
  UserScorer scorer(std::function<double(double)> f = [](double x) { return x; }) const {
    return [this, f](UserIndex u, std::span<double> out) {
      for (ItemIndex i = 0; i < out.size(); ++i) out[i] = f((*this)(u, i));
    };
  }
};

SplitPair random_split(std::size_t users, std::size_t items, double density, std::mt19937_64& rng) {
  return leave_one_out_split(oracle::random_dataset(users, items, density, rng), rng());
}

UserScorer from_fn(const oracle::ScoreFn& f) {
  return [f](UserIndex u, std::span<double> out) {
    for (ItemIndex i = 0; i < out.size(); ++i) out[i] = f(u, i);
  };
}

TEST(EvaluateAuc, PerfectSeparation) {
  std::mt19937_64 rng(1);
  const SplitPair s = random_split(15, 20, 0.3, rng);
  std::set<std::pair<UserIndex, ItemIndex>> test;
  for (const auto& p : s.test) test.insert({p.user, p.item});
  const auto perfect = from_fn([&](UserIndex u, ItemIndex i) { return test.count({u, i}) ? 1.0 : 0.0; });
  const EvalReport r = evaluate_auc(perfect, s);
  EXPECT_EQ(r.mean_auc, 1.0);
  EXPECT_EQ(r.tie_count, 0u);
  EXPECT_EQ(r.num_eval_users, s.test.size());
}

TEST(EvaluateAuc, ConstantScoresAreAllTies) {
  std::mt19937_64 rng(2);
  const SplitPair s = random_split(15, 20, 0.3, rng);
  const auto constant = from_fn([](UserIndex, ItemIndex) { return 3.0; });
  const EvalReport r = evaluate_auc(constant, s);
  EXPECT_EQ(r.mean_auc, 0.0);
  std::size_t pairs = 0;
  for (const auto& row : r.per_user) pairs += row.num_pairs;
  EXPECT_EQ(r.tie_count, pairs);
  EXPECT_DOUBLE_EQ(evaluate_auc(constant, s, {.half_credit_ties = true}).mean_auc, 0.5);
}

TEST(EvaluateAuc, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 15; ++rep) {
    const SplitPair s = random_split(3 + rep, 10 + 2 * rep, 0.25, rng);
    const RandomScores scores(s.train.num_users(), s.train.num_items(), rep);
    EXPECT_NEAR(evaluate_auc(scores.scorer(), s).mean_auc, oracle::brute_auc(scores, s), 1e-12);
  }
}

TEST(EvaluateAuc, MeanOfPerUserAndInRange) {
  std::mt19937_64 rng(4);
  const SplitPair s = random_split(20, 30, 0.2, rng);
  const RandomScores scores(20, 30, 5);
  const EvalReport r = evaluate_auc(scores.scorer(), s);
  double sum = 0.0;
  for (const auto& row : r.per_user) {
    EXPECT_GE(row.auc, 0.0);
    EXPECT_LE(row.auc, 1.0);
    sum += row.auc;
  }
  EXPECT_DOUBLE_EQ(r.mean_auc, sum / static_cast<double>(r.per_user.size()));
}

TEST(EvaluateAuc, MonotoneTransformInvariance) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const SplitPair s = random_split(12, 25, 0.25, rng);
    const RandomScores scores(12, 25, 100 + rep);
    const EvalReport base = evaluate_auc(scores.scorer(), s);
    const EvalReport cubed = evaluate_auc(scores.scorer([](double x) { return x * x * x + 2.0 * x; }), s);
    const EvalReport squashed = evaluate_auc(scores.scorer([](double x) { return std::atan(x); }), s);
    EXPECT_EQ(base.mean_auc, cubed.mean_auc);
    EXPECT_EQ(base.mean_auc, squashed.mean_auc);
  }
}

TEST(EvaluateAuc, NegationDuality) {
  std::mt19937_64 rng(6);
  const SplitPair s = random_split(12, 25, 0.25, rng);
  const RandomScores scores(12, 25, 7);
  const EvalReport base = evaluate_auc(scores.scorer(), s);
  const EvalReport neg = evaluate_auc(scores.scorer([](double x) { return -x; }), s);
  ASSERT_EQ(base.tie_count, 0u);
  ASSERT_EQ(base.per_user.size(), neg.per_user.size());
  for (std::size_t n = 0; n < base.per_user.size(); ++n) {
    EXPECT_NEAR(neg.per_user[n].auc, 1.0 - base.per_user[n].auc, 1e-15);
  }
}

TEST(EvaluateAuc, ExcludesUsersWithoutNegatives) {
  // u0 holds every item between train and test.
  const Dataset train = Dataset::from_pairs({"u0", "u1"}, {"a", "b", "c"}, {{0, 0}, {0, 2}, {1, 0}});
  const SplitPair s = make_split(train, {{0, 1}, {1, 1}});
  const EvalReport r = evaluate_auc(from_fn([](UserIndex, ItemIndex i) { return -double(i); }), s);
  EXPECT_EQ(r.excluded_users, 1u);
  EXPECT_EQ(r.num_eval_users, 1u);
}

TEST(EvaluateAuc, ModelOverloadChecksDimensions) {
  std::mt19937_64 rng(7);
  const SplitPair s = random_split(6, 8, 0.4, rng);
  EXPECT_THROW(evaluate_auc(Model{MFModel(6, 9, 2)}, s), DimensionError);
}

TEST(EvaluateAuc, ReportCsv) {
  const Dataset train = Dataset::from_pairs({"a", "b"}, {"x", "y", "z"}, {{0, 0}, {1, 0}});
  const SplitPair s = make_split(train, {{0, 1}, {1, 2}});
  const EvalReport r = evaluate_auc(from_fn([](UserIndex, ItemIndex i) { return double(i); }), s);
  std::ostringstream out;
  r.write_csv(out, s.train);
  EXPECT_EQ(out.str(), "user,auc,num_pairs,ties\na,0,1,0\nb,1,1,0\nmean,0.5,2,0\n");
}

TEST(AucTrainIdentity, EqualsMeanPerUserAuc) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = oracle::random_dataset(5 + rep, 6 + rep, 0.35, rng);
    const RandomScores scores(d.num_users(), d.num_items(), rep);
    EXPECT_NEAR(auc_train_identity(scores.scorer(), d), oracle::brute_train_auc(scores, d), 1e-12);
  }
}

TEST(AucTrainIdentity, PerfectAndNegated) {
  std::mt19937_64 rng(9);
  const Dataset d = oracle::random_dataset(10, 12, 0.3, rng);
  const auto perfect = from_fn([&](UserIndex u, ItemIndex i) { return d.contains(u, i) ? 1.0 : 0.0; });
  EXPECT_NEAR(auc_train_identity(perfect, d), 1.0, 1e-12);
  const RandomScores scores(10, 12, 4);
  const double base = auc_train_identity(scores.scorer(), d);
  const double neg = auc_train_identity(scores.scorer([](double x) { return -x; }), d);
  EXPECT_NEAR(neg, 1.0 - base, 1e-12);
  EXPECT_THROW(auc_train_identity(perfect, d, 5), SizeError);
}

TEST(NpMax, HomogeneousUsersReachOne) {
  // Every user: train {a}, test {b}, negatives {c, d}.
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  for (UserIndex u = 0; u < 4; ++u) {
    train.push_back({u, 0});
    test.push_back({u, 1});
  }
  const SplitPair s = make_split(Dataset::from_pairs({"u0", "u1", "u2", "u3"}, {"a", "b", "c", "d"}, train), test);
  EXPECT_NEAR(np_max_bound(s), 1.0, 1e-15);
  EXPECT_NEAR(oracle::best_permutation_auc(s), 1.0, 1e-15);
}

TEST(NpMax, OpposingUsersSplitTheVote) {
  const Dataset train = Dataset::from_pairs({"u0", "u1"}, {"a", "b", "c"}, {{0, 2}, {1, 2}});
  const SplitPair s = make_split(train, {{0, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(np_max_bound(s), 0.5);
  EXPECT_DOUBLE_EQ(oracle::best_permutation_auc(s), 0.5);
}

TEST(NpMax, BoundsEveryPermutationOnTinyInstances) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    const SplitPair s = random_split(4 + rep % 5, 4 + rep % 3, 0.45, rng);
    if (s.test.empty()) continue;
    const double bound = np_max_bound(s);
    EXPECT_GE(bound + 1e-12, oracle::best_permutation_auc(s));
    EXPECT_LE(bound, 1.0 + 1e-12);
  }
}

TEST(NpMax, OrderingAucMatchesBruteForce) {
  std::mt19937_64 rng(11);
  const SplitPair s = random_split(10, 7, 0.4, rng);
  std::vector<std::size_t> rank(7);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  const double expected =
      oracle::brute_auc([&](UserIndex, ItemIndex i) { return -static_cast<double>(rank[i]); }, s);
  EXPECT_NEAR(auc_of_ordering(rank, s), expected, 1e-12);
}

TEST(MostPopularOnTest, EqualsPopularityModelFromTestCounts) {
  SyntheticConfig c;
  c.num_users = 80;
  c.num_items = 40;
  c.interactions_per_user = 5;
  const SplitPair s = leave_one_out_split(generate_synthetic(c), 3);
  const Model pop = PopularityModel::from_pairs(40, s.test);
  EXPECT_EQ(most_popular_on_test_auc(s), evaluate_auc(pop, s).mean_auc);
}

TEST(RandomScores, NearOneHalf) {
  SyntheticConfig c;
  const SplitPair s = leave_one_out_split(generate_synthetic(c), 0);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RandomScores scores(c.num_users, c.num_items, seed);
    sum += evaluate_auc(scores.scorer(), s).mean_auc;
  }
  EXPECT_NEAR(sum / 10.0, 0.5, 0.02);
}

}  // namespace
}  // namespace bpr
