#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bpr/dataset.hpp"
#include "bpr/errors.hpp"
#include "oracles.hpp"

namespace bpr {
namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return load_interactions(in);
}

TEST(LoadInteractions, AssignsFirstAppearanceIndices) {
  const Dataset d = parse("a\tx\na\ty\nb\tx\n");
  EXPECT_EQ(d.num_users(), 2u);
  EXPECT_EQ(d.num_items(), 2u);
  EXPECT_EQ(d.num_interactions(), 3u);
  EXPECT_EQ(d.user_ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.item_ids(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(*d.find_item("y"), 1u);
  EXPECT_FALSE(d.find_user("zz").has_value());
}

TEST(LoadInteractions, DeduplicatesAndCounts) {
  const Dataset d = parse("a\tx\na\tx\n");
  EXPECT_EQ(d.num_interactions(), 1u);
  EXPECT_EQ(d.duplicates_removed(), 1u);
}

TEST(LoadInteractions, RejectsWrongFieldCount) {
  try {
    parse("a\tx\tz\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse("# header\na\tx\nbroken\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadInteractions, RejectsEmptyInput) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("# only a comment\n"), ParseError);
}

TEST(LoadInteractions, SkipsCommentsAndCarriageReturns) {
  const Dataset d = parse("# c\na\tx\r\n\nb\ty\n");
  EXPECT_EQ(d.num_interactions(), 2u);
  EXPECT_EQ(d.item_ids()[0], "x");
}

TEST(Dataset, AdjacencyIsAnExactTranspose) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset d = oracle::random_dataset(12, 9, 0.3, rng);
    std::size_t by_user = 0;
    std::size_t by_item = 0;
    for (UserIndex u = 0; u < d.num_users(); ++u) {
      const auto row = d.items_of(u);
      by_user += row.size();
      EXPECT_TRUE(std::is_sorted(row.begin(), row.end()));
      for (const ItemIndex i : row) {
        const auto col = d.users_of(i);
        EXPECT_TRUE(std::binary_search(col.begin(), col.end(), u));
      }
    }
    for (ItemIndex i = 0; i < d.num_items(); ++i) {
      const auto col = d.users_of(i);
      by_item += col.size();
      EXPECT_TRUE(std::is_sorted(col.begin(), col.end()));
      for (const UserIndex u : col) EXPECT_TRUE(d.contains(u, i));
    }
    EXPECT_EQ(by_user, d.num_interactions());
    EXPECT_EQ(by_item, d.num_interactions());
  }
}

TEST(Dataset, RejectsOutOfRangePairs) {
  EXPECT_THROW(Dataset::from_pairs({"a"}, {"x"}, {{0, 1}}), BoundsError);
  EXPECT_THROW(Dataset::from_pairs({"a", "a"}, {"x"}, {}), ArgumentError);
  const Dataset d = Dataset::from_pairs({"a"}, {"x"}, {{0, 0}});
  EXPECT_THROW(d.items_of(1), BoundsError);
}

TEST(LeaveOneOut, SingletonUsersStayInTrain) {
  const Dataset d = parse("a\tx\nb\tx\nb\ty\n");
  const SplitPair s = leave_one_out_split(d, 1);
  EXPECT_EQ(s.skipped_users, 1u);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.test[0].user, *d.find_user("b"));
  EXPECT_EQ(s.train.items_of(*d.find_user("a")).size(), 1u);
}

TEST(LeaveOneOut, TwoItemUsersKeepOneEach) {
  const Dataset d = parse("a\tx\na\ty\nb\tx\nb\tz\nc\ty\nc\tz\n");
  const SplitPair s = leave_one_out_split(d, 9);
  EXPECT_EQ(s.test.size(), d.num_users());
  for (UserIndex u = 0; u < d.num_users(); ++u) EXPECT_EQ(s.train.items_of(u).size(), 1u);
}

TEST(LeaveOneOut, DisjointCoverAndDeterministic) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset d = oracle::random_dataset(15, 10, 0.35, rng);
    const SplitPair s = leave_one_out_split(d, rep);
    std::set<std::pair<UserIndex, ItemIndex>> seen;
    std::set<UserIndex> test_users;
    for (const auto& p : s.test) {
      EXPECT_FALSE(s.train.contains(p.user, p.item));
      EXPECT_TRUE(d.contains(p.user, p.item));
      EXPECT_TRUE(test_users.insert(p.user).second) << "two test pairs for one user";
      EXPECT_GE(s.train.items_of(p.user).size(), 1u);
    }
    EXPECT_EQ(s.train.num_interactions() + s.test.size(), d.num_interactions());
    for (const auto& p : s.train.interactions()) EXPECT_TRUE(d.contains(p.user, p.item));

    const SplitPair again = leave_one_out_split(d, rep);
    EXPECT_EQ(again.test, s.test);
    EXPECT_EQ(again.train.interactions(), s.train.interactions());
  }
}

TEST(LeaveOneOut, HeldOutItemIsUniform) {
  const Dataset d = parse("a\tx\na\ty\na\tz\n");
  std::vector<std::uint64_t> counts(3, 0);
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const SplitPair s = leave_one_out_split(d, seed);
    ASSERT_EQ(s.test.size(), 1u);
    ++counts[s.test[0].item];
  }
  EXPECT_GT(oracle::chi_square_uniform_p(counts), 0.001);
}

TEST(ResolvedPairs, MapsIntoExistingIndexSpace) {
  const Dataset train = parse("a\tx\nb\ty\n");
  std::istringstream in("b\tx\nc\tx\na\tq\nb\tx\n");
  const ResolvedPairs r = load_interactions_into(in, train);
  EXPECT_EQ(r.unknown, 2u);
  EXPECT_EQ(r.duplicates, 1u);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0], (Interaction{1, 0}));

  const SplitPair s = make_split(train, {{1, 0}, {0, 0}});
  EXPECT_EQ(s.test, (std::vector<Interaction>{{1, 0}}));
  EXPECT_EQ(merge_split(s).num_interactions(), 3u);
}

TEST(WriteInteractions, ReloadsToSamePairs) {
  std::mt19937_64 rng(2);
  const Dataset d = oracle::random_dataset(8, 6, 0.5, rng);
  std::ostringstream out;
  write_interactions(out, d);
  const Dataset back = parse(out.str());
  EXPECT_EQ(back.num_interactions(), d.num_interactions());
  for (const auto& p : back.interactions()) {
    EXPECT_TRUE(d.contains(*d.find_user(back.user_ids()[p.user]), *d.find_item(back.item_ids()[p.item])));
  }
}

}  // namespace
}  // namespace bpr
