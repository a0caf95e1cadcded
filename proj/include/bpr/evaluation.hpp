#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/models.hpp"

namespace bpr {

/// Fills `scores` (size |I|) with x_ui for every item of user u.
using UserScorer = std::function<void(UserIndex u, std::span<double> scores)>;

/// Scorer backed by a model; kNN profiles come from `train`. Both arguments
/// must outlive the returned function.
UserScorer model_scorer(const Model& m, const Dataset& train);

struct UserAuc {
  UserIndex user;
  double auc;
  std::size_t num_pairs;  // |E(u)|
  std::size_t ties;
};

struct EvalReport {
  double mean_auc = 0.0;
  std::vector<UserAuc> per_user;  // ascending user index
  std::size_t num_eval_users = 0;
  std::size_t tie_count = 0;
  std::size_t excluded_users = 0;  // test users with empty E(u)

  /// CSV "user,auc,num_pairs,ties" followed by a "mean,<auc>,<pairs>,<ties>" line.
  void write_csv(std::ostream& out, const Dataset& index_space) const;
};

struct AucOptions {
  /// Count x_ui == x_uj as 1/2 instead of 0.
  bool half_credit_ties = false;
};

/// Held-out AUC averaged over test users:
///   AUC(u) = 1/|E(u)| * sum_{(i,j) in E(u)} [x_ui > x_uj]
/// with E(u) = {(i, j) | (u,i) in test, (u,j) in neither train nor test}.
EvalReport evaluate_auc(const UserScorer& scorer, const SplitPair& split, const AucOptions& opt = {});
EvalReport evaluate_auc(const Model& m, const SplitPair& split, const AucOptions& opt = {});

/// sum over D_S of z_u [x_uij > 0], z_u = 1 / (|U'| |I_u^+| |I \ I_u^+|), where
/// U' counts users with a nonempty, non-full profile. Throws SizeError past `cap`.
double auc_train_identity(const UserScorer& scorer, const Dataset& d,
                          std::uint64_t cap = 10'000'000);

/// AUC of a single item ordering shared by all users; `rank[i]` is the
/// position of item i, lower is better.
double auc_of_ordering(std::span<const std::size_t> rank, const SplitPair& split);

/// Upper bound on the held-out AUC of any non-personalized ranking. Each
/// unordered item pair contributes max(a, b), the better of its two
/// orientations' weighted votes; transitivity is ignored, so the bound is
/// valid but not tight.
double np_max_bound(const SplitPair& split);

/// Held-out AUC of ranking items by their test-set counts.
double most_popular_on_test_auc(const SplitPair& split);

}  // namespace bpr
