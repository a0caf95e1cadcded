#include "bpr/evaluation.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

#include "bpr/errors.hpp"
#include "bpr/format.hpp"
#include "bpr/sampler.hpp"

namespace bpr {

namespace {

// Test items grouped by user, ascending user index.
std::map<UserIndex, std::vector<ItemIndex>> test_by_user(const SplitPair& split) {
  std::map<UserIndex, std::vector<ItemIndex>> out;
  for (const auto& p : split.test) {
    if (p.user >= split.train.num_users() || p.item >= split.train.num_items()) {
      throw BoundsError("test pair outside the training index space");
    }
    out[p.user].push_back(p.item);
  }
  for (auto& [u, items] : out) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return out;
}

// Items j with (u, j) in neither train nor test.
std::vector<ItemIndex> eval_negatives(const Dataset& train, UserIndex u, std::span<const ItemIndex> test_items) {
  const auto profile = train.items_of(u);
  std::vector<ItemIndex> out;
  out.reserve(train.num_items());
  for (ItemIndex j = 0; j < train.num_items(); ++j) {
    if (std::binary_search(profile.begin(), profile.end(), j)) continue;
    if (std::binary_search(test_items.begin(), test_items.end(), j)) continue;
    out.push_back(j);
  }
  return out;
}

}  // namespace

UserScorer model_scorer(const Model& m, const Dataset& train) {
  return [&m, &train](UserIndex u, std::span<double> out) { score_items(m, train, u, out); };
}

void EvalReport::write_csv(std::ostream& out, const Dataset& index_space) const {
  out << "user,auc,num_pairs,ties\n";
  std::size_t pairs = 0;
  for (const auto& row : per_user) {
    out << index_space.user_ids()[row.user] << ',' << format_double(row.auc) << ',' << row.num_pairs << ','
        << row.ties << '\n';
    pairs += row.num_pairs;
  }
  out << "mean," << format_double(mean_auc) << ',' << pairs << ',' << tie_count << '\n';
}

EvalReport evaluate_auc(const UserScorer& scorer, const SplitPair& split, const AucOptions& opt) {
  const Dataset& train = split.train;
  EvalReport report;
  std::vector<double> scores(train.num_items());
  double sum = 0.0;
  for (const auto& [u, test_items] : test_by_user(split)) {
    const auto negatives = eval_negatives(train, u, test_items);
    const std::size_t num_pairs = test_items.size() * negatives.size();
    if (num_pairs == 0) {
      ++report.excluded_users;
      continue;
    }
    scorer(u, scores);
    std::size_t hits = 0;
    std::size_t ties = 0;
    for (const ItemIndex i : test_items) {
      const double si = scores[i];
      for (const ItemIndex j : negatives) {
        if (si > scores[j]) {
          ++hits;
        } else if (si == scores[j]) {
          ++ties;
        }
      }
    }
    const double credit = static_cast<double>(hits) + (opt.half_credit_ties ? 0.5 * static_cast<double>(ties) : 0.0);
    const double auc = credit / static_cast<double>(num_pairs);
    report.per_user.push_back({u, auc, num_pairs, ties});
    report.tie_count += ties;
    sum += auc;
  }
  report.num_eval_users = report.per_user.size();
  report.mean_auc = report.num_eval_users == 0 ? 0.0 : sum / static_cast<double>(report.num_eval_users);
  return report;
}

EvalReport evaluate_auc(const Model& m, const SplitPair& split, const AucOptions& opt) {
  check_compatible(m, split.train);
  return evaluate_auc(model_scorer(m, split.train), split, opt);
}

double auc_train_identity(const UserScorer& scorer, const Dataset& d, std::uint64_t cap) {
  const std::uint64_t total = count_triples(d);
  if (total > cap) {
    throw SizeError("|D_S| = " + std::to_string(total) + " exceeds cap " + std::to_string(cap),
                    static_cast<std::size_t>(total));
  }
  const std::size_t eligible = count_eligible_users(d);
  if (eligible == 0) return 0.0;

  std::vector<double> scores(d.num_items());
  double sum = 0.0;
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto profile = d.items_of(u);
    const std::size_t pos = profile.size();
    if (pos == 0 || pos == d.num_items()) continue;
    const double z = 1.0 / (static_cast<double>(eligible) * static_cast<double>(pos) *
                            static_cast<double>(d.num_items() - pos));
    scorer(u, scores);
    for (const ItemIndex i : profile) {
      for (ItemIndex j = 0; j < d.num_items(); ++j) {
        if (std::binary_search(profile.begin(), profile.end(), j)) continue;
        if (scores[i] - scores[j] > 0.0) sum += z;
      }
    }
  }
  return sum;
}

double auc_of_ordering(std::span<const std::size_t> rank, const SplitPair& split) {
  if (rank.size() != split.train.num_items()) throw ArgumentError("ordering must cover every item");
  const UserScorer scorer = [rank](UserIndex, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -static_cast<double>(rank[i]);
  };
  return evaluate_auc(scorer, split).mean_auc;
}

double np_max_bound(const SplitPair& split) {
  const Dataset& train = split.train;
  const std::size_t ni = train.num_items();

  struct Contribution {
    std::vector<ItemIndex> test_items;
    std::vector<ItemIndex> negatives;
  };
  std::vector<Contribution> users;
  for (const auto& [u, test_items] : test_by_user(split)) {
    auto negatives = eval_negatives(train, u, test_items);
    if (test_items.empty() || negatives.empty()) continue;
    users.push_back({test_items, std::move(negatives)});
  }
  if (users.empty()) return 0.0;

  // votes[r][j]: weight of users preferring row item r over item j.
  std::unordered_map<ItemIndex, std::size_t> row_of;
  std::vector<std::vector<double>> votes;
  const double num_eval = static_cast<double>(users.size());
  for (const auto& c : users) {
    const double weight = 1.0 / (num_eval * static_cast<double>(c.test_items.size() * c.negatives.size()));
    for (const ItemIndex i : c.test_items) {
      auto [it, inserted] = row_of.try_emplace(i, votes.size());
      if (inserted) votes.emplace_back(ni, 0.0);
      auto& row = votes[it->second];
      for (const ItemIndex j : c.negatives) row[j] += weight;
    }
  }

  // Deterministic order over rows.
  std::vector<std::pair<ItemIndex, std::size_t>> rows(row_of.begin(), row_of.end());
  std::sort(rows.begin(), rows.end());
  double bound = 0.0;
  for (const auto& [i, r] : rows) {
    const auto& row = votes[r];
    for (ItemIndex j = 0; j < ni; ++j) {
      if (row[j] == 0.0) continue;
      const auto other = row_of.find(j);
      if (other == row_of.end()) {
        bound += row[j];
      } else if (i < j) {
        bound += std::max(row[j], votes[other->second][i]);
      } else if (votes[other->second][i] == 0.0) {
        // Row j cast no vote against i, so the pair was not counted there.
        bound += row[j];
      }
    }
  }
  return bound;
}

double most_popular_on_test_auc(const SplitPair& split) {
  const Model pop = PopularityModel::from_pairs(split.train.num_items(), split.test);
  return evaluate_auc(pop, split).mean_auc;
}

}  // namespace bpr
