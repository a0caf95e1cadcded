#include "bpr/models.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bpr/errors.hpp"

namespace bpr {

MFModel::MFModel(std::size_t num_users, std::size_t num_items, std::size_t k)
    : num_users_(num_users), num_items_(num_items), k_(k), w_(num_users * k, 0.0), h_(num_items * k, 0.0) {
  if (k < 1) throw ConfigError("factor dimensionality k must be >= 1");
}

std::span<double> MFModel::user_row(UserIndex u) {
  if (u >= num_users_) throw BoundsError("user index " + std::to_string(u) + " out of range");
  return {w_.data() + u * k_, k_};
}

std::span<const double> MFModel::user_row(UserIndex u) const {
  if (u >= num_users_) throw BoundsError("user index " + std::to_string(u) + " out of range");
  return {w_.data() + u * k_, k_};
}

std::span<double> MFModel::item_row(ItemIndex i) {
  if (i >= num_items_) throw BoundsError("item index " + std::to_string(i) + " out of range");
  return {h_.data() + i * k_, k_};
}

std::span<const double> MFModel::item_row(ItemIndex i) const {
  if (i >= num_items_) throw BoundsError("item index " + std::to_string(i) + " out of range");
  return {h_.data() + i * k_, k_};
}

double MFModel::score(UserIndex u, ItemIndex i) const {
  const auto w = user_row(u);
  const auto h = item_row(i);
  double s = 0.0;
  for (std::size_t f = 0; f < k_; ++f) s += w[f] * h[f];
  return s;
}

KNNModel::KNNModel(std::size_t num_items)
    : num_items_(num_items), cells_(num_items < 2 ? 0 : num_items * (num_items - 1) / 2, 0.0) {}

std::size_t KNNModel::cell_index(ItemIndex a, ItemIndex b) const {
  if (a >= num_items_ || b >= num_items_) throw BoundsError("item index out of range");
  if (a == b) throw ArgumentError("the similarity diagonal is not a parameter");
  if (a > b) std::swap(a, b);
  const std::size_t lo = a;
  return lo * num_items_ - lo * (lo + 1) / 2 + (b - lo - 1);
}

double KNNModel::score(std::span<const ItemIndex> profile, ItemIndex i) const {
  if (i >= num_items_) throw BoundsError("item index out of range");
  double s = 0.0;
  for (const ItemIndex l : profile) {
    if (l != i) s += cells_[cell_index(i, l)];
  }
  return s;
}

PopularityModel PopularityModel::from_dataset(const Dataset& train) {
  std::vector<std::uint64_t> counts(train.num_items());
  for (ItemIndex i = 0; i < train.num_items(); ++i) counts[i] = train.users_of(i).size();
  return PopularityModel(std::move(counts));
}

PopularityModel PopularityModel::from_pairs(std::size_t num_items, std::span<const Interaction> pairs) {
  std::vector<std::uint64_t> counts(num_items, 0);
  for (const auto& p : pairs) {
    if (p.item >= num_items) throw BoundsError("item index out of range");
    ++counts[p.item];
  }
  return PopularityModel(std::move(counts));
}

double PopularityModel::score(UserIndex, ItemIndex i) const {
  if (i >= counts_.size()) throw BoundsError("item index out of range");
  return static_cast<double>(counts_[i]);
}

double mf_score(const MFModel& m, UserIndex u, ItemIndex i) { return m.score(u, i); }

double knn_score(const KNNModel& m, std::span<const ItemIndex> profile, ItemIndex i) {
  return m.score(profile, i);
}

double pop_score(const PopularityModel& m, UserIndex u, ItemIndex i) { return m.score(u, i); }

double pair_score(const MFModel& m, const Triple& t) {
  if (t.i == t.j) throw ArgumentError("pair score needs two distinct items");
  return m.score(t.u, t.i) - m.score(t.u, t.j);
}

double pair_score(const KNNModel& m, std::span<const ItemIndex> profile, const Triple& t) {
  if (t.i == t.j) throw ArgumentError("pair score needs two distinct items");
  return m.score(profile, t.i) - m.score(profile, t.j);
}

PairGradient mf_pair_gradient(const MFModel& m, const Triple& t) {
  const std::size_t k = m.k();
  const auto w = m.user_row(t.u);
  const auto hi = m.item_row(t.i);
  const auto hj = m.item_row(t.j);
  PairGradient g;
  g.entries.reserve(3 * k);
  for (std::size_t f = 0; f < k; ++f) {
    g.entries.push_back({ParamGroup::kUser, t.u * k + f, hi[f] - hj[f]});
    g.entries.push_back({ParamGroup::kPositiveItem, t.i * k + f, w[f]});
    g.entries.push_back({ParamGroup::kNegativeItem, t.j * k + f, -w[f]});
  }
  return g;
}

PairGradient knn_pair_gradient(const KNNModel& m, const Triple& t, std::span<const ItemIndex> profile) {
  PairGradient g;
  g.entries.reserve(2 * profile.size());
  for (const ItemIndex l : profile) {
    if (l != t.i) g.entries.push_back({ParamGroup::kPositiveCell, m.cell_index(t.i, l), 1.0});
  }
  for (const ItemIndex l : profile) {
    if (l != t.j) g.entries.push_back({ParamGroup::kNegativeCell, m.cell_index(t.j, l), -1.0});
  }
  return g;
}

MFModel init_mf(std::size_t num_users, std::size_t num_items, std::size_t k, double init_sigma,
                std::uint64_t seed) {
  if (k < 1) throw ConfigError("factor dimensionality k must be >= 1");
  if (!(init_sigma >= 0.0) || !std::isfinite(init_sigma)) throw ConfigError("init_sigma must be finite and >= 0");
  MFModel m(num_users, num_items, k);
  if (init_sigma == 0.0) return m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, init_sigma);
  for (auto& x : m.user_factors()) x = gauss(rng);
  for (auto& x : m.item_factors()) x = gauss(rng);
  return m;
}

KNNModel init_knn(std::size_t num_items) { return KNNModel(num_items); }

KNNModel cosine_similarity(const Dataset& d) {
  KNNModel m(d.num_items());
  auto& cells = m.cells();
  // Co-occurrence counts accumulate in the cell array, then get normalized.
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto items = d.items_of(u);
    for (std::size_t a = 0; a < items.size(); ++a) {
      for (std::size_t b = a + 1; b < items.size(); ++b) cells[m.cell_index(items[a], items[b])] += 1.0;
    }
  }
  for (ItemIndex i = 0; i < d.num_items(); ++i) {
    const double ni = static_cast<double>(d.users_of(i).size());
    for (ItemIndex j = i + 1; j < d.num_items(); ++j) {
      const double nj = static_cast<double>(d.users_of(j).size());
      auto& c = cells[m.cell_index(i, j)];
      c = (ni == 0.0 || nj == 0.0) ? 0.0 : c / std::sqrt(ni * nj);
    }
  }
  return m;
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double score(const Model& m, const Dataset& train, UserIndex u, ItemIndex i) {
  return std::visit(Overloaded{
                        [&](const MFModel& mf) { return mf.score(u, i); },
                        [&](const KNNModel& knn) { return knn.score(train.items_of(u), i); },
                        [&](const PopularityModel& pop) { return pop.score(u, i); },
                    },
                    m);
}

void score_items(const Model& m, const Dataset& train, UserIndex u, std::span<double> out) {
  std::visit(Overloaded{
                 [&](const MFModel& mf) {
                   const auto w = mf.user_row(u);
                   for (ItemIndex i = 0; i < out.size(); ++i) {
                     const auto h = mf.item_row(i);
                     double s = 0.0;
                     for (std::size_t f = 0; f < mf.k(); ++f) s += w[f] * h[f];
                     out[i] = s;
                   }
                 },
                 [&](const KNNModel& knn) {
                   std::fill(out.begin(), out.end(), 0.0);
                   for (const ItemIndex l : train.items_of(u)) {
                     for (ItemIndex i = 0; i < out.size(); ++i) {
                       if (i != l) out[i] += knn.get(i, l);
                     }
                   }
                 },
                 [&](const PopularityModel& pop) {
                   for (ItemIndex i = 0; i < out.size(); ++i) out[i] = pop.score(u, i);
                 },
             },
             m);
}

void check_compatible(const Model& m, const Dataset& d) {
  std::visit(Overloaded{
                 [&](const MFModel& mf) {
                   if (mf.num_users() != d.num_users() || mf.num_items() != d.num_items()) {
                     throw DimensionError("model is " + std::to_string(mf.num_users()) + " users x " +
                                       std::to_string(mf.num_items()) + " items, data is " +
                                       std::to_string(d.num_users()) + " x " + std::to_string(d.num_items()));
                   }
                 },
                 [&](const auto& other) {
                   if (other.num_items() != d.num_items()) {
                     throw DimensionError("model has " + std::to_string(other.num_items()) + " items, data has " +
                                       std::to_string(d.num_items()));
                   }
                 },
             },
             m);
}

}  // namespace bpr
