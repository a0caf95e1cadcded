#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/sampler.hpp"

namespace bpr {

/// X^ = W H^t. Rows are stored contiguously, row-major.
class MFModel {
 public:
  MFModel() = default;
  MFModel(std::size_t num_users, std::size_t num_items, std::size_t k);

  std::size_t num_users() const noexcept { return num_users_; }
  std::size_t num_items() const noexcept { return num_items_; }
  std::size_t k() const noexcept { return k_; }

  std::span<double> user_row(UserIndex u);
  std::span<const double> user_row(UserIndex u) const;
  std::span<double> item_row(ItemIndex i);
  std::span<const double> item_row(ItemIndex i) const;

  std::vector<double>& user_factors() noexcept { return w_; }
  const std::vector<double>& user_factors() const noexcept { return w_; }
  std::vector<double>& item_factors() noexcept { return h_; }
  const std::vector<double>& item_factors() const noexcept { return h_; }

  /// <w_u, h_i>. Throws BoundsError.
  double score(UserIndex u, ItemIndex i) const;

  friend bool operator==(const MFModel&, const MFModel&) = default;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::size_t k_ = 0;
  std::vector<double> w_;
  std::vector<double> h_;
};

/// Symmetric item-similarity matrix C with a zero diagonal, stored as the
/// strict upper triangle. Both (a, b) and (b, a) address the same cell.
class KNNModel {
 public:
  KNNModel() = default;
  explicit KNNModel(std::size_t num_items);

  std::size_t num_items() const noexcept { return num_items_; }
  std::size_t num_cells() const noexcept { return cells_.size(); }

  /// Storage slot of the unordered pair {a, b}; a != b.
  std::size_t cell_index(ItemIndex a, ItemIndex b) const;
  double get(ItemIndex a, ItemIndex b) const { return cells_[cell_index(a, b)]; }
  void set(ItemIndex a, ItemIndex b, double v) { cells_[cell_index(a, b)] = v; }

  std::vector<double>& cells() noexcept { return cells_; }
  const std::vector<double>& cells() const noexcept { return cells_; }

  /// sum of c_il over l in profile, l != i.
  double score(std::span<const ItemIndex> profile, ItemIndex i) const;

  friend bool operator==(const KNNModel&, const KNNModel&) = default;

 private:
  std::size_t num_items_ = 0;
  std::vector<double> cells_;
};

/// Most-popular baseline: x_ui = |U_i^+| of the training data.
class PopularityModel {
 public:
  PopularityModel() = default;
  explicit PopularityModel(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {}
  static PopularityModel from_dataset(const Dataset& train);
  /// Counts items over an arbitrary pair list, `num_items` wide.
  static PopularityModel from_pairs(std::size_t num_items, std::span<const Interaction> pairs);

  std::size_t num_items() const noexcept { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  double score(UserIndex u, ItemIndex i) const;

  friend bool operator==(const PopularityModel&, const PopularityModel&) = default;

 private:
  std::vector<std::uint64_t> counts_;
};

/// Parameter group of a gradient coordinate; selects the regularizer.
enum class ParamGroup : std::uint8_t {
  kUser,          // w_u       (lambda_W)
  kPositiveItem,  // h_i       (lambda_H+)
  kNegativeItem,  // h_j       (lambda_H-)
  kPositiveCell,  // c_il      (lambda_+)
  kNegativeCell,  // c_jl      (lambda_-)
};

struct GradientEntry {
  ParamGroup group;
  std::size_t index;  // flat offset into W, H or the cell array
  double value;       // d x_uij / d theta
};

/// Sparse d x_uij / d Theta. Holds every coordinate the triple's pair score
/// depends on; an entry's value can still be numerically zero (h_i = h_j).
struct PairGradient {
  std::vector<GradientEntry> entries;
};

double mf_score(const MFModel& m, UserIndex u, ItemIndex i);
double knn_score(const KNNModel& m, std::span<const ItemIndex> profile, ItemIndex i);
double pop_score(const PopularityModel& m, UserIndex u, ItemIndex i);

/// x_uij = x_ui - x_uj. Throws ArgumentError when i == j.
double pair_score(const MFModel& m, const Triple& t);
double pair_score(const KNNModel& m, std::span<const ItemIndex> profile, const Triple& t);

PairGradient mf_pair_gradient(const MFModel& m, const Triple& t);
/// `profile` must be I_u^+ of the training data (contains t.i, not t.j).
PairGradient knn_pair_gradient(const KNNModel& m, const Triple& t, std::span<const ItemIndex> profile);

/// Gaussian N(0, init_sigma^2) entries. Throws ConfigError for k < 1.
MFModel init_mf(std::size_t num_users, std::size_t num_items, std::size_t k, double init_sigma,
                std::uint64_t seed);
KNNModel init_knn(std::size_t num_items);

/// c_ij = |U_i ∩ U_j| / sqrt(|U_i| |U_j|), zero for items without users.
KNNModel cosine_similarity(const Dataset& d);

using Model = std::variant<MFModel, KNNModel, PopularityModel>;

/// x_ui for any model kind; kNN profiles come from `train`.
double score(const Model& m, const Dataset& train, UserIndex u, ItemIndex i);

/// Fills `out` (size |I|) with x_ui for every item.
void score_items(const Model& m, const Dataset& train, UserIndex u, std::span<double> out);

/// Checks the model's dimensions against a dataset; throws DimensionError.
void check_compatible(const Model& m, const Dataset& d);

}  // namespace bpr
