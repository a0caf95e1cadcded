#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/models.hpp"
#include "bpr/training.hpp"

namespace bpr {

enum class ModelKind { kBprMf, kBprKnn, kCosineKnn, kMostPopular };

/// Accepts "bpr-mf", "bpr-knn", "cosine-knn", "most-popular".
ModelKind parse_model_kind(std::string_view name);
std::string_view model_kind_name(ModelKind kind) noexcept;
bool uses_sgd(ModelKind kind) noexcept;

struct ModelConfig {
  ModelKind kind = ModelKind::kBprMf;
  std::size_t k = 16;
  double init_sigma = 0.1;
  Hyperparams hyper;
  Schedule schedule = Schedule::kBootstrap;
};

struct TrainedModel {
  Model model;
  TrainTrace trace;
};

/// Builds and fits a model on `train`. For SGD models `opt.seed` seeds both
/// initialization and triple sampling (as independent streams); `opt.schedule`
/// is overridden by `config.schedule`.
TrainedModel train_model(const ModelConfig& config, const Dataset& train, TrainOptions opt);

/// Trains on split.train with `seed` and returns the held-out mean AUC.
double train_and_evaluate(const ModelConfig& config, const SplitPair& split, std::uint64_t seed);

struct TrialSummary {
  std::vector<double> rep_auc;
  double mean = 0.0;
  /// Sample standard deviation; 0 and `stddev_defined == false` for one rep.
  double stddev = 0.0;
  bool stddev_defined = false;

  std::size_t num_repetitions() const noexcept { return rep_auc.size(); }
  /// CSV "rep,mean_auc".
  void write_csv(std::ostream& out) const;
};

TrialSummary summarize(std::vector<double> rep_auc);

/// Repetition r splits `data` with seed base_seed + r, trains with the same
/// seed and evaluates. When `first_split` is given it replaces the split of
/// repetition 0. Throws ConfigError for num_reps < 1.
TrialSummary repeat_experiment(const ModelConfig& config, const Dataset& data, std::size_t num_reps,
                               std::uint64_t base_seed, const SplitPair* first_split = nullptr);

/// Candidate values per hyperparameter, in file order.
struct GridSpec {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t num_candidates() const noexcept;
  /// Axes that influence `kind`.
  GridSpec restricted_to(ModelKind kind) const;
};

/// Recognized keys: alpha, lambda (all regularizers), lambda_w,
/// lambda_h_pos, lambda_h_neg, lambda_knn_pos, lambda_knn_neg,
/// step_multiplier, k, init_sigma.
bool is_grid_key(std::string_view key) noexcept;
void apply_grid_value(ModelConfig& config, std::string_view key, double value);

/// "key = v1, v2, ..." lines; '#' comments and blank lines ignored.
GridSpec parse_grid(std::istream& in);

struct GridRow {
  std::vector<double> values;  // one per axis
  double mean_auc;
};

struct GridResult {
  ModelConfig best;
  std::vector<GridRow> table;  // Cartesian order, first axis slowest
};

/// Exhaustive search; argmax of held-out AUC on `split`, ties to the earliest
/// candidate. Throws ConfigError for an empty grid.
GridResult grid_search(const GridSpec& grid, const ModelConfig& base, const SplitPair& split,
                       std::uint64_t seed);

}  // namespace bpr
