#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/models.hpp"
#include "bpr/sampler.hpp"

namespace bpr {

struct Hyperparams {
  double alpha = 0.05;
  double lambda_w = 0.002;
  double lambda_h_pos = 0.002;
  double lambda_h_neg = 0.002;
  double lambda_knn_pos = 0.002;
  double lambda_knn_neg = 0.002;
  /// Total SGD steps = step_multiplier * |S_train|.
  double step_multiplier = 100.0;

  /// Throws ConfigError unless alpha > 0, every lambda >= 0, multiplier >= 1.
  void validate() const;
  double lambda_for(ParamGroup group) const noexcept;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

enum class Schedule { kBootstrap, kUserWise };

Schedule parse_schedule(std::string_view name);
std::string_view schedule_name(Schedule s) noexcept;

struct Checkpoint {
  std::size_t step;
  std::optional<double> heldout_auc;
  double objective_estimate;
};

struct TrainTrace {
  std::vector<Checkpoint> checkpoints;
  bool stopped_early = false;

  /// CSV "step,heldout_auc,objective_estimate"; empty AUC when not computed.
  void write_csv(std::ostream& out) const;
};

struct TrainOptions {
  Schedule schedule = Schedule::kBootstrap;
  std::uint64_t seed = 0;
  /// Steps between checkpoints; 0 means |S_train|.
  std::size_t checkpoint_every = 0;
  /// Held-out split for AUC checkpoints; its train must be the training data.
  const SplitPair* heldout = nullptr;
  std::size_t num_probe_triples = 1000;
  /// Stop when held-out AUC fails to improve by 1e-4 for 3 checkpoints.
  bool early_stop = false;
};

/// ln sigma(x), stable for large |x|.
double log_sigmoid(double x) noexcept;
/// sigma(-x) = e^{-x} / (1 + e^{-x}), branch-stable.
double sigmoid_of_negated(double x) noexcept;

/// Sum over Theta of lambda_theta * theta^2. W uses lambda_W; H and C use the
/// mean of their positive and negative regularizers.
double regularization_penalty(const MFModel& m, const Hyperparams& h);
double regularization_penalty(const KNNModel& m, const Hyperparams& h);

/// Exact BPR-OPT over enumerated D_S. Throws SizeError past `cap`.
double bpr_opt_exact(const MFModel& m, const Dataset& d, const Hyperparams& h,
                     std::uint64_t cap = kDefaultTripleCap);
double bpr_opt_exact(const KNNModel& m, const Dataset& d, const Hyperparams& h,
                     std::uint64_t cap = kDefaultTripleCap);

/// |D_S| * mean ln sigma(x_uij) over `num_probe_triples` draws from `probe`,
/// minus the exact penalty. `probe` should be a sampler reserved for monitoring.
double bpr_opt_estimate(const MFModel& m, TripleSampler& probe, std::size_t num_probe_triples,
                        const Hyperparams& h);
double bpr_opt_estimate(const KNNModel& m, TripleSampler& probe, std::size_t num_probe_triples,
                        const Hyperparams& h);

/// theta <- theta + alpha * (sigma(-x_uij) * d x_uij / d theta - lambda_theta * theta)
/// for every coordinate of the triple's pair gradient. Throws NumericalError
/// when x_uij is not finite.
void sgd_step(MFModel& m, const Triple& t, const Hyperparams& h);
void sgd_step(KNNModel& m, std::span<const ItemIndex> profile, const Triple& t, const Hyperparams& h);

/// Applies one regularized step driven by a precomputed gradient.
void apply_step(MFModel& m, const PairGradient& g, double multiplier, const Hyperparams& h);
void apply_step(KNNModel& m, const PairGradient& g, double multiplier, const Hyperparams& h);

/// Stochastic gradient ascent on BPR-OPT for step_multiplier * |S_train| steps.
/// The first checkpoint describes the model before any step.
TrainTrace learn_bpr(MFModel& m, const Dataset& train, const Hyperparams& h, const TrainOptions& opt);
TrainTrace learn_bpr(KNNModel& m, const Dataset& train, const Hyperparams& h, const TrainOptions& opt);

}  // namespace bpr
