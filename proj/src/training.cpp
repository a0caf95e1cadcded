#include "bpr/training.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "bpr/errors.hpp"
#include "bpr/evaluation.hpp"
#include "bpr/format.hpp"

namespace bpr {

void Hyperparams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  for (const double l : {lambda_w, lambda_h_pos, lambda_h_neg, lambda_knn_pos, lambda_knn_neg}) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("regularizers must be finite and >= 0");
  }
  if (!(step_multiplier >= 1.0) || !std::isfinite(step_multiplier)) {
    throw ConfigError("step multiplier must be >= 1");
  }
}

double Hyperparams::lambda_for(ParamGroup group) const noexcept {
  switch (group) {
    case ParamGroup::kUser: return lambda_w;
    case ParamGroup::kPositiveItem: return lambda_h_pos;
    case ParamGroup::kNegativeItem: return lambda_h_neg;
    case ParamGroup::kPositiveCell: return lambda_knn_pos;
    case ParamGroup::kNegativeCell: return lambda_knn_neg;
  }
  return 0.0;
}

Schedule parse_schedule(std::string_view name) {
  if (name == "bootstrap") return Schedule::kBootstrap;
  if (name == "user_wise" || name == "user-wise") return Schedule::kUserWise;
  throw ConfigError("unknown schedule '" + std::string(name) + "' (expected bootstrap or user_wise)");
}

std::string_view schedule_name(Schedule s) noexcept {
  return s == Schedule::kBootstrap ? "bootstrap" : "user_wise";
}

void TrainTrace::write_csv(std::ostream& out) const {
  out << "step,heldout_auc,objective_estimate\n";
  for (const auto& c : checkpoints) {
    out << c.step << ',';
    if (c.heldout_auc) out << format_double(*c.heldout_auc);
    out << ',' << format_double(c.objective_estimate) << '\n';
  }
}

double log_sigmoid(double x) noexcept {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid_of_negated(double x) noexcept {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

namespace {

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s;
}

}  // namespace

double regularization_penalty(const MFModel& m, const Hyperparams& h) {
  return h.lambda_w * sum_squares(m.user_factors()) +
         0.5 * (h.lambda_h_pos + h.lambda_h_neg) * sum_squares(m.item_factors());
}

double regularization_penalty(const KNNModel& m, const Hyperparams& h) {
  return 0.5 * (h.lambda_knn_pos + h.lambda_knn_neg) * sum_squares(m.cells());
}

double bpr_opt_exact(const MFModel& m, const Dataset& d, const Hyperparams& h, std::uint64_t cap) {
  double sum = 0.0;
  for (const auto& t : enumerate_triples(d, cap)) sum += log_sigmoid(pair_score(m, t));
  return sum - regularization_penalty(m, h);
}

double bpr_opt_exact(const KNNModel& m, const Dataset& d, const Hyperparams& h, std::uint64_t cap) {
  double sum = 0.0;
  for (const auto& t : enumerate_triples(d, cap)) sum += log_sigmoid(pair_score(m, d.items_of(t.u), t));
  return sum - regularization_penalty(m, h);
}

namespace {

template <class PairScore>
double estimate(TripleSampler& probe, std::size_t n, PairScore&& pair) {
  if (n < 1) throw ConfigError("need at least one probe triple");
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) sum += log_sigmoid(pair(probe.sample()));
  return static_cast<double>(probe.total_weight()) * (sum / static_cast<double>(n));
}

void check_finite(double x, const Triple& t) {
  if (!std::isfinite(x)) {
    throw NumericalError("non-finite pair score for (u=" + std::to_string(t.u) + ", i=" + std::to_string(t.i) +
                         ", j=" + std::to_string(t.j) + "); lower the learning rate");
  }
}

}  // namespace

double bpr_opt_estimate(const MFModel& m, TripleSampler& probe, std::size_t n, const Hyperparams& h) {
  return estimate(probe, n, [&](const Triple& t) { return pair_score(m, t); }) - regularization_penalty(m, h);
}

double bpr_opt_estimate(const KNNModel& m, TripleSampler& probe, std::size_t n, const Hyperparams& h) {
  const Dataset& d = probe.dataset();
  return estimate(probe, n, [&](const Triple& t) { return pair_score(m, d.items_of(t.u), t); }) -
         regularization_penalty(m, h);
}

void apply_step(MFModel& m, const PairGradient& g, double multiplier, const Hyperparams& h) {
  auto& w = m.user_factors();
  auto& hf = m.item_factors();
  for (const auto& e : g.entries) {
    double& theta = e.group == ParamGroup::kUser ? w[e.index] : hf[e.index];
    theta += h.alpha * (multiplier * e.value - h.lambda_for(e.group) * theta);
  }
}

void apply_step(KNNModel& m, const PairGradient& g, double multiplier, const Hyperparams& h) {
  auto& cells = m.cells();
  for (const auto& e : g.entries) {
    double& theta = cells[e.index];
    theta += h.alpha * (multiplier * e.value - h.lambda_for(e.group) * theta);
  }
}

void sgd_step(MFModel& m, const Triple& t, const Hyperparams& h) {
  const double x = pair_score(m, t);
  check_finite(x, t);
  apply_step(m, mf_pair_gradient(m, t), sigmoid_of_negated(x), h);
}

void sgd_step(KNNModel& m, std::span<const ItemIndex> profile, const Triple& t, const Hyperparams& h) {
  const double x = pair_score(m, profile, t);
  check_finite(x, t);
  apply_step(m, knn_pair_gradient(m, t, profile), sigmoid_of_negated(x), h);
}

namespace {

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kProbeStream = 2;
constexpr double kEarlyStopDelta = 1e-4;
constexpr int kEarlyStopPatience = 3;

// Model-specific hooks for the shared loop.
struct MFOps {
  MFModel& m;
  void step(const Dataset&, const Triple& t, const Hyperparams& h) { sgd_step(m, t, h); }
  double objective(TripleSampler& probe, std::size_t n, const Hyperparams& h) const {
    return bpr_opt_estimate(m, probe, n, h);
  }
  double penalty(const Hyperparams& h) const { return regularization_penalty(m, h); }
  UserScorer scorer(const Dataset&) const {
    const MFModel& model = m;
    return [&model](UserIndex u, std::span<double> out) {
      for (ItemIndex i = 0; i < out.size(); ++i) out[i] = model.score(u, i);
    };
  }
  void check(const Dataset& d) const {
    if (m.num_users() != d.num_users() || m.num_items() != d.num_items()) {
      throw ConfigError("model dimensions do not match the training data");
    }
  }
};

struct KNNOps {
  KNNModel& m;
  void step(const Dataset& d, const Triple& t, const Hyperparams& h) { sgd_step(m, d.items_of(t.u), t, h); }
  double objective(TripleSampler& probe, std::size_t n, const Hyperparams& h) const {
    return bpr_opt_estimate(m, probe, n, h);
  }
  double penalty(const Hyperparams& h) const { return regularization_penalty(m, h); }
  UserScorer scorer(const Dataset& train) const {
    const KNNModel& model = m;
    return [&model, &train](UserIndex u, std::span<double> out) {
      std::fill(out.begin(), out.end(), 0.0);
      const auto& cells = model.cells();
      for (const ItemIndex l : train.items_of(u)) {
        for (ItemIndex i = 0; i < out.size(); ++i) {
          if (i != l) out[i] += cells[model.cell_index(i, l)];
        }
      }
    };
  }
  void check(const Dataset& d) const {
    if (m.num_items() != d.num_items()) throw ConfigError("model dimensions do not match the training data");
  }
};

template <class Ops>
TrainTrace run_learn_bpr(Ops ops, const Dataset& train, const Hyperparams& h, const TrainOptions& opt) {
  h.validate();
  ops.check(train);
  if (opt.heldout && (opt.heldout->train.num_users() != train.num_users() ||
                      opt.heldout->train.num_items() != train.num_items())) {
    throw ConfigError("held-out split does not share the training index space");
  }

  const auto total_steps =
      static_cast<std::size_t>(std::llround(h.step_multiplier * static_cast<double>(train.num_interactions())));
  const std::size_t every = opt.checkpoint_every > 0 ? opt.checkpoint_every
                                                     : std::max<std::size_t>(1, train.num_interactions());
  const bool has_triples = count_eligible_users(train) > 0;

  TrainTrace trace;
  double best_auc = -1.0;
  int stale = 0;
  const auto checkpoint = [&](std::size_t step) {
    Checkpoint c{step, std::nullopt, 0.0};
    if (has_triples) {
      TripleSampler probe(train, derive_seed(opt.seed, kProbeStream));
      c.objective_estimate = ops.objective(probe, opt.num_probe_triples, h);
    } else {
      c.objective_estimate = -ops.penalty(h);
    }
    if (opt.heldout) c.heldout_auc = evaluate_auc(ops.scorer(train), *opt.heldout).mean_auc;
    trace.checkpoints.push_back(c);
    if (opt.early_stop && c.heldout_auc) {
      if (*c.heldout_auc > best_auc + kEarlyStopDelta) {
        best_auc = *c.heldout_auc;
        stale = 0;
      } else if (++stale >= kEarlyStopPatience) {
        return false;
      }
    }
    return true;
  };

  if (!checkpoint(0) || total_steps == 0) {
    trace.stopped_early = total_steps > 0;
    return trace;
  }

  TripleSampler sampler(train, derive_seed(opt.seed, kTrainStream));
  std::size_t done = 0;
  const auto after_step = [&]() {
    ++done;
    if (done % every == 0 || done == total_steps) {
      if (!checkpoint(done)) {
        trace.stopped_early = done < total_steps;
        return false;
      }
    }
    return done < total_steps;
  };

  if (opt.schedule == Schedule::kBootstrap) {
    while (true) {
      ops.step(train, sampler.sample(), h);
      if (!after_step()) break;
    }
  } else {
    // Users in index order; each positive (u, i) is followed by a sweep over
    // all of u's negatives in shuffled order. Repeats until the budget is spent.
    const std::size_t ni = train.num_items();
    std::vector<ItemIndex> negatives;
    bool running = true;
    while (running) {
      for (UserIndex u = 0; running && u < train.num_users(); ++u) {
        const auto profile = train.items_of(u);
        if (profile.empty() || profile.size() == ni) continue;
        negatives.clear();
        for (ItemIndex j = 0; j < ni; ++j) {
          if (!std::binary_search(profile.begin(), profile.end(), j)) negatives.push_back(j);
        }
        for (std::size_t p = 0; running && p < profile.size(); ++p) {
          std::shuffle(negatives.begin(), negatives.end(), sampler.rng());
          for (const ItemIndex j : negatives) {
            ops.step(train, Triple{u, profile[p], j}, h);
            if (!after_step()) {
              running = false;
              break;
            }
          }
        }
      }
    }
  }
  return trace;
}

}  // namespace

TrainTrace learn_bpr(MFModel& m, const Dataset& train, const Hyperparams& h, const TrainOptions& opt) {
  return run_learn_bpr(MFOps{m}, train, h, opt);
}

TrainTrace learn_bpr(KNNModel& m, const Dataset& train, const Hyperparams& h, const TrainOptions& opt) {
  return run_learn_bpr(KNNOps{m}, train, h, opt);
}

}  // namespace bpr
