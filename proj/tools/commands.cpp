#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bpr/dataset.hpp"
#include "bpr/errors.hpp"
#include "bpr/evaluation.hpp"
#include "bpr/experiment.hpp"
#include "bpr/format.hpp"
#include "bpr/model_io.hpp"
#include "bpr/synthetic.hpp"

namespace bpr::cli {

namespace {

/// File access failures; mapped to the usage/IO exit code.
class IoError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

void check_output_path(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw IoError("output directory for '" + path + "' does not exist");
  }
}

std::ofstream open_output(const std::string& path) {
  check_output_path(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Dataset load_dataset(const std::string& path, std::ostream& err) {
  auto in = open_input(path);
  try {
    Dataset d = load_interactions(in);
    if (d.duplicates_removed() > 0) {
      err << "warning: " << path << ": " << d.duplicates_removed() << " duplicate interactions removed\n";
    }
    return d;
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

/// Test pairs resolved into the training index space; pairs naming ids
/// unknown to train are dropped with a warning.
SplitPair load_split(Dataset train, const std::string& test_path, std::ostream& err) {
  auto in = open_input(test_path);
  ResolvedPairs resolved;
  try {
    resolved = load_interactions_into(in, train);
  } catch (const ParseError& e) {
    throw ParseError(test_path + ": " + e.what(), 0);
  }
  if (resolved.unknown > 0) {
    err << "warning: " << test_path << ": " << resolved.unknown
        << " test pairs reference users or items absent from training and were skipped\n";
  }
  const std::size_t loaded = resolved.pairs.size();
  SplitPair split = make_split(std::move(train), std::move(resolved.pairs));
  if (split.test.size() < loaded) {
    err << "warning: " << test_path << ": " << loaded - split.test.size()
        << " test pairs also occur in training and were skipped\n";
  }
  return split;
}

Model load_model_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return load_model(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

struct HyperFlags {
  Hyperparams hyper;
  std::optional<double> lambda_all;
  CLI::Option_group* group = nullptr;

  void add(CLI::App& app) {
    group = app.add_option_group("sgd", "Stochastic gradient ascent settings");
    group->add_option("--alpha", hyper.alpha, "Learning rate")->capture_default_str();
    group->add_option("--lambda", lambda_all, "Set every regularizer at once");
    group->add_option("--lambda-w", hyper.lambda_w, "User factor regularizer")->capture_default_str();
    group->add_option("--lambda-h-pos", hyper.lambda_h_pos, "Positive item factor regularizer")
        ->capture_default_str();
    group->add_option("--lambda-h-neg", hyper.lambda_h_neg, "Negative item factor regularizer")
        ->capture_default_str();
    group->add_option("--lambda-knn-pos", hyper.lambda_knn_pos, "Positive similarity regularizer")
        ->capture_default_str();
    group->add_option("--lambda-knn-neg", hyper.lambda_knn_neg, "Negative similarity regularizer")
        ->capture_default_str();
    group->add_option("--steps-multiplier", hyper.step_multiplier, "Total steps = m * |S_train|")
        ->capture_default_str();
  }

  Hyperparams resolve() const {
    Hyperparams h = hyper;
    if (lambda_all) {
      h.lambda_w = h.lambda_h_pos = h.lambda_h_neg = h.lambda_knn_pos = h.lambda_knn_neg = *lambda_all;
    }
    return h;
  }

  bool any_given() const {
    for (const auto* opt : group->get_options()) {
      if (opt->count() > 0) return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string input, train_out, test_out;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset d = load_dataset(a.input, err);
  check_output_path(a.train_out);
  check_output_path(a.test_out);
  const SplitPair split = leave_one_out_split(d, a.seed);
  auto train = open_output(a.train_out);
  write_interactions(train, split.train);
  close_output(train, a.train_out);
  auto test = open_output(a.test_out);
  write_interactions(test, split.train, split.test);
  close_output(test, a.test_out);
  if (split.skipped_users > 0) {
    err << "note: " << split.skipped_users << " users with fewer than 2 interactions kept entirely in train\n";
  }
  out << "train " << split.train.num_interactions() << "\ntest " << split.test.size() << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string train, heldout, trace, out_path, model = "bpr-mf", schedule = "bootstrap";
  std::size_t k = 16;
  double init_sigma = 0.1;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 0;
  bool early_stop = false;
  HyperFlags flags;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  ModelConfig config;
  config.kind = parse_model_kind(a.model);
  config.k = a.k;
  config.init_sigma = a.init_sigma;
  config.hyper = a.flags.resolve();
  config.schedule = parse_schedule(a.schedule);
  check_output_path(a.out_path);
  if (!a.trace.empty()) check_output_path(a.trace);

  const Dataset train = load_dataset(a.train, err);
  std::optional<SplitPair> heldout;
  if (!a.heldout.empty()) heldout = load_split(train, a.heldout, err);

  if (!uses_sgd(config.kind)) {
    if (a.flags.any_given() || !a.heldout.empty() || !a.trace.empty()) {
      err << "warning: " << a.model << " is not trained by SGD; SGD, held-out and trace flags are ignored\n";
    }
  }

  TrainOptions opt;
  opt.seed = a.seed;
  opt.checkpoint_every = a.checkpoint_every;
  opt.early_stop = a.early_stop;
  if (heldout) opt.heldout = &*heldout;
  const TrainedModel trained = train_model(config, train, opt);

  auto model_out = open_output(a.out_path);
  save_model(model_out, trained.model);
  close_output(model_out, a.out_path);

  if (uses_sgd(config.kind) && !a.trace.empty()) {
    auto trace_out = open_output(a.trace);
    trained.trace.write_csv(trace_out);
    close_output(trace_out, a.trace);
  }
  if (uses_sgd(config.kind) && !trained.trace.checkpoints.empty()) {
    const auto& last = trained.trace.checkpoints.back();
    out << "steps " << last.step << "\nobjective_estimate " << format_double(last.objective_estimate) << '\n';
    if (last.heldout_auc) out << "heldout_auc " << format_fixed(*last.heldout_auc, 4) << '\n';
  }
  return kExitOk;
}

struct EvalArgs {
  std::string model, train, test, report;
  bool npmax = false;
  bool half_ties = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.report.empty()) check_output_path(a.report);
  const Model model = load_model_file(a.model);
  SplitPair split = load_split(load_dataset(a.train, err), a.test, err);
  check_compatible(model, split.train);

  AucOptions opt;
  opt.half_credit_ties = a.half_ties;
  const EvalReport report = evaluate_auc(model, split, opt);
  if (report.excluded_users > 0) {
    err << "warning: " << report.excluded_users << " test users have no evaluation pairs and were excluded\n";
  }
  out << "mean_auc " << format_fixed(report.mean_auc, 4) << '\n'
      << "users " << report.num_eval_users << '\n'
      << "ties " << report.tie_count << '\n';
  if (a.npmax) {
    out << "np_max " << format_fixed(np_max_bound(split), 4) << '\n'
        << "most_popular_on_test " << format_fixed(most_popular_on_test_auc(split), 4) << '\n';
  }
  if (!a.report.empty()) {
    auto report_out = open_output(a.report);
    report.write_csv(report_out, split.train);
    close_output(report_out, a.report);
  }
  return kExitOk;
}

struct RecommendArgs {
  std::string model, train, user;
  std::size_t top = 10;
};

int cmd_recommend(const RecommendArgs& a, std::ostream& out, std::ostream& err) {
  const Model model = load_model_file(a.model);
  const Dataset train = load_dataset(a.train, err);
  check_compatible(model, train);
  const auto u = train.find_user(a.user);
  if (!u) throw ArgumentError("unknown user '" + a.user + "'");

  std::vector<double> scores(train.num_items());
  score_items(model, train, *u, scores);
  std::vector<ItemIndex> candidates;
  for (ItemIndex i = 0; i < train.num_items(); ++i) {
    if (!train.contains(*u, i)) candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](ItemIndex x, ItemIndex y) { return scores[x] > scores[y]; });
  const std::size_t n = std::min(a.top, candidates.size());
  for (std::size_t r = 0; r < n; ++r) {
    out << train.item_ids()[candidates[r]] << '\t' << format_double(scores[candidates[r]]) << '\n';
  }
  return kExitOk;
}

struct SynthArgs {
  SyntheticConfig config;
  std::string out_path;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  check_output_path(a.out_path);
  const Dataset d = generate_synthetic(a.config);
  auto file = open_output(a.out_path);
  write_interactions(file, d);
  close_output(file, a.out_path);
  out << "users " << d.num_users() << "\nitems " << d.num_items() << "\ninteractions " << d.num_interactions()
      << '\n';
  return kExitOk;
}

struct CompareArgs {
  std::string train, test, grid, models = "bpr-mf,bpr-knn,cosine-knn,most-popular", out_path;
  std::size_t reps = 10;
  std::size_t k = 16;
  std::uint64_t seed = 0;
  HyperFlags flags;
};

std::vector<ModelKind> parse_model_list(const std::string& list) {
  std::vector<ModelKind> kinds;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) kinds.push_back(parse_model_kind(name));
  }
  if (kinds.empty()) throw ConfigError("--models lists no models");
  return kinds;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const auto kinds = parse_model_list(a.models);
  if (a.reps < 1) throw ConfigError("--reps must be >= 1");
  if (!a.out_path.empty()) check_output_path(a.out_path);
  GridSpec grid;
  if (!a.grid.empty()) {
    auto in = open_input(a.grid);
    try {
      grid = parse_grid(in);
    } catch (const ParseError& e) {
      throw ParseError(a.grid + ": " + e.what(), 0);
    }
  }

  const SplitPair first = load_split(load_dataset(a.train, err), a.test, err);
  const Dataset data = merge_split(first);

  std::ostringstream table;
  table << "model,mean_auc,std_auc\n";
  for (const ModelKind kind : kinds) {
    ModelConfig config;
    config.kind = kind;
    config.k = a.k;
    config.hyper = a.flags.resolve();
    const GridSpec relevant = grid.restricted_to(kind);
    if (!relevant.axes.empty()) {
      const GridResult result = grid_search(relevant, config, first, a.seed);
      config = result.best;
      err << "# grid " << model_kind_name(kind) << ": " << result.table.size() << " candidates\n";
      for (const auto& row : result.table) {
        err << "#  ";
        for (std::size_t n = 0; n < row.values.size(); ++n) {
          err << relevant.axes[n].first << '=' << format_double(row.values[n]) << ' ';
        }
        err << "auc=" << format_fixed(row.mean_auc, 4) << '\n';
      }
    }
    const TrialSummary summary = repeat_experiment(config, data, a.reps, a.seed, &first);
    table << model_kind_name(kind) << ',' << format_double(summary.mean) << ','
          << format_double(summary.stddev) << '\n';
    if (!summary.stddev_defined) err << "note: one repetition; std_auc reported as 0\n";
  }

  if (a.out_path.empty()) {
    out << table.str();
  } else {
    auto file = open_output(a.out_path);
    file << table.str();
    close_output(file, a.out_path);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Personalized ranking from implicit feedback", "bpr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "Leave-one-out train/test split");
  split->add_option("input", split_args.input, "Interaction TSV")->required();
  split->add_option("train_out", split_args.train_out, "Output train TSV")->required();
  split->add_option("test_out", split_args.test_out, "Output test TSV")->required();
  split->add_option("--seed", split_args.seed, "Split seed")->capture_default_str();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Fit a model");
  train->add_option("train", train_args.train, "Training TSV")->required();
  train->add_option("--model", train_args.model, "bpr-mf | bpr-knn | cosine-knn | most-popular")
      ->capture_default_str();
  train->add_option("--k", train_args.k, "Factor dimensionality (bpr-mf)")->capture_default_str();
  train->add_option("--init-sigma", train_args.init_sigma, "Initial factor std deviation")->capture_default_str();
  train->add_option("--schedule", train_args.schedule, "bootstrap | user_wise")->capture_default_str();
  train->add_option("--seed", train_args.seed, "Initialization and sampling seed")->capture_default_str();
  train->add_option("--heldout", train_args.heldout, "Test TSV for held-out AUC checkpoints");
  train->add_option("--trace", train_args.trace, "Write the training trace CSV here");
  train->add_option("--checkpoint-every", train_args.checkpoint_every, "Steps between checkpoints (0: |S_train|)")
      ->capture_default_str();
  train->add_flag("--early-stop", train_args.early_stop, "Stop when held-out AUC stalls");
  train->add_option("--out", train_args.out_path, "Model output file")->required();
  train_args.flags.add(*train);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Held-out AUC of a model");
  eval->add_option("model", eval_args.model, "Model file")->required();
  eval->add_option("train", eval_args.train, "Training TSV the model was fit on")->required();
  eval->add_option("test", eval_args.test, "Test TSV")->required();
  eval->add_option("--report", eval_args.report, "Per-user CSV report");
  eval->add_flag("--npmax", eval_args.npmax, "Also print the non-personalized bound");
  eval->add_flag("--half-credit-ties", eval_args.half_ties, "Score tied pairs as 1/2");

  RecommendArgs rec_args;
  auto* rec = app.add_subcommand("recommend", "Top-N unseen items for a user");
  rec->add_option("model", rec_args.model, "Model file")->required();
  rec->add_option("train", rec_args.train, "Training TSV the model was fit on")->required();
  rec->add_option("--user", rec_args.user, "External user id")->required();
  rec->add_option("--top", rec_args.top, "Number of items")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate planted low-rank implicit feedback");
  synth->add_option("out", synth_args.out_path, "Output TSV")->required();
  synth->add_option("--users", synth_args.config.num_users)->capture_default_str();
  synth->add_option("--items", synth_args.config.num_items)->capture_default_str();
  synth->add_option("--rank", synth_args.config.latent_rank)->capture_default_str();
  synth->add_option("--per-user", synth_args.config.interactions_per_user)->capture_default_str();
  synth->add_option("--noise", synth_args.config.noise)->capture_default_str();
  synth->add_option("--seed", synth_args.config.seed)->capture_default_str();

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "Grid search then repeated evaluation per model");
  cmp->add_option("train", cmp_args.train, "Training TSV (repetition 0)")->required();
  cmp->add_option("test", cmp_args.test, "Test TSV (repetition 0)")->required();
  cmp->add_option("--models", cmp_args.models, "Comma-separated model kinds")->capture_default_str();
  cmp->add_option("--grid", cmp_args.grid, "Grid file: 'key = v1, v2' lines");
  cmp->add_option("--reps", cmp_args.reps, "Repetitions")->capture_default_str();
  cmp->add_option("--k", cmp_args.k, "Factor dimensionality (bpr-mf)")->capture_default_str();
  cmp->add_option("--seed", cmp_args.seed, "Base seed")->capture_default_str();
  cmp->add_option("--out", cmp_args.out_path, "Write the table here instead of stdout");
  cmp_args.flags.add(*cmp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*split) return cmd_split(split_args, out, err);
    if (*train) return cmd_train(train_args, out, err);
    if (*eval) return cmd_eval(eval_args, out, err);
    if (*rec) return cmd_recommend(rec_args, out, err);
    if (*synth) return cmd_synth(synth_args, out, err);
    if (*cmp) return cmd_compare(cmp_args, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bpr::cli
