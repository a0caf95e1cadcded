#include "bpr/experiment.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/evaluation.hpp"
#include "bpr/format.hpp"

namespace bpr {

namespace {

constexpr std::uint64_t kInitStream = 11;

constexpr std::string_view kGridKeys[] = {
    "alpha",          "lambda",         "lambda_w",        "lambda_h_pos", "lambda_h_neg",
    "lambda_knn_pos", "lambda_knn_neg", "step_multiplier", "k",            "init_sigma",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool key_affects(ModelKind kind, std::string_view key) {
  switch (kind) {
    case ModelKind::kBprMf:
      return key != "lambda_knn_pos" && key != "lambda_knn_neg";
    case ModelKind::kBprKnn:
      return key == "alpha" || key == "lambda" || key == "lambda_knn_pos" || key == "lambda_knn_neg" ||
             key == "step_multiplier";
    case ModelKind::kCosineKnn:
    case ModelKind::kMostPopular:
      return false;
  }
  return false;
}

}  // namespace

ModelKind parse_model_kind(std::string_view name) {
  if (name == "bpr-mf") return ModelKind::kBprMf;
  if (name == "bpr-knn") return ModelKind::kBprKnn;
  if (name == "cosine-knn") return ModelKind::kCosineKnn;
  if (name == "most-popular") return ModelKind::kMostPopular;
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected bpr-mf, bpr-knn, cosine-knn or most-popular)");
}

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kBprMf: return "bpr-mf";
    case ModelKind::kBprKnn: return "bpr-knn";
    case ModelKind::kCosineKnn: return "cosine-knn";
    case ModelKind::kMostPopular: return "most-popular";
  }
  return "?";
}

bool uses_sgd(ModelKind kind) noexcept { return kind == ModelKind::kBprMf || kind == ModelKind::kBprKnn; }

TrainedModel train_model(const ModelConfig& config, const Dataset& train, TrainOptions opt) {
  opt.schedule = config.schedule;
  switch (config.kind) {
    case ModelKind::kBprMf: {
      MFModel m = init_mf(train.num_users(), train.num_items(), config.k, config.init_sigma,
                          derive_seed(opt.seed, kInitStream));
      TrainTrace trace = learn_bpr(m, train, config.hyper, opt);
      return {std::move(m), std::move(trace)};
    }
    case ModelKind::kBprKnn: {
      KNNModel m = init_knn(train.num_items());
      TrainTrace trace = learn_bpr(m, train, config.hyper, opt);
      return {std::move(m), std::move(trace)};
    }
    case ModelKind::kCosineKnn:
      return {cosine_similarity(train), {}};
    case ModelKind::kMostPopular:
      return {PopularityModel::from_dataset(train), {}};
  }
  throw ConfigError("unknown model kind");
}

double train_and_evaluate(const ModelConfig& config, const SplitPair& split, std::uint64_t seed) {
  TrainOptions opt;
  opt.seed = seed;
  const auto trained = train_model(config, split.train, opt);
  return evaluate_auc(trained.model, split).mean_auc;
}

void TrialSummary::write_csv(std::ostream& out) const {
  out << "rep,mean_auc\n";
  for (std::size_t r = 0; r < rep_auc.size(); ++r) out << r << ',' << format_double(rep_auc[r]) << '\n';
}

TrialSummary summarize(std::vector<double> rep_auc) {
  if (rep_auc.empty()) throw ConfigError("need at least one repetition");
  TrialSummary s;
  s.rep_auc = std::move(rep_auc);
  const double n = static_cast<double>(s.rep_auc.size());
  double sum = 0.0;
  for (const double a : s.rep_auc) sum += a;
  s.mean = sum / n;
  if (s.rep_auc.size() > 1) {
    double ss = 0.0;
    for (const double a : s.rep_auc) ss += (a - s.mean) * (a - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
    s.stddev_defined = true;
  }
  return s;
}

TrialSummary repeat_experiment(const ModelConfig& config, const Dataset& data, std::size_t num_reps,
                               std::uint64_t base_seed, const SplitPair* first_split) {
  if (num_reps < 1) throw ConfigError("need at least one repetition");
  std::vector<double> aucs;
  aucs.reserve(num_reps);
  for (std::size_t r = 0; r < num_reps; ++r) {
    const std::uint64_t seed = base_seed + r;
    if (r == 0 && first_split) {
      aucs.push_back(train_and_evaluate(config, *first_split, seed));
    } else {
      aucs.push_back(train_and_evaluate(config, leave_one_out_split(data, seed), seed));
    }
  }
  return summarize(std::move(aucs));
}

std::size_t GridSpec::num_candidates() const noexcept {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [key, values] : axes) n *= values.size();
  return n;
}

GridSpec GridSpec::restricted_to(ModelKind kind) const {
  GridSpec out;
  for (const auto& axis : axes) {
    if (key_affects(kind, axis.first)) out.axes.push_back(axis);
  }
  return out;
}

bool is_grid_key(std::string_view key) noexcept {
  for (const auto k : kGridKeys) {
    if (k == key) return true;
  }
  return false;
}

void apply_grid_value(ModelConfig& c, std::string_view key, double v) {
  auto& h = c.hyper;
  if (key == "alpha") {
    h.alpha = v;
  } else if (key == "lambda") {
    h.lambda_w = h.lambda_h_pos = h.lambda_h_neg = h.lambda_knn_pos = h.lambda_knn_neg = v;
  } else if (key == "lambda_w") {
    h.lambda_w = v;
  } else if (key == "lambda_h_pos") {
    h.lambda_h_pos = v;
  } else if (key == "lambda_h_neg") {
    h.lambda_h_neg = v;
  } else if (key == "lambda_knn_pos") {
    h.lambda_knn_pos = v;
  } else if (key == "lambda_knn_neg") {
    h.lambda_knn_neg = v;
  } else if (key == "step_multiplier") {
    h.step_multiplier = v;
  } else if (key == "k") {
    if (v < 1 || v != std::floor(v)) throw ConfigError("k must be a positive integer");
    c.k = static_cast<std::size_t>(v);
  } else if (key == "init_sigma") {
    c.init_sigma = v;
  } else {
    throw ConfigError("unknown grid key '" + std::string(key) + "'");
  }
}

GridSpec parse_grid(std::istream& in) {
  GridSpec grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = v1, v2, ...'", line_no);
    const std::string key(trim(s.substr(0, eq)));
    if (!is_grid_key(key)) throw ParseError("unknown grid key '" + key + "'", line_no);
    for (const auto& axis : grid.axes) {
      if (axis.first == key) throw ParseError("grid key '" + key + "' repeated", line_no);
    }
    std::vector<double> values;
    std::string_view rest = s.substr(eq + 1);
    while (true) {
      const auto comma = rest.find(',');
      const std::string tok(trim(rest.substr(0, comma)));
      if (tok.empty()) throw ParseError("empty value in grid line", line_no);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("bad grid value '" + tok + "'", line_no);
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    grid.axes.emplace_back(key, std::move(values));
  }
  return grid;
}

GridResult grid_search(const GridSpec& grid, const ModelConfig& base, const SplitPair& split,
                       std::uint64_t seed) {
  if (grid.axes.empty()) throw ConfigError("grid has no hyperparameters");
  for (const auto& [key, values] : grid.axes) {
    if (values.empty()) throw ConfigError("grid key '" + key + "' has no candidates");
  }

  GridResult result;
  result.best = base;
  double best_auc = -1.0;
  std::vector<std::size_t> pos(grid.axes.size(), 0);
  const std::size_t total = grid.num_candidates();
  for (std::size_t n = 0; n < total; ++n) {
    ModelConfig candidate = base;
    GridRow row;
    for (std::size_t a = 0; a < grid.axes.size(); ++a) {
      const double v = grid.axes[a].second[pos[a]];
      apply_grid_value(candidate, grid.axes[a].first, v);
      row.values.push_back(v);
    }
    // Diverging candidates count as failures rather than aborting the search.
    try {
      row.mean_auc = train_and_evaluate(candidate, split, seed);
    } catch (const NumericalError&) {
      row.mean_auc = std::nan("");
    }
    if (n == 0 || row.mean_auc > best_auc) {
      best_auc = std::isnan(row.mean_auc) ? -1.0 : row.mean_auc;
      result.best = candidate;
    }
    result.table.push_back(std::move(row));
    // Odometer increment, last axis fastest.
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      if (++pos[a] < grid.axes[a].second.size()) break;
      pos[a] = 0;
    }
  }
  return result;
}

}  // namespace bpr
