#include "bpr/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "bpr/errors.hpp"

namespace bpr {

Dataset generate_synthetic(const SyntheticConfig& c) {
  if (c.latent_rank < 1) throw ConfigError("latent_rank must be >= 1");
  if (c.num_users < 1 || c.num_items < 1) throw ConfigError("num_users and num_items must be >= 1");
  if (c.interactions_per_user >= c.num_items) {
    throw ConfigError("interactions_per_user must be smaller than num_items");
  }
  if (!(c.noise >= 0.0)) throw ConfigError("noise must be >= 0");

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t r = c.latent_rank;
  std::vector<double> w(c.num_users * r);
  std::vector<double> h(c.num_items * r);
  for (auto& x : w) x = gauss(rng);
  for (auto& x : h) x = gauss(rng);

  std::vector<Interaction> pairs;
  pairs.reserve(c.num_users * c.interactions_per_user);
  std::vector<double> scores(c.num_items);
  std::vector<ItemIndex> order(c.num_items);
  for (std::size_t u = 0; u < c.num_users; ++u) {
    for (std::size_t i = 0; i < c.num_items; ++i) {
      double s = 0.0;
      for (std::size_t f = 0; f < r; ++f) s += w[u * r + f] * h[i * r + f];
      if (c.noise > 0.0) s += c.noise * gauss(rng);
      scores[i] = s;
    }
    std::iota(order.begin(), order.end(), ItemIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](ItemIndex a, ItemIndex b) { return scores[a] > scores[b]; });
    for (std::size_t n = 0; n < c.interactions_per_user; ++n) {
      pairs.push_back({static_cast<UserIndex>(u), order[n]});
    }
  }

  std::vector<std::string> user_ids(c.num_users);
  std::vector<std::string> item_ids(c.num_items);
  for (std::size_t u = 0; u < c.num_users; ++u) user_ids[u] = "u" + std::to_string(u);
  for (std::size_t i = 0; i < c.num_items; ++i) item_ids[i] = "i" + std::to_string(i);
  return Dataset::from_pairs(std::move(user_ids), std::move(item_ids), std::move(pairs));
}

}  // namespace bpr
