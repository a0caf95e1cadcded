#include "bpr/sampler.hpp"

#include <algorithm>

#include "bpr/errors.hpp"

namespace bpr {

TripleSampler::TripleSampler(const Dataset& d, std::uint64_t seed) : dataset_(&d), rng_(seed) {
  const std::uint64_t ni = d.num_items();
  std::uint64_t running = 0;
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const std::uint64_t pos = d.items_of(u).size();
    if (pos == 0 || pos == ni) continue;
    running += pos * (ni - pos);
    users_.push_back(u);
    cumulative_.push_back(running);
  }
  if (users_.empty()) {
    throw ConfigError("no user has both observed and unobserved items; D_S is empty");
  }
}

Triple TripleSampler::sample() {
  std::uniform_int_distribution<std::uint64_t> pick_weight(0, cumulative_.back() - 1);
  const std::uint64_t r = pick_weight(rng_);
  const auto slot = std::upper_bound(cumulative_.begin(), cumulative_.end(), r) - cumulative_.begin();
  const UserIndex u = users_[static_cast<std::size_t>(slot)];

  const auto items = dataset_->items_of(u);
  std::uniform_int_distribution<std::size_t> pick_pos(0, items.size() - 1);
  const ItemIndex i = items[pick_pos(rng_)];
  return {u, i, sample_negative(u)};
}

ItemIndex TripleSampler::sample_negative(UserIndex u) {
  const auto items = dataset_->items_of(u);
  std::uniform_int_distribution<ItemIndex> pick_item(0, static_cast<ItemIndex>(dataset_->num_items() - 1));
  for (std::size_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    const ItemIndex j = pick_item(rng_);
    if (!std::binary_search(items.begin(), items.end(), j)) return j;
  }
  throw NumericalError("negative sampling for user " + std::to_string(u) + " rejected " +
                       std::to_string(kMaxRejections) + " draws; profile is nearly full");
}

std::uint64_t count_triples(const Dataset& d) {
  const std::uint64_t ni = d.num_items();
  std::uint64_t total = 0;
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const std::uint64_t pos = d.items_of(u).size();
    total += pos * (ni - pos);
  }
  return total;
}

std::size_t count_eligible_users(const Dataset& d) {
  std::size_t n = 0;
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto pos = d.items_of(u).size();
    if (pos > 0 && pos < d.num_items()) ++n;
  }
  return n;
}

std::vector<Triple> enumerate_triples(const Dataset& d, std::uint64_t cap) {
  const std::uint64_t total = count_triples(d);
  if (total > cap) {
    throw SizeError("|D_S| = " + std::to_string(total) + " exceeds cap " + std::to_string(cap),
                    static_cast<std::size_t>(total));
  }
  std::vector<Triple> out;
  out.reserve(static_cast<std::size_t>(total));
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto items = d.items_of(u);
    for (const ItemIndex i : items) {
      auto next_pos = items.begin();
      for (ItemIndex j = 0; j < d.num_items(); ++j) {
        while (next_pos != items.end() && *next_pos < j) ++next_pos;
        if (next_pos != items.end() && *next_pos == j) continue;
        out.push_back({u, i, j});
      }
    }
  }
  return out;
}

}  // namespace bpr
