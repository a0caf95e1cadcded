#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "bpr/dataset.hpp"

namespace bpr {

/// Training triple (u, i, j): i in I_u^+, j not in I_u^+.
struct Triple {
  UserIndex u;
  ItemIndex i;
  ItemIndex j;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

using Rng = std::mt19937_64;

/// Draws triples uniformly from D_S.
///
/// A user is drawn with probability proportional to |I_u^+| * (|I| - |I_u^+|),
/// then the positive item uniformly from I_u^+ and the negative uniformly from
/// I \ I_u^+ by rejection. Each triple in D_S therefore has probability
/// 1 / |D_S|. The dataset must outlive the sampler.
class TripleSampler {
 public:
  static constexpr std::size_t kMaxRejections = 10'000;

  /// Throws ConfigError when no user has 0 < |I_u^+| < |I|.
  TripleSampler(const Dataset& d, std::uint64_t seed);

  Triple sample();

  /// Uniform negative for `u` by rejection against its profile. Throws
  /// NumericalError after kMaxRejections failed draws.
  ItemIndex sample_negative(UserIndex u);

  /// |D_S|.
  std::uint64_t total_weight() const noexcept { return cumulative_.empty() ? 0 : cumulative_.back(); }
  const Dataset& dataset() const noexcept { return *dataset_; }
  Rng& rng() noexcept { return rng_; }

 private:
  const Dataset* dataset_;
  std::vector<UserIndex> users_;         // eligible users
  std::vector<std::uint64_t> cumulative_;  // running sum of their weights
  Rng rng_;
};

/// |D_S| = sum_u |I_u^+| * (|I| - |I_u^+|).
std::uint64_t count_triples(const Dataset& d);

/// Number of users with 0 < |I_u^+| < |I|.
std::size_t count_eligible_users(const Dataset& d);

inline constexpr std::uint64_t kDefaultTripleCap = 10'000'000;

/// Materializes D_S in (u, i, j) order. Throws SizeError when |D_S| > cap.
std::vector<Triple> enumerate_triples(const Dataset& d, std::uint64_t cap = kDefaultTripleCap);

}  // namespace bpr

namespace bpr {

/// Independent seed for a named sub-stream (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace bpr
