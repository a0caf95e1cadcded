#pragma once

#include <cstddef>
#include <cstdint>

#include "bpr/dataset.hpp"

namespace bpr {

struct SyntheticConfig {
  std::size_t num_users = 200;
  std::size_t num_items = 100;
  std::size_t latent_rank = 4;
  std::size_t interactions_per_user = 10;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

/// Planted low-rank data: each user's top `interactions_per_user` items under
/// <w*_u, h*_i> + N(0, noise^2), with W*, H* standard Gaussian. Ids are
/// "u<index>" and "i<index>"; every item keeps its index even if unobserved.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace bpr
