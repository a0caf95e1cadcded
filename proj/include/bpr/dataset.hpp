#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bpr {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

struct Interaction {
  UserIndex user;
  ItemIndex item;

  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

/// Immutable implicit-feedback matrix S with CSR adjacency in both directions.
///
/// Dense indices are positions in `user_ids()` / `item_ids()`. Users and items
/// may have no interactions; they still occupy an index.
class Dataset {
 public:
  Dataset() = default;

  /// Builds from index pairs over the given id tables. Duplicate pairs are
  /// removed; the number removed is available through `duplicates_removed()`.
  /// Throws BoundsError for out-of-range indices, ArgumentError for repeated ids.
  static Dataset from_pairs(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                            std::vector<Interaction> pairs);

  std::size_t num_users() const noexcept { return user_ids_.size(); }
  std::size_t num_items() const noexcept { return item_ids_.size(); }
  std::size_t num_interactions() const noexcept { return user_items_.size(); }
  std::size_t duplicates_removed() const noexcept { return duplicates_removed_; }

  /// I_u^+, sorted ascending.
  std::span<const ItemIndex> items_of(UserIndex u) const;
  /// U_i^+, sorted ascending.
  std::span<const UserIndex> users_of(ItemIndex i) const;

  bool contains(UserIndex u, ItemIndex i) const;

  const std::vector<std::string>& user_ids() const noexcept { return user_ids_; }
  const std::vector<std::string>& item_ids() const noexcept { return item_ids_; }
  std::optional<UserIndex> find_user(std::string_view id) const;
  std::optional<ItemIndex> find_item(std::string_view id) const;

  /// All pairs in (user, item) order.
  std::vector<Interaction> interactions() const;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, UserIndex> user_lookup_;
  std::unordered_map<std::string, ItemIndex> item_lookup_;
  std::vector<std::size_t> user_offsets_;  // size |U|+1
  std::vector<ItemIndex> user_items_;
  std::vector<std::size_t> item_offsets_;  // size |I|+1
  std::vector<UserIndex> item_users_;
  std::size_t duplicates_removed_ = 0;
};

/// Reads "<user>\t<item>" lines. '#' lines and blank lines are skipped. Dense
/// indices follow first appearance. Throws ParseError on a malformed line or
/// when the input holds no interactions.
Dataset load_interactions(std::istream& in);

/// Reads "<user>\t<item>" lines and resolves ids against an existing index
/// space. Pairs naming an unknown user or item are skipped and counted in
/// `unknown`.
struct ResolvedPairs {
  std::vector<Interaction> pairs;
  std::size_t unknown = 0;
  std::size_t duplicates = 0;
};
ResolvedPairs load_interactions_into(std::istream& in, const Dataset& index_space);

/// Writes every interaction of `d`, user-major, in ascending index order.
void write_interactions(std::ostream& out, const Dataset& d);
void write_interactions(std::ostream& out, const Dataset& index_space,
                        std::span<const Interaction> pairs);

/// Leave-one-out split. `train` keeps the full index space of the source.
struct SplitPair {
  Dataset train;
  std::vector<Interaction> test;  // sorted by user
  std::size_t skipped_users = 0;  // users with fewer than two interactions
};

/// Moves one uniformly chosen interaction per user with |I_u^+| >= 2 to the
/// test set. Deterministic in `seed`.
SplitPair leave_one_out_split(const Dataset& d, std::uint64_t seed);

/// Assembles a split from a training set and separately loaded test pairs.
/// Test pairs already present in train are dropped.
SplitPair make_split(Dataset train, std::vector<Interaction> test);

/// Dataset over the same ids holding train ∪ test.
Dataset merge_split(const SplitPair& split);

}  // namespace bpr
