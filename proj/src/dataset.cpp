#include "bpr/dataset.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>

#include "bpr/errors.hpp"

namespace bpr {

namespace {

std::unordered_map<std::string, std::uint32_t> build_lookup(const std::vector<std::string>& ids,
                                                            const char* kind) {
  std::unordered_map<std::string, std::uint32_t> lookup;
  lookup.reserve(ids.size());
  for (std::uint32_t i = 0; i < ids.size(); ++i) {
    if (!lookup.emplace(ids[i], i).second) {
      throw ArgumentError(std::string("duplicate ") + kind + " id '" + ids[i] + "'");
    }
  }
  return lookup;
}

// Splits one data line into its two fields. Returns false for comments and
// blank lines.
bool parse_line(std::string& line, std::size_t line_no, std::string_view& user,
                std::string_view& item) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty() || line.front() == '#') return false;
  const auto tab = line.find('\t');
  if (tab == std::string::npos) {
    throw ParseError("expected 2 tab-separated fields, found 1", line_no);
  }
  if (line.find('\t', tab + 1) != std::string::npos) {
    const auto fields = 1 + std::count(line.begin(), line.end(), '\t');
    throw ParseError("expected 2 tab-separated fields, found " + std::to_string(fields), line_no);
  }
  user = std::string_view(line).substr(0, tab);
  item = std::string_view(line).substr(tab + 1);
  if (user.empty() || item.empty()) throw ParseError("empty identifier", line_no);
  return true;
}

}  // namespace

Dataset Dataset::from_pairs(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                            std::vector<Interaction> pairs) {
  Dataset d;
  d.user_lookup_ = build_lookup(user_ids, "user");
  d.item_lookup_ = build_lookup(item_ids, "item");
  d.user_ids_ = std::move(user_ids);
  d.item_ids_ = std::move(item_ids);

  const std::size_t nu = d.user_ids_.size();
  const std::size_t ni = d.item_ids_.size();
  for (const auto& p : pairs) {
    if (p.user >= nu || p.item >= ni) throw BoundsError("interaction index out of range");
  }

  std::sort(pairs.begin(), pairs.end());
  const auto last = std::unique(pairs.begin(), pairs.end());
  d.duplicates_removed_ = static_cast<std::size_t>(pairs.end() - last);
  pairs.erase(last, pairs.end());

  d.user_offsets_.assign(nu + 1, 0);
  d.item_offsets_.assign(ni + 1, 0);
  for (const auto& p : pairs) {
    ++d.user_offsets_[p.user + 1];
    ++d.item_offsets_[p.item + 1];
  }
  for (std::size_t u = 0; u < nu; ++u) d.user_offsets_[u + 1] += d.user_offsets_[u];
  for (std::size_t i = 0; i < ni; ++i) d.item_offsets_[i + 1] += d.item_offsets_[i];

  // pairs are sorted by (user, item), so both fills produce sorted rows.
  d.user_items_.resize(pairs.size());
  d.item_users_.resize(pairs.size());
  std::vector<std::size_t> cursor(d.item_offsets_.begin(), d.item_offsets_.end() - 1);
  for (std::size_t n = 0; n < pairs.size(); ++n) {
    d.user_items_[n] = pairs[n].item;
    d.item_users_[cursor[pairs[n].item]++] = pairs[n].user;
  }
  return d;
}

std::span<const ItemIndex> Dataset::items_of(UserIndex u) const {
  if (u >= num_users()) throw BoundsError("user index " + std::to_string(u) + " out of range");
  return {user_items_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

std::span<const UserIndex> Dataset::users_of(ItemIndex i) const {
  if (i >= num_items()) throw BoundsError("item index " + std::to_string(i) + " out of range");
  return {item_users_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

bool Dataset::contains(UserIndex u, ItemIndex i) const {
  const auto row = items_of(u);
  return std::binary_search(row.begin(), row.end(), i);
}

std::optional<UserIndex> Dataset::find_user(std::string_view id) const {
  const auto it = user_lookup_.find(std::string(id));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemIndex> Dataset::find_item(std::string_view id) const {
  const auto it = item_lookup_.find(std::string(id));
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<Interaction> Dataset::interactions() const {
  std::vector<Interaction> out;
  out.reserve(num_interactions());
  for (UserIndex u = 0; u < num_users(); ++u) {
    for (const ItemIndex i : items_of(u)) out.push_back({u, i});
  }
  return out;
}

Dataset load_interactions(std::istream& in) {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::unordered_map<std::string, UserIndex> users;
  std::unordered_map<std::string, ItemIndex> items;
  std::vector<Interaction> pairs;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view user;
    std::string_view item;
    if (!parse_line(line, line_no, user, item)) continue;
    auto [uit, unew] = users.try_emplace(std::string(user), static_cast<UserIndex>(user_ids.size()));
    if (unew) user_ids.emplace_back(user);
    auto [iit, inew] = items.try_emplace(std::string(item), static_cast<ItemIndex>(item_ids.size()));
    if (inew) item_ids.emplace_back(item);
    pairs.push_back({uit->second, iit->second});
  }
  if (in.bad()) throw ParseError("read failure", 0);
  if (pairs.empty()) throw ParseError("input contains no interactions", 0);
  return Dataset::from_pairs(std::move(user_ids), std::move(item_ids), std::move(pairs));
}

ResolvedPairs load_interactions_into(std::istream& in, const Dataset& index_space) {
  ResolvedPairs out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view user;
    std::string_view item;
    if (!parse_line(line, line_no, user, item)) continue;
    const auto u = index_space.find_user(user);
    const auto i = index_space.find_item(item);
    if (!u || !i) {
      ++out.unknown;
      continue;
    }
    out.pairs.push_back({*u, *i});
  }
  if (in.bad()) throw ParseError("read failure", 0);
  std::sort(out.pairs.begin(), out.pairs.end());
  const auto last = std::unique(out.pairs.begin(), out.pairs.end());
  out.duplicates = static_cast<std::size_t>(out.pairs.end() - last);
  out.pairs.erase(last, out.pairs.end());
  return out;
}

void write_interactions(std::ostream& out, const Dataset& d) {
  const auto pairs = d.interactions();
  write_interactions(out, d, pairs);
}

void write_interactions(std::ostream& out, const Dataset& index_space,
                        std::span<const Interaction> pairs) {
  for (const auto& p : pairs) {
    out << index_space.user_ids()[p.user] << '\t' << index_space.item_ids()[p.item] << '\n';
  }
}

SplitPair leave_one_out_split(const Dataset& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Interaction> train;
  train.reserve(d.num_interactions());
  SplitPair split;
  for (UserIndex u = 0; u < d.num_users(); ++u) {
    const auto items = d.items_of(u);
    if (items.size() < 2) {
      ++split.skipped_users;
      for (const ItemIndex i : items) train.push_back({u, i});
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
    const std::size_t held = pick(rng);
    for (std::size_t n = 0; n < items.size(); ++n) {
      if (n == held) {
        split.test.push_back({u, items[n]});
      } else {
        train.push_back({u, items[n]});
      }
    }
  }
  split.train = Dataset::from_pairs(d.user_ids(), d.item_ids(), std::move(train));
  return split;
}

SplitPair make_split(Dataset train, std::vector<Interaction> test) {
  SplitPair split;
  std::erase_if(test, [&](const Interaction& p) {
    return p.user >= train.num_users() || p.item >= train.num_items() ||
           train.contains(p.user, p.item);
  });
  std::sort(test.begin(), test.end());
  test.erase(std::unique(test.begin(), test.end()), test.end());
  split.train = std::move(train);
  split.test = std::move(test);
  return split;
}

Dataset merge_split(const SplitPair& split) {
  auto pairs = split.train.interactions();
  pairs.insert(pairs.end(), split.test.begin(), split.test.end());
  return Dataset::from_pairs(split.train.user_ids(), split.train.item_ids(), std::move(pairs));
}

}  // namespace bpr
