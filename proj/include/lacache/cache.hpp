#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lacache/trace.hpp"

namespace lacache {

/// One request as seen by an online policy: the page and its prediction.
struct Request {
  Time t = 0;
  PageId page;
  double prediction = 0.0;
};

/// A resident page together with the index of its most recent request and the
/// prediction issued with that request.
struct CacheEntry {
  PageId page;
  Time last_request = 0;
  double prediction = 0.0;
};

/// Fixed-capacity set of resident pages. Lookup is O(1) via a dense slot
/// table indexed by page id; victim selection scans the entries.
class CacheState {
 public:
  explicit CacheState(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool full() const { return entries_.size() >= capacity_; }
  bool contains(PageId page) const;
  const CacheEntry* find(PageId page) const;
  std::span<const CacheEntry> entries() const { return entries_; }

  /// Sorted list of resident pages; handy for comparing caches.
  std::vector<PageId> pages() const;

  void touch(const Request& request);
  void insert(const Request& request);
  void erase(PageId page);

 private:
  static constexpr std::int32_t kAbsent = -1;

  std::size_t capacity_;
  std::vector<CacheEntry> entries_;
  std::vector<std::int32_t> slot_;
};

/// Picks the entry to evict from a full cache.
template <typename F>
concept VictimSelector = requires(F f, const CacheState& s) {
  { f(s) } -> std::convertible_to<PageId>;
};

/// The contract every policy satisfies: hits refresh the entry, misses into a
/// non-full cache insert, misses into a full cache evict exactly one page.
template <VictimSelector F>
std::optional<PageId> policy_serve(CacheState& state, const Request& request,
                                   F&& choose_victim) {
  if (state.contains(request.page)) {
    state.touch(request);
    return std::nullopt;
  }
  std::optional<PageId> evicted;
  if (state.full()) {
    evicted = choose_victim(static_cast<const CacheState&>(state));
    state.erase(*evicted);
  }
  state.insert(request);
  return evicted;
}

}  // namespace lacache
