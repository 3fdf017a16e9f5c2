#include "lacache/policies.hpp"

#include <array>
#include <cassert>
#include <string>

#include "lacache/errors.hpp"

namespace lacache {

namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 6> kPolicyNames{{
    {PolicyKind::belady, "belady"},
    {PolicyKind::blind_oracle, "blind_oracle"},
    {PolicyKind::ftl, "ftl"},
    {PolicyKind::lru, "lru"},
    {PolicyKind::marker, "marker"},
    {PolicyKind::mw, "mw"},
}};

// Entry with the largest key; ties go to the smallest last_request.
template <typename Key>
PageId max_key_victim(const CacheState& state, Key&& key) {
  const auto entries = state.entries();
  assert(!entries.empty());
  const CacheEntry* best = &entries.front();
  auto best_key = key(*best);
  for (const auto& e : entries.subspan(1)) {
    const auto k = key(e);
    if (k > best_key || (k == best_key && e.last_request < best->last_request)) {
      best = &e;
      best_key = k;
    }
  }
  return best->page;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

PageId lru_victim(const CacheState& state) {
  const auto entries = state.entries();
  assert(!entries.empty());
  const CacheEntry* best = &entries.front();
  for (const auto& e : entries) {
    if (e.last_request < best->last_request) best = &e;
  }
  return best->page;
}

PageId blind_oracle_victim(const CacheState& state) {
  return max_key_victim(state, [](const CacheEntry& e) { return e.prediction; });
}

PageId belady_victim(const CacheState& state, std::span<const Time> arrivals) {
  return max_key_victim(state, [arrivals](const CacheEntry& e) {
    return arrivals[static_cast<std::size_t>(e.last_request - 1)];
  });
}

void MarkSet::mark(PageId page) {
  if (page.value >= bits_.size()) bits_.resize(page.value + 1, false);
  bits_[page.value] = true;
}

std::optional<PageId> marker_serve(CacheState& state, MarkSet& marks,
                                   const Request& request, Rng& rng) {
  std::optional<PageId> evicted;
  if (state.contains(request.page)) {
    state.touch(request);
  } else {
    if (state.full()) {
      std::vector<PageId> unmarked;
      for (const auto& e : state.entries()) {
        if (!marks.marked(e.page)) unmarked.push_back(e.page);
      }
      if (unmarked.empty()) {
        marks.clear();
        for (const auto& e : state.entries()) unmarked.push_back(e.page);
      }
      // Entry order in CacheState depends only on the request history, so
      // the draw is reproducible for a fixed seed.
      evicted = unmarked[rng.uniform_below(unmarked.size())];
      state.erase(*evicted);
      marks.unmark(*evicted);
    }
    state.insert(request);
  }
  marks.mark(request.page);
  return evicted;
}

RunResult run_policy(EvictionPolicy& policy, const Trace& trace) {
  RunResult result;
  result.seed = policy.seed();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Request request{static_cast<Time>(i + 1), trace.requests()[i],
                          trace.predictions()[i]};
    if (auto evicted = policy.serve(request)) {
      result.evictions.push_back(Eviction{request.t, *evicted});
    }
  }
  result.cost = result.evictions.size();
  return result;
}

}  // namespace lacache
