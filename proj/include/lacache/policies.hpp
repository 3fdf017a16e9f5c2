#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lacache/cache.hpp"
#include "lacache/rng.hpp"
#include "lacache/trace.hpp"

namespace lacache {

/// Policy identifiers as they appear in configs and result files.
enum class PolicyKind { belady, blind_oracle, ftl, lru, marker, mw };

std::string_view policy_name(PolicyKind kind);
/// Throws ConfigError for unknown names.
PolicyKind parse_policy_kind(std::string_view name);

/// An online caching algorithm with private cache state. `serve` handles one
/// request and returns the page it evicted, if any.
class EvictionPolicy {
 public:
  virtual ~EvictionPolicy() = default;

  virtual std::optional<PageId> serve(const Request& request) = 0;
  virtual const CacheState& cache() const = 0;
  virtual std::string_view name() const = 0;
  virtual bool deterministic() const = 0;
  /// Seed driving the policy's randomness; 0 for deterministic policies.
  virtual std::uint64_t seed() const { return 0; }
};

// Victim rules on a full cache. All ties go to the least recent last_request.

/// Least recent last_request.
PageId lru_victim(const CacheState& state);

/// Largest stored prediction.
PageId blind_oracle_victim(const CacheState& state);

/// Largest true next arrival. An entry's next arrival is arrivals[last_request],
/// because last_request is the page's latest occurrence.
PageId belady_victim(const CacheState& state, std::span<const Time> arrivals);

class LruPolicy final : public EvictionPolicy {
 public:
  explicit LruPolicy(std::size_t capacity) : cache_(capacity) {}

  std::optional<PageId> serve(const Request& request) override {
    return policy_serve(cache_, request, lru_victim);
  }
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "lru"; }
  bool deterministic() const override { return true; }

 private:
  CacheState cache_;
};

/// Evicts the resident page whose most recent prediction is furthest away.
class BlindOraclePolicy final : public EvictionPolicy {
 public:
  explicit BlindOraclePolicy(std::size_t capacity) : cache_(capacity) {}

  std::optional<PageId> serve(const Request& request) override {
    return policy_serve(cache_, request, blind_oracle_victim);
  }
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "blind_oracle"; }
  bool deterministic() const override { return true; }

 private:
  CacheState cache_;
};

/// Offline optimum. Needs the whole trace's true next arrivals up front.
class BeladyPolicy final : public EvictionPolicy {
 public:
  BeladyPolicy(std::size_t capacity, std::vector<Time> arrivals)
      : cache_(capacity), arrivals_(std::move(arrivals)) {}

  std::optional<PageId> serve(const Request& request) override {
    return policy_serve(cache_, request, [this](const CacheState& s) {
      return belady_victim(s, arrivals_);
    });
  }
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "belady"; }
  bool deterministic() const override { return true; }

 private:
  CacheState cache_;
  std::vector<Time> arrivals_;
};

/// Per-page mark bits for the marking algorithm.
class MarkSet {
 public:
  bool marked(PageId page) const {
    return page.value < bits_.size() && bits_[page.value];
  }
  void mark(PageId page);
  void unmark(PageId page) {
    if (page.value < bits_.size()) bits_[page.value] = false;
  }
  void clear() { bits_.assign(bits_.size(), false); }

 private:
  std::vector<bool> bits_;
};

/// One step of the randomized marking algorithm. The requested page ends up
/// marked. On a miss into a full cache with every resident page marked, all
/// marks are cleared (a new phase) before drawing the victim uniformly from
/// the unmarked resident pages.
std::optional<PageId> marker_serve(CacheState& state, MarkSet& marks,
                                   const Request& request, Rng& rng);

class MarkerPolicy final : public EvictionPolicy {
 public:
  MarkerPolicy(std::size_t capacity, std::uint64_t seed)
      : cache_(capacity), rng_(seed), seed_(seed) {}

  std::optional<PageId> serve(const Request& request) override {
    return marker_serve(cache_, marks_, request, rng_);
  }
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "marker"; }
  bool deterministic() const override { return false; }
  std::uint64_t seed() const override { return seed_; }

  const MarkSet& marks() const { return marks_; }
  MarkSet& marks() { return marks_; }

 private:
  CacheState cache_;
  MarkSet marks_;
  Rng rng_;
  std::uint64_t seed_;
};

struct Eviction {
  Time t = 0;
  PageId page;

  bool operator==(const Eviction&) const = default;
};

struct RunResult {
  std::size_t cost = 0;
  std::vector<Eviction> evictions;
  std::uint64_t seed = 0;

  bool operator==(const RunResult&) const = default;
};

/// Serves every request of the trace in order and tallies evictions.
RunResult run_policy(EvictionPolicy& policy, const Trace& trace);

}  // namespace lacache
