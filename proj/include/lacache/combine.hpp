#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "lacache/cache.hpp"
#include "lacache/policies.hpp"
#include "lacache/rng.hpp"

namespace lacache {

enum class Expert { a, b };

/// Strict argmin of the two costs; a tie keeps the incumbent.
Expert ftl_leader(std::size_t cost_a, std::size_t cost_b, Expert incumbent);

/// Serves `request` on `own` while steering it toward `target`: on a miss into
/// a full cache, the victim is the least recently used page of `own` that
/// `target` does not hold. Called after the target has served the request, so
/// such a page always exists; if not, falls back to plain LRU.
std::optional<PageId> follow_serve(CacheState& own, const Request& request,
                                   const CacheState& target);

/// Two experts simulated side by side, each with its own cache.
class ExpertPair {
 public:
  ExpertPair(std::unique_ptr<EvictionPolicy> a, std::unique_ptr<EvictionPolicy> b);

  /// Serves both experts; returns each one's step cost (0 or 1).
  std::pair<int, int> serve(const Request& request);

  const EvictionPolicy& get(Expert which) const { return which == Expert::a ? *a_ : *b_; }
  std::size_t cost(Expert which) const { return which == Expert::a ? cost_a_ : cost_b_; }

 private:
  std::unique_ptr<EvictionPolicy> a_;
  std::unique_ptr<EvictionPolicy> b_;
  std::size_t cost_a_ = 0;
  std::size_t cost_b_ = 0;
};

/// Deterministic follow-the-leader combination of two policies. Both experts
/// serve each request first; the leader is then recomputed from their
/// cumulative eviction counts, and the combined cache follows the leader's.
class FtlCombiner final : public EvictionPolicy {
 public:
  FtlCombiner(std::unique_ptr<EvictionPolicy> a, std::unique_ptr<EvictionPolicy> b,
              std::size_t capacity);

  std::optional<PageId> serve(const Request& request) override;
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "ftl"; }
  bool deterministic() const override;

  Expert leader() const { return leader_; }
  const ExpertPair& experts() const { return experts_; }

 private:
  ExpertPair experts_;
  CacheState cache_;
  Expert leader_ = Expert::a;
};

struct MwWeights {
  double a = 1.0;
  double b = 1.0;
};

/// w_i' = w_i * (1 - epsilon)^cost_i.
MwWeights mw_update(MwWeights weights, double epsilon, int cost_a, int cost_b);

/// Probability of following expert A.
double mw_probability_a(MwWeights weights);

/// Throws ConfigError unless 0 < epsilon < 1/4.
void validate_epsilon(double epsilon);

/// Randomized multiplicative-weights combination of two policies.
///
/// Weights are kept in the log domain so long traces cannot underflow them.
/// After each request the followed expert is re-drawn by coupling: when the
/// followed expert's probability drops from p to p', the combiner switches
/// with probability (p - p') / p, which keeps the marginal distribution of the
/// followed expert equal to the weights' distribution. The combined cache then
/// converges lazily toward the followed expert's cache, one eviction per miss.
class MwCombiner final : public EvictionPolicy {
 public:
  MwCombiner(std::unique_ptr<EvictionPolicy> a, std::unique_ptr<EvictionPolicy> b,
             std::size_t capacity, double epsilon, std::uint64_t seed);

  std::optional<PageId> serve(const Request& request) override;
  const CacheState& cache() const override { return cache_; }
  std::string_view name() const override { return "mw"; }
  bool deterministic() const override { return false; }
  std::uint64_t seed() const override { return seed_; }

  double epsilon() const { return epsilon_; }
  double log_weight(Expert which) const { return which == Expert::a ? log_a_ : log_b_; }
  double probability(Expert which) const;
  Expert followed() const { return followed_; }
  std::size_t switches() const { return switches_; }
  const ExpertPair& experts() const { return experts_; }

 private:
  ExpertPair experts_;
  CacheState cache_;
  double epsilon_;
  double log_a_ = 0.0;
  double log_b_ = 0.0;
  Rng rng_;
  std::uint64_t seed_;
  Expert followed_ = Expert::a;
  std::size_t switches_ = 0;
};

}  // namespace lacache
