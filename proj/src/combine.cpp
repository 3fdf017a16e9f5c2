#include "lacache/combine.hpp"

#include <cmath>

#include "lacache/errors.hpp"

namespace lacache {

Expert ftl_leader(std::size_t cost_a, std::size_t cost_b, Expert incumbent) {
  if (cost_a < cost_b) return Expert::a;
  if (cost_b < cost_a) return Expert::b;
  return incumbent;
}

std::optional<PageId> follow_serve(CacheState& own, const Request& request,
                                   const CacheState& target) {
  return policy_serve(own, request, [&target](const CacheState& s) {
    const CacheEntry* best = nullptr;
    for (const auto& e : s.entries()) {
      if (target.contains(e.page)) continue;
      if (best == nullptr || e.last_request < best->last_request) best = &e;
    }
    return best != nullptr ? best->page : lru_victim(s);
  });
}

ExpertPair::ExpertPair(std::unique_ptr<EvictionPolicy> a,
                       std::unique_ptr<EvictionPolicy> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw ConfigError("combiner experts must be non-null");
}

std::pair<int, int> ExpertPair::serve(const Request& request) {
  const int step_a = a_->serve(request) ? 1 : 0;
  const int step_b = b_->serve(request) ? 1 : 0;
  cost_a_ += static_cast<std::size_t>(step_a);
  cost_b_ += static_cast<std::size_t>(step_b);
  return {step_a, step_b};
}

// ---------------------------------------------------------------------------

FtlCombiner::FtlCombiner(std::unique_ptr<EvictionPolicy> a,
                         std::unique_ptr<EvictionPolicy> b, std::size_t capacity)
    : experts_(std::move(a), std::move(b)), cache_(capacity) {
  if (experts_.get(Expert::a).cache().capacity() != capacity ||
      experts_.get(Expert::b).cache().capacity() != capacity) {
    throw ConfigError("combiner experts must share the combiner's cache size");
  }
}

bool FtlCombiner::deterministic() const {
  return experts_.get(Expert::a).deterministic() &&
         experts_.get(Expert::b).deterministic();
}

std::optional<PageId> FtlCombiner::serve(const Request& request) {
  experts_.serve(request);
  leader_ = ftl_leader(experts_.cost(Expert::a), experts_.cost(Expert::b), leader_);
  return follow_serve(cache_, request, experts_.get(leader_).cache());
}

// ---------------------------------------------------------------------------

MwWeights mw_update(MwWeights weights, double epsilon, int cost_a, int cost_b) {
  weights.a *= std::pow(1.0 - epsilon, cost_a);
  weights.b *= std::pow(1.0 - epsilon, cost_b);
  return weights;
}

double mw_probability_a(MwWeights weights) {
  return weights.a / (weights.a + weights.b);
}

void validate_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw ConfigError("epsilon must satisfy 0 < epsilon < 1/4");
  }
}

MwCombiner::MwCombiner(std::unique_ptr<EvictionPolicy> a,
                       std::unique_ptr<EvictionPolicy> b, std::size_t capacity,
                       double epsilon, std::uint64_t seed)
    : experts_(std::move(a), std::move(b)),
      cache_(capacity),
      epsilon_(epsilon),
      rng_(seed),
      seed_(seed) {
  validate_epsilon(epsilon);
  if (experts_.get(Expert::a).cache().capacity() != capacity ||
      experts_.get(Expert::b).cache().capacity() != capacity) {
    throw ConfigError("combiner experts must share the combiner's cache size");
  }
  followed_ = rng_.bernoulli(0.5) ? Expert::a : Expert::b;
}

double MwCombiner::probability(Expert which) const {
  // Logistic form of w_x / (w_a + w_b).
  const double own = which == Expert::a ? log_a_ : log_b_;
  const double other = which == Expert::a ? log_b_ : log_a_;
  return 1.0 / (1.0 + std::exp(other - own));
}

std::optional<PageId> MwCombiner::serve(const Request& request) {
  const auto [step_a, step_b] = experts_.serve(request);
  const double before = probability(followed_);
  const double log_decay = std::log1p(-epsilon_);
  log_a_ += step_a * log_decay;
  log_b_ += step_b * log_decay;
  const double after = probability(followed_);
  if (after < before && rng_.bernoulli((before - after) / before)) {
    followed_ = followed_ == Expert::a ? Expert::b : Expert::a;
    ++switches_;
  }
  return follow_serve(cache_, request, experts_.get(followed_).cache());
}

}  // namespace lacache
