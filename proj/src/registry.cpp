#include "lacache/registry.hpp"

#include "lacache/combine.hpp"
#include "lacache/errors.hpp"

namespace lacache {

std::unique_ptr<EvictionPolicy> make_policy(PolicyKind kind, const PolicyOptions& options,
                                            const Trace* trace) {
  const auto k = options.capacity;
  switch (kind) {
    case PolicyKind::lru:
      return std::make_unique<LruPolicy>(k);
    case PolicyKind::blind_oracle:
      return std::make_unique<BlindOraclePolicy>(k);
    case PolicyKind::belady: {
      if (trace == nullptr) throw ConfigError("belady needs the full trace");
      const auto y = trace->arrivals();
      return std::make_unique<BeladyPolicy>(k, std::vector<Time>(y.begin(), y.end()));
    }
    case PolicyKind::marker:
      return std::make_unique<MarkerPolicy>(k, options.seed);
    case PolicyKind::ftl:
      return std::make_unique<FtlCombiner>(std::make_unique<BlindOraclePolicy>(k),
                                           std::make_unique<LruPolicy>(k), k);
    case PolicyKind::mw:
      return std::make_unique<MwCombiner>(
          std::make_unique<BlindOraclePolicy>(k),
          std::make_unique<MarkerPolicy>(k, derive_seed(options.seed, 1)), k,
          options.epsilon, options.seed);
  }
  throw ConfigError("unknown policy kind");
}

RunResult run_policy(PolicyKind kind, const Trace& trace, std::size_t capacity,
                     std::uint64_t seed, double epsilon) {
  auto policy = make_policy(kind, PolicyOptions{capacity, seed, epsilon}, &trace);
  return run_policy(*policy, trace);
}

std::size_t optimal_cost(const Trace& trace, std::size_t capacity) {
  return run_policy(PolicyKind::belady, trace, capacity).cost;
}

}  // namespace lacache
