#pragma once

#include <cstdint>
#include <memory>

#include "lacache/policies.hpp"
#include "lacache/trace.hpp"

namespace lacache {

struct PolicyOptions {
  std::size_t capacity = 1;
  std::uint64_t seed = 0;
  double epsilon = 0.1;  // mw only
};

/// Builds a policy by kind. `ftl` combines BlindOracle with LRU and `mw`
/// combines BlindOracle with Marker (seeded from derive_seed(seed, 1)).
/// `belady` needs the trace for its true next arrivals; the others ignore it.
std::unique_ptr<EvictionPolicy> make_policy(PolicyKind kind, const PolicyOptions& options,
                                            const Trace* trace = nullptr);

/// Convenience: build and run in one go.
RunResult run_policy(PolicyKind kind, const Trace& trace, std::size_t capacity,
                     std::uint64_t seed = 0, double epsilon = 0.1);

/// Belady's eviction count on the trace.
std::size_t optimal_cost(const Trace& trace, std::size_t capacity);

}  // namespace lacache
