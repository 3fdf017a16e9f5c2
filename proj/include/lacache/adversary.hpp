#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "lacache/metrics.hpp"
#include "lacache/policies.hpp"
#include "lacache/trace.hpp"

namespace lacache {

/// Adaptive input that forces any deterministic online policy to pay j + 1
/// evictions per phase while the offline optimum pays at most 2.
///
/// Pages are p1..pk plus one spare page q0. A phase is:
///   1. k rounds requesting p1..pk in order, each predicted to return k
///      requests later, except in the last round where the prediction is
///      k + j + 1 requests later;
///   2. one request to q0, predicted to return k^2 + j + 1 requests later;
///   3. j requests, each to the page the policy evicted on the previous
///      request (or, when it evicted nothing, the lowest-numbered p-page not
///      resident, else p1), repeating that page's previous absolute prediction.
/// Phase length is k^2 + 1 + j.
struct AdversaryConfig {
  std::size_t k = 1;
  std::size_t j = 0;
  std::size_t num_phases = 1;

  void validate() const;
  std::size_t phase_length() const { return k * k + 1 + j; }
};

struct PhaseRecord {
  Time begin = 0;  // first request index of the phase
  Time end = 0;    // last request index (inclusive)
  std::size_t alg_cost = 0;
  std::size_t opt_cost = 0;  // Belady evictions inside the phase
  std::size_t opt_upper_bound = 2;
  double eta = 0.0;          // loss of the phase's own requests
  double eta_spare_page = 0.0;  // share of `eta` from requests to q0
  double eta_upper_bound = 0.0;

  /// Per-phase certificate: alg_cost >= j + 1, opt_cost <= 2, eta within bound.
  bool cost_ok(std::size_t j) const { return alg_cost >= j + 1; }
  bool opt_ok() const { return opt_cost <= opt_upper_bound; }
  bool eta_ok() const { return eta <= eta_upper_bound; }
};

struct AdversaryResult {
  AdversaryConfig config;
  Trace trace;
  RunResult alg;
  std::size_t opt_cost = 0;  // Belady on the generated trace
  double eta = 0.0;
  std::vector<PhaseRecord> phases;

  std::size_t opt_upper_bound() const { return 2 * config.num_phases; }
};

using PolicyFactory = std::function<std::unique_ptr<EvictionPolicy>()>;

/// Drives a fresh policy from `factory` through the adaptive construction and
/// then replays the generated trace on a second fresh instance. Throws
/// ContractViolation if the policy is not deterministic or the replay evicts
/// differently; ConfigError on a bad config or a policy whose cache size is
/// not config.k.
AdversaryResult run_adversary(const PolicyFactory& factory, const AdversaryConfig& config);

/// lower_bound_thm4 record: passes iff alg_cost >= 2 phases + phases (j - 1)
/// and the measured optimum stays within 2 per phase.
BoundRecord certify_lower_bound(const AdversaryResult& result);

}  // namespace lacache
