#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lacache/policies.hpp"
#include "lacache/trace.hpp"

namespace lacache {

/// Sum over t of |h_t - y_t|.
double ell1_loss(std::span<const Time> arrivals, std::span<const double> predictions);

/// Ordered pairs (i, j) with y_i < y_j but h_i >= h_j. O(n^2); used as the
/// reference for count_inversions_fast.
std::uint64_t count_inversions_naive(std::span<const Time> arrivals,
                                     std::span<const double> predictions);

/// Same count in O(n log n): requests are visited in ascending y, one y-group
/// at a time, and a Fenwick tree over h ranks counts earlier groups' h >= h_j.
std::uint64_t count_inversions_fast(std::span<const Time> arrivals,
                                    std::span<const double> predictions);

/// H_k = 1 + 1/2 + ... + 1/k.
double harmonic(std::size_t k);

struct ErrorSummary {
  double eta = 0.0;
  std::uint64_t inversions = 0;
  std::size_t opt_cost = 0;
  /// eta / OPT; empty when OPT = 0.
  std::optional<double> eps_ratio;
};

ErrorSummary summarize_errors(const Trace& trace, std::size_t opt_cost);

// ---------------------------------------------------------------------------
// Bound checks

enum class BoundId {
  thm1_prop1,        // BlindOracle <= OPT + 2 eta
  thm1_prop2,        // BlindOracle <= 2 OPT + 4 eta / (k-1) + slack
  cor1_det,          // FTL(BO, LRU) against the chained deterministic bound
  cor2_rand,         // MW(BO, Marker) against the chained randomized bound
  ftl_thm2,          // FTL <= 2 min(BO, LRU) + slack
  mw_thm3,           // MW <= (1 + eps) min(BO, Marker) + slack
  lru_k,             // LRU <= k OPT + slack
  marker_2hk,        // Marker <= (2 H_k - 1) OPT + slack
  lower_bound_thm4,  // adversary: ALG >= OPT_upper + phases (j - 1)
  lemma1,            // eta >= M / 2
};

std::string_view bound_name(BoundId id);
BoundId parse_bound_id(std::string_view name);

enum class Verdict { pass, fail, not_applicable };

/// One checked inequality lhs <= rhs. `rhs` already includes `slack`; the
/// slack is also stored on its own so budget changes stay visible.
struct BoundRecord {
  BoundId id{};
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::not_applicable;
  /// Set for ratio bounds evaluated with OPT = 0 (no ratio is defined; the
  /// additive inequality is still checked).
  bool vacuous = false;
};

struct BoundReport {
  std::vector<BoundRecord> records;

  const BoundRecord* find(BoundId id) const;
  bool all_passed() const;
  std::vector<BoundId> passed() const;
  std::vector<BoundId> failed() const;
};

/// Additive budgets for each bound, expressed per unit of k.
struct SlackPolicy {
  double prop1 = 0.0;
  double prop2_per_k = 1.0;
  double ftl_per_k = 2.0;
  double mw_per_k_over_eps = 8.0;
  double lru_per_k = 1.0;
  double marker_per_k = 1.0;
};

struct BoundInputs {
  /// Costs by policy; for randomized policies, the mean over seeds.
  std::map<PolicyKind, double> costs;
  double opt = 0.0;
  double eta = 0.0;
  double inversions = 0.0;
  std::size_t k = 1;
  std::optional<double> epsilon;  // mw combiner parameter
};

/// Evaluates every bound whose inputs are present. Ids listed in `required`
/// must be evaluable; a missing cost for one of them is a ConfigError.
/// lower_bound_thm4 comes from certify_lower_bound, not from here.
BoundReport check_bounds(const BoundInputs& inputs, const SlackPolicy& slack = {},
                         std::span<const BoundId> required = {});

/// Record with pass iff lhs <= rhs.
BoundRecord make_record(BoundId id, double lhs, double base_rhs, double slack,
                        bool vacuous = false);

}  // namespace lacache
