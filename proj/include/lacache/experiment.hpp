#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lacache/adversary.hpp"
#include "lacache/metrics.hpp"
#include "lacache/policies.hpp"
#include "lacache/trace.hpp"

namespace lacache {

/// Where a sweep's request sequences come from. Exactly one member is set.
struct TraceSource {
  std::optional<std::string> path;
  std::optional<WorkloadSpec> workload;

  std::string id() const;
};

struct AdversarySweep {
  std::vector<std::size_t> k_values;
  std::vector<std::size_t> j_values;
  std::size_t num_phases = 10;
  std::vector<PolicyKind> policies;
};

/// A full experiment. See README.md for the JSON layout accepted by
/// parse_experiment_config.
struct ExperimentConfig {
  std::vector<std::size_t> k_values{4};
  std::vector<TraceSource> traces;
  /// Empty: use the predictions stored in the trace file (perfect predictions
  /// for generated workloads).
  std::vector<NoiseSpec> noise;
  std::vector<PolicyKind> policies;
  double epsilon = 0.1;
  std::vector<std::uint64_t> seeds{1};
  std::optional<AdversarySweep> adversary;
  std::vector<BoundId> fatal;
  SlackPolicy slack;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string output;

  void validate() const;
};

/// Parses the JSON config format. Throws ConfigError naming the bad key.
ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// "kind" or "kind:key=value,key=value", e.g. "additive_uniform:w=4".
NoiseSpec parse_noise_spec(std::string_view text);
/// "kind:key=value,...", e.g. "zipf:alpha=1,universe=100,length=1000".
WorkloadSpec parse_workload_spec(std::string_view text);

struct ResultRow {
  std::string trace_id;
  std::size_t k = 0;
  std::string noise_id;
  std::optional<std::uint64_t> seed;  // empty: aggregate over seeds
  std::string policy;
  double cost = 0.0;
  double opt = 0.0;
  double eta = 0.0;
  double inversions = 0.0;
  std::optional<double> eps_ratio;
  std::vector<BoundRecord> bounds;
};

/// Runs every (trace, k, noise, seed) cell, one row per policy, plus `agg`
/// rows with seed means for randomized policies, then adversary rows.
/// Rows come back in emit order, independent of thread scheduling.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// True if any row fails a bound listed in `fatal`.
bool has_fatal_failure(const std::vector<ResultRow>& rows,
                       const std::vector<BoundId>& fatal);

/// Sorts rows by (trace_id, k, noise_id, seed with agg last, policy).
void sort_rows(std::vector<ResultRow>& rows);

std::string format_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace lacache
