#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lacache {

/// Request index. Times are 1-based; a page never requested again has next
/// arrival n + 1.
using Time = std::int64_t;

/// Interned page identifier. The token a PageId stands for lives in the
/// owning Trace's page table (see Trace::name).
struct PageId {
  std::uint32_t value = 0;

  auto operator<=>(const PageId&) const = default;
};

/// next_arrivals(σ)[t-1] is the smallest t' > t with σ_t' = σ_t, else n + 1.
std::vector<Time> next_arrivals(std::span<const PageId> requests);

/// A request sequence with one prediction per request and the derived true
/// next-arrival times. Immutable once built; construction validates the
/// invariants and throws ConfigError on violation.
class Trace {
 public:
  /// Builds a trace from page tokens, interning them in first-seen order.
  static Trace from_tokens(std::span<const std::string> tokens,
                           std::vector<double> predictions);

  /// Builds a trace from already-interned ids; `names[id.value]` is the token.
  Trace(std::vector<std::string> names, std::vector<PageId> requests,
        std::vector<double> predictions);

  std::size_t size() const { return requests_.size(); }
  std::size_t universe_size() const { return names_.size(); }

  std::span<const PageId> requests() const { return requests_; }
  std::span<const double> predictions() const { return predictions_; }
  std::span<const Time> arrivals() const { return arrivals_; }
  std::span<const std::string> names() const { return names_; }

  PageId page_at(Time t) const { return requests_[static_cast<std::size_t>(t - 1)]; }
  double prediction_at(Time t) const {
    return predictions_[static_cast<std::size_t>(t - 1)];
  }
  Time arrival_at(Time t) const { return arrivals_[static_cast<std::size_t>(t - 1)]; }
  const std::string& name(PageId page) const { return names_[page.value]; }

  /// Same requests, different predictions.
  Trace with_predictions(std::vector<double> predictions) const;

 private:
  std::vector<std::string> names_;
  std::vector<PageId> requests_;
  std::vector<double> predictions_;
  std::vector<Time> arrivals_;
};

// ---------------------------------------------------------------------------
// Synthetic workloads

enum class WorkloadKind { uniform, zipf, cyclic, phased };

/// Page `i` of a generated workload is named "p<i+1>".
struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::uniform;
  std::size_t universe_size = 1;
  std::size_t length = 1;
  double alpha = 1.0;         // zipf exponent
  std::size_t cycle = 1;      // cyclic: period m
  std::size_t working_set = 1;  // phased: pages per phase
  std::size_t phase_length = 1; // phased: requests per phase

  void validate() const;
};

/// Deterministic for fixed (spec, seed). Throws ConfigError on invalid specs.
std::vector<PageId> generate_workload(const WorkloadSpec& spec, std::uint64_t seed);

/// generate_workload wrapped into a trace with perfect predictions.
Trace make_workload_trace(const WorkloadSpec& spec, std::uint64_t seed);

std::string workload_id(const WorkloadSpec& spec);

// ---------------------------------------------------------------------------
// Noisy predictors

enum class NoiseKind {
  perfect,
  additive_uniform,   // h = y + U(-width, width)
  additive_gaussian,  // h = y + N(0, scale)
  lognormal_scale,    // h = y * exp(N(0, scale))
  constant_shift,     // h = y + shift
  random_replace,     // with prob p: h = U(0, range), else h = y
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::perfect;
  double width = 0.0;
  double scale = 0.0;
  double shift = 0.0;
  double probability = 0.0;
  double range = 0.0;

  void validate() const;
};

/// Predictions derived from true arrivals. Outputs are clamped to be finite
/// and non-negative. `perfect` returns the arrivals exactly.
std::vector<double> perturb_predictions(std::span<const Time> arrivals,
                                        const NoiseSpec& noise, std::uint64_t seed);

std::string noise_id(const NoiseSpec& noise);

// ---------------------------------------------------------------------------
// Trace file format: header `t,page,h`, then one `t,page,h` row per request.

Trace parse_trace(std::string_view text);
std::string write_trace(const Trace& trace);

Trace read_trace_file(const std::string& path);
void write_trace_file(const Trace& trace, const std::string& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace lacache
