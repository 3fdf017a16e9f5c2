#include "lacache/metrics.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numeric>
#include <string>

#include "lacache/errors.hpp"

namespace lacache {

double ell1_loss(std::span<const Time> arrivals, std::span<const double> predictions) {
  assert(arrivals.size() == predictions.size());
  double total = 0.0;
  for (std::size_t t = 0; t < arrivals.size(); ++t) {
    total += std::abs(predictions[t] - static_cast<double>(arrivals[t]));
  }
  return total;
}

std::uint64_t count_inversions_naive(std::span<const Time> arrivals,
                                     std::span<const double> predictions) {
  assert(arrivals.size() == predictions.size());
  std::uint64_t count = 0;
  const auto n = arrivals.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && arrivals[i] < arrivals[j] && predictions[i] >= predictions[j]) {
        ++count;
      }
    }
  }
  return count;
}

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t index) {
    for (auto i = index + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  /// Number of added indices strictly below `end`.
  std::uint64_t prefix(std::size_t end) const {
    std::uint64_t sum = 0;
    for (auto i = end; i > 0; i -= i & (~i + 1)) sum += tree_[i];
    return sum;
  }

 private:
  std::vector<std::uint64_t> tree_;
};

}  // namespace

std::uint64_t count_inversions_fast(std::span<const Time> arrivals,
                                    std::span<const double> predictions) {
  assert(arrivals.size() == predictions.size());
  const auto n = arrivals.size();

  std::vector<double> levels(predictions.begin(), predictions.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[i] = static_cast<std::size_t>(
        std::lower_bound(levels.begin(), levels.end(), predictions[i]) - levels.begin());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return arrivals[l] < arrivals[r]; });

  Fenwick seen(levels.size());
  std::uint64_t inserted = 0;
  std::uint64_t count = 0;
  for (std::size_t begin = 0; begin < n;) {
    auto end = begin;
    while (end < n && arrivals[order[end]] == arrivals[order[begin]]) ++end;
    // Pairs need strict y_i < y_j, so a group only sees earlier groups.
    for (auto g = begin; g < end; ++g) count += inserted - seen.prefix(rank[order[g]]);
    for (auto g = begin; g < end; ++g) seen.add(rank[order[g]]);
    inserted += end - begin;
    begin = end;
  }
  return count;
}

double harmonic(std::size_t k) {
  double h = 0.0;
  for (std::size_t i = k; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

ErrorSummary summarize_errors(const Trace& trace, std::size_t opt_cost) {
  ErrorSummary s;
  s.eta = ell1_loss(trace.arrivals(), trace.predictions());
  s.inversions = count_inversions_fast(trace.arrivals(), trace.predictions());
  s.opt_cost = opt_cost;
  if (opt_cost > 0) s.eps_ratio = s.eta / static_cast<double>(opt_cost);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<BoundId, std::string_view>, 10> kBoundNames{{
    {BoundId::thm1_prop1, "thm1_prop1"},
    {BoundId::thm1_prop2, "thm1_prop2"},
    {BoundId::cor1_det, "cor1_det"},
    {BoundId::cor2_rand, "cor2_rand"},
    {BoundId::ftl_thm2, "ftl_thm2"},
    {BoundId::mw_thm3, "mw_thm3"},
    {BoundId::lru_k, "lru_k"},
    {BoundId::marker_2hk, "marker_2hk"},
    {BoundId::lower_bound_thm4, "lower_bound_thm4"},
    {BoundId::lemma1, "lemma1"},
}};

}  // namespace

std::string_view bound_name(BoundId id) {
  for (const auto& [b, name] : kBoundNames) {
    if (b == id) return name;
  }
  return "unknown";
}

BoundId parse_bound_id(std::string_view name) {
  for (const auto& [b, n] : kBoundNames) {
    if (n == name) return b;
  }
  throw ConfigError("unknown bound id '" + std::string(name) + "'");
}

const BoundRecord* BoundReport::find(BoundId id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

bool BoundReport::all_passed() const {
  return std::none_of(records.begin(), records.end(),
                      [](const BoundRecord& r) { return r.verdict == Verdict::fail; });
}

std::vector<BoundId> BoundReport::passed() const {
  std::vector<BoundId> out;
  for (const auto& r : records) {
    if (r.verdict == Verdict::pass) out.push_back(r.id);
  }
  return out;
}

std::vector<BoundId> BoundReport::failed() const {
  std::vector<BoundId> out;
  for (const auto& r : records) {
    if (r.verdict == Verdict::fail) out.push_back(r.id);
  }
  return out;
}

BoundRecord make_record(BoundId id, double lhs, double base_rhs, double slack,
                        bool vacuous) {
  BoundRecord r;
  r.id = id;
  r.lhs = lhs;
  r.slack = slack;
  r.rhs = base_rhs + slack;
  r.verdict = lhs <= r.rhs ? Verdict::pass : Verdict::fail;
  r.vacuous = vacuous;
  return r;
}

BoundReport check_bounds(const BoundInputs& in, const SlackPolicy& slack,
                         std::span<const BoundId> required) {
  if (in.k < 1) throw ConfigError("cache size must be >= 1");
  const auto k = static_cast<double>(in.k);
  const bool opt_zero = in.opt == 0.0;
  const auto cost = [&](PolicyKind p) -> std::optional<double> {
    auto it = in.costs.find(p);
    if (it == in.costs.end()) return std::nullopt;
    return it->second;
  };
  const auto bo = cost(PolicyKind::blind_oracle);
  const auto lru = cost(PolicyKind::lru);
  const auto marker = cost(PolicyKind::marker);
  const auto ftl = cost(PolicyKind::ftl);
  const auto mw = cost(PolicyKind::mw);

  // Predictive-side upper bounds on BlindOracle, without their slacks.
  const double prop1_rhs = in.opt + 2.0 * in.eta;
  const std::optional<double> prop2_rhs =
      in.k >= 2 ? std::optional<double>(2.0 * in.opt + 4.0 * in.eta / (k - 1.0))
                : std::nullopt;
  const double predictive = prop2_rhs ? std::min(prop1_rhs, *prop2_rhs) : prop1_rhs;
  const double marker_ratio = 2.0 * harmonic(in.k) - 1.0;

  BoundReport report;
  auto& out = report.records;

  out.push_back(make_record(BoundId::lemma1, in.inversions / 2.0, in.eta, 0.0));

  if (bo) {
    out.push_back(
        make_record(BoundId::thm1_prop1, *bo, prop1_rhs, slack.prop1, opt_zero));
    if (prop2_rhs) {
      out.push_back(make_record(BoundId::thm1_prop2, *bo, *prop2_rhs,
                                slack.prop2_per_k * k, opt_zero));
    } else {
      BoundRecord na;
      na.id = BoundId::thm1_prop2;
      na.lhs = *bo;
      out.push_back(na);
    }
  }
  if (lru) {
    out.push_back(
        make_record(BoundId::lru_k, *lru, k * in.opt, slack.lru_per_k * k, opt_zero));
  }
  if (marker) {
    out.push_back(make_record(BoundId::marker_2hk, *marker, marker_ratio * in.opt,
                              slack.marker_per_k * k, opt_zero));
  }
  if (ftl && bo && lru) {
    out.push_back(make_record(BoundId::ftl_thm2, *ftl, 2.0 * std::min(*bo, *lru),
                              slack.ftl_per_k * k));
  }
  if (ftl) {
    // Chain: FTL <= 2 min(BO, LRU) + s_ftl with BO <= predictive + s_prop2 and
    // LRU <= k OPT + s_lru.
    const double inner = std::max(prop2_rhs ? slack.prop2_per_k * k : slack.prop1,
                                  slack.lru_per_k * k);
    out.push_back(make_record(BoundId::cor1_det, *ftl,
                              2.0 * std::min(predictive, k * in.opt),
                              slack.ftl_per_k * k + 2.0 * inner, opt_zero));
  }
  if (mw && in.epsilon) {
    const double eps = *in.epsilon;
    const double mw_slack = slack.mw_per_k_over_eps * k / eps;
    if (bo && marker) {
      out.push_back(make_record(BoundId::mw_thm3, *mw,
                                (1.0 + eps) * std::min(*bo, *marker), mw_slack));
    }
    const double inner = std::max(prop2_rhs ? slack.prop2_per_k * k : slack.prop1,
                                  slack.marker_per_k * k);
    out.push_back(make_record(BoundId::cor2_rand, *mw,
                              (1.0 + eps) * std::min(predictive, marker_ratio * in.opt),
                              mw_slack + (1.0 + eps) * inner, opt_zero));
  }

  for (const auto id : required) {
    if (report.find(id) == nullptr) {
      throw ConfigError("bound '" + std::string(bound_name(id)) +
                        "' requires costs that were not provided");
    }
  }
  return report;
}

}  // namespace lacache
