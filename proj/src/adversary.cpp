#include "lacache/adversary.hpp"

#include <cmath>
#include <string>

#include "lacache/errors.hpp"
#include "lacache/registry.hpp"

namespace lacache {

void AdversaryConfig::validate() const {
  if (k < 1) throw ConfigError("adversary k must be >= 1");
  if (j >= k) throw ConfigError("adversary j must satisfy 0 <= j < k");
  if (num_phases < 1) throw ConfigError("adversary needs at least one phase");
}

namespace {

class PhaseDriver {
 public:
  PhaseDriver(EvictionPolicy& policy, const AdversaryConfig& config)
      : policy_(policy),
        k_(config.k),
        spare_(PageId{static_cast<std::uint32_t>(config.k)}),
        last_prediction_(config.k + 1, 0.0) {}

  void request(PageId page, double prediction) {
    const Time t = next_time();
    requests_.push_back(page);
    predictions_.push_back(prediction);
    last_prediction_[page.value] = prediction;
    last_evicted_ = policy_.serve(Request{t, page, prediction});
    if (last_evicted_) evictions_.push_back(Eviction{t, *last_evicted_});
  }

  void run_phase(std::size_t j) {
    const auto k = static_cast<Time>(k_);
    const auto jj = static_cast<Time>(j);
    for (Time round = 1; round <= k; ++round) {
      const Time offset = round < k ? k : k + jj + 1;
      for (std::uint32_t i = 0; i < k_; ++i) {
        request(PageId{i}, static_cast<double>(next_time() + offset));
      }
    }
    request(spare_, static_cast<double>(next_time() + k * k + jj + 1));
    for (std::size_t step = 0; step < j; ++step) {
      const PageId target = last_evicted_ ? *last_evicted_ : fallback_page();
      request(target, last_prediction_[target.value]);
    }
  }

  Time next_time() const { return static_cast<Time>(requests_.size()) + 1; }
  std::vector<PageId>& requests() { return requests_; }
  std::vector<double>& predictions() { return predictions_; }
  std::vector<Eviction>& evictions() { return evictions_; }

 private:
  PageId fallback_page() const {
    for (std::uint32_t i = 0; i < k_; ++i) {
      if (!policy_.cache().contains(PageId{i})) return PageId{i};
    }
    return PageId{0};
  }

  EvictionPolicy& policy_;
  std::size_t k_;
  PageId spare_;
  std::vector<double> last_prediction_;
  std::optional<PageId> last_evicted_;
  std::vector<PageId> requests_;
  std::vector<double> predictions_;
  std::vector<Eviction> evictions_;
};

}  // namespace

AdversaryResult run_adversary(const PolicyFactory& factory, const AdversaryConfig& config) {
  config.validate();
  auto policy = factory();
  if (!policy) throw ConfigError("policy factory returned null");
  if (!policy->deterministic()) {
    throw ContractViolation("adversary requires a deterministic policy, got '" +
                            std::string(policy->name()) + "'");
  }
  if (policy->cache().capacity() != config.k) {
    throw ConfigError("policy cache size does not match adversary k");
  }

  PhaseDriver driver(*policy, config);
  for (std::size_t p = 0; p < config.num_phases; ++p) driver.run_phase(config.j);

  std::vector<std::string> names;
  for (std::size_t i = 1; i <= config.k; ++i) names.push_back("p" + std::to_string(i));
  names.emplace_back("q0");

  AdversaryResult result{config,
                         Trace(std::move(names), std::move(driver.requests()),
                               std::move(driver.predictions())),
                         RunResult{},
                         0,
                         0.0,
                         {}};
  result.alg.evictions = std::move(driver.evictions());
  result.alg.cost = result.alg.evictions.size();

  auto replay_policy = factory();
  const auto replay = run_policy(*replay_policy, result.trace);
  if (replay.evictions != result.alg.evictions) {
    throw ContractViolation("policy '" + std::string(policy->name()) +
                            "' evicted differently when replayed on its own trace");
  }

  const auto opt = run_policy(PolicyKind::belady, result.trace, config.k);
  result.opt_cost = opt.cost;

  const auto& trace = result.trace;
  const auto length = static_cast<Time>(config.phase_length());
  const PageId spare{static_cast<std::uint32_t>(config.k)};
  const double per_phase_eta = 2.0 * static_cast<double>(config.j * config.k);
  // Predictions from the last phase point past the end of the trace, where
  // y = n + 1; allow up to 2k of error on each of the k p-pages and q0's.
  const double final_allowance = 2.0 * static_cast<double>(config.k * config.k);

  for (std::size_t p = 0; p < config.num_phases; ++p) {
    PhaseRecord rec;
    rec.begin = static_cast<Time>(p) * length + 1;
    rec.end = rec.begin + length - 1;
    rec.eta_upper_bound =
        per_phase_eta + (p + 1 == config.num_phases ? final_allowance : 0.0);
    for (Time t = rec.begin; t <= rec.end; ++t) {
      const double err =
          std::abs(trace.prediction_at(t) - static_cast<double>(trace.arrival_at(t)));
      rec.eta += err;
      if (trace.page_at(t) == spare) rec.eta_spare_page += err;
    }
    for (const auto& e : result.alg.evictions) {
      if (e.t >= rec.begin && e.t <= rec.end) ++rec.alg_cost;
    }
    for (const auto& e : opt.evictions) {
      if (e.t >= rec.begin && e.t <= rec.end) ++rec.opt_cost;
    }
    result.eta += rec.eta;
    result.phases.push_back(rec);
  }
  return result;
}

BoundRecord certify_lower_bound(const AdversaryResult& result) {
  const auto phases = static_cast<double>(result.config.num_phases);
  const auto opt_upper = static_cast<double>(result.opt_upper_bound());
  const double gap = phases * (static_cast<double>(result.config.j) - 1.0);
  auto record = make_record(BoundId::lower_bound_thm4, opt_upper + gap,
                            static_cast<double>(result.alg.cost), 0.0);
  if (static_cast<double>(result.opt_cost) > opt_upper) record.verdict = Verdict::fail;
  return record;
}

}  // namespace lacache
