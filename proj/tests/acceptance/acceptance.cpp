// Acceptance suite: one PASS/FAIL line per criterion on stdout, details on
// stderr. Exits 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lacache/adversary.hpp"
#include "lacache/combine.hpp"
#include "lacache/metrics.hpp"
#include "lacache/registry.hpp"
#include "oracles.hpp"

using namespace lacache;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double as_double(std::size_t v) { return static_cast<double>(v); }

// ---------------------------------------------------------------------------
// Shared corpus: base traces across workload families and cache sizes, each
// paired with every prediction model.

struct Predictor {
  std::string name;
  std::function<std::vector<double>(const Trace&, std::uint64_t)> make;
};

Predictor from_noise(const std::string& name, NoiseSpec spec) {
  return {name, [spec](const Trace& t, std::uint64_t seed) {
            return perturb_predictions(t.arrivals(), spec, seed);
          }};
}

// h = n + 2 - y: the predicted order of every pair is the reverse of the truth.
std::vector<double> reversed_predictions(const Trace& t, std::uint64_t) {
  std::vector<double> h(t.size());
  const auto top = static_cast<double>(t.size()) + 2.0;
  for (std::size_t i = 0; i < t.size(); ++i) h[i] = top - static_cast<double>(t.arrivals()[i]);
  return h;
}

const std::vector<Predictor>& predictors() {
  static const std::vector<Predictor> all{
      from_noise("perfect", {}),
      from_noise("additive_uniform:w=1", {.kind = NoiseKind::additive_uniform, .width = 1}),
      from_noise("additive_uniform:w=10", {.kind = NoiseKind::additive_uniform, .width = 10}),
      from_noise("additive_uniform:w=100", {.kind = NoiseKind::additive_uniform, .width = 100}),
      from_noise("additive_gaussian:s=20", {.kind = NoiseKind::additive_gaussian, .scale = 20}),
      from_noise("lognormal_scale:s=1", {.kind = NoiseKind::lognormal_scale, .scale = 1}),
      from_noise("constant_shift:c=7", {.kind = NoiseKind::constant_shift, .shift = 7}),
      from_noise("constant_shift:c=-7", {.kind = NoiseKind::constant_shift, .shift = -7}),
      from_noise("random_replace:p=0.3",
                 {.kind = NoiseKind::random_replace, .probability = 0.3, .range = 1000}),
      from_noise("random_replace:p=1",
                 {.kind = NoiseKind::random_replace, .probability = 1.0, .range = 1000}),
      {"reversed", reversed_predictions},
  };
  return all;
}

struct BaseTrace {
  Trace trace;
  std::size_t k;
  std::size_t opt;
};

const std::vector<BaseTrace>& corpus() {
  static const std::vector<BaseTrace> traces = [] {
    std::vector<BaseTrace> out;
    Rng rng(2024);
    const WorkloadKind kinds[] = {WorkloadKind::uniform, WorkloadKind::zipf,
                                  WorkloadKind::cyclic, WorkloadKind::phased};
    for (int i = 0; i < 400; ++i) {
      const std::size_t k = 2 + rng.uniform_below(15);
      WorkloadSpec spec;
      spec.kind = kinds[i % 4];
      spec.universe_size = k + 1 + rng.uniform_below(4 * k);
      spec.length = 50 + rng.uniform_below(1500);
      spec.alpha = rng.uniform(0.5, 1.5);
      spec.cycle = std::min(spec.universe_size, k + 1 + rng.uniform_below(3));
      spec.working_set = std::min(spec.universe_size, k - 1 + rng.uniform_below(4));
      spec.phase_length = 20 + rng.uniform_below(200);
      auto trace = make_workload_trace(spec, rng.next());
      const auto opt = optimal_cost(trace, k);
      out.push_back({std::move(trace), k, opt});
    }
    return out;
  }();
  return traces;
}

// Visits every (base trace, predictor) pair.
template <typename Fn>
void for_each_instance(Fn&& fn) {
  std::uint64_t seed = 1;
  for (const auto& base : corpus()) {
    for (const auto& p : predictors()) {
      const auto trace = base.trace.with_predictions(p.make(base.trace, seed++));
      fn(base, p, trace);
    }
  }
}

// ---------------------------------------------------------------------------

Outcome perfect_prediction_optimality() {
  Rng rng(1);
  std::size_t traces = 0;
  std::size_t mismatches = 0;
  for (int i = 0; i < 1200; ++i) {
    const std::size_t k = 2 + rng.uniform_below(9);
    const WorkloadSpec spec{.kind = i % 2 ? WorkloadKind::zipf : WorkloadKind::uniform,
                            .universe_size = 1 + rng.uniform_below(5 * k),
                            .length = 1 + rng.uniform_below(500),
                            .alpha = rng.uniform(0.3, 1.6)};
    const auto trace = make_workload_trace(spec, rng.next());
    ++traces;
    const auto bo = run_policy(PolicyKind::blind_oracle, trace, k).cost;
    const auto opt = optimal_cost(trace, k);
    if (bo != opt) {
      ++mismatches;
      std::cerr << "  criterion 1: " << workload_id(spec) << " k=" << k << " bo=" << bo
                << " opt=" << opt << '\n';
    }
  }
  return {mismatches == 0, std::to_string(traces) + " traces (uniform, zipf; k 2..10; n <= 500), " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome blind_oracle_bounds(bool additive) {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = -1e300;  // max of lhs - rhs
  for_each_instance([&](const BaseTrace& base, const Predictor& p, const Trace& trace) {
    if (!additive && base.k < 2) return;
    const double bo = as_double(run_policy(PolicyKind::blind_oracle, trace, base.k).cost);
    const double eta = ell1_loss(trace.arrivals(), trace.predictions());
    const double opt = as_double(base.opt);
    const double k = as_double(base.k);
    const double rhs = additive ? opt + 2.0 * eta : 2.0 * opt + 4.0 * eta / (k - 1.0) + k;
    ++checked;
    worst = std::max(worst, bo - rhs);
    if (bo > rhs) {
      ++failures;
      std::cerr << "  criterion " << (additive ? 2 : 3) << ": " << p.name << " k=" << base.k
                << " bo=" << bo << " rhs=" << rhs << '\n';
    }
  });
  return {failures == 0, std::to_string(corpus().size()) + " traces x " +
                             std::to_string(predictors().size()) + " prediction models (" +
                             std::to_string(checked) + " runs), " +
                             std::to_string(failures) + " violations, max(lhs - rhs) = " +
                             fmt(worst)};
}

Outcome inversions_vs_loss() {
  Rng rng(4);
  std::size_t instances = 0;
  std::size_t failures = 0;
  for (int i = 0; i < 12000; ++i) {
    const std::size_t universe = 1 + rng.uniform_below(30);
    const WorkloadSpec spec{.kind = i % 2 ? WorkloadKind::zipf : WorkloadKind::uniform,
                            .universe_size = universe,
                            .length = 1 + rng.uniform_below(400)};
    const auto base = make_workload_trace(spec, rng.next());
    const auto& p = predictors()[static_cast<std::size_t>(i) % predictors().size()];
    const auto trace = base.with_predictions(p.make(base, rng.next()));
    const double eta = ell1_loss(trace.arrivals(), trace.predictions());
    const auto m = count_inversions_fast(trace.arrivals(), trace.predictions());
    ++instances;
    if (as_double(m) / 2.0 > eta) {
      ++failures;
      std::cerr << "  criterion 4: " << p.name << " M=" << m << " eta=" << eta << '\n';
    }
  }
  return {failures == 0, std::to_string(instances) + " instances, " + std::to_string(failures) +
                             " with M/2 > eta"};
}

Outcome inversion_oracle() {
  std::size_t instances = 0;
  std::size_t mismatches = 0;
  auto check = [&](std::span<const Time> y, std::span<const double> h) {
    ++instances;
    if (count_inversions_fast(y, h) != count_inversions_naive(y, h)) ++mismatches;
  };

  // Every trace of length <= 8 over {a, b, c}, each paired with every
  // distinct permutation of its true arrivals as predictions.
  Rng rng(5);
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    std::vector<PageId> req(n);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= 3) req[i] = PageId{static_cast<std::uint32_t>(c % 3)};
      const auto y = oracle::naive_next_arrivals(req);
      std::vector<double> h(y.begin(), y.end());
      std::sort(h.begin(), h.end());
      do {
        check(y, h);
      } while (std::next_permutation(h.begin(), h.end()));
    }
  }
  const auto exhaustive = instances;

  for (int i = 0; i < 10000; ++i) {
    const auto n = 1 + rng.uniform_below(200);
    const auto range = 1 + rng.uniform_below(60);
    std::vector<Time> y(n);
    std::vector<double> h(n);
    for (std::size_t t = 0; t < n; ++t) {
      y[t] = static_cast<Time>(1 + rng.uniform_below(range));
      h[t] = rng.bernoulli(0.5) ? static_cast<double>(rng.uniform_below(range + 1))
                                : rng.uniform(0.0, static_cast<double>(range));
    }
    check(y, h);
  }
  return {mismatches == 0, std::to_string(exhaustive) + " exhaustive + " +
                               std::to_string(instances - exhaustive) + " random instances, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome belady_oracle() {
  // Canonical traces (pages numbered in order of first appearance) cover every
  // trace up to renaming, and both Belady and the optimum are invariant under
  // renaming.
  std::size_t traces = 0;
  std::size_t mismatches = 0;
  auto check = [&](std::span<const PageId> req) {
    std::vector<std::string> names{"a", "b", "c", "d", "e"};
    const Trace trace(names, std::vector<PageId>(req.begin(), req.end()),
                      std::vector<double>(req.size(), 0.0));
    for (std::size_t k = 1; k <= 4; ++k) {
      ++traces;
      if (optimal_cost(trace, k) != oracle::brute_force_opt(req, k)) ++mismatches;
    }
  };

  std::vector<PageId> req;
  std::function<void(std::uint32_t, std::size_t)> extend = [&](std::uint32_t used,
                                                               std::size_t max_n) {
    if (!req.empty()) check(req);
    if (req.size() == max_n) return;
    for (std::uint32_t p = 0; p <= std::min(used, 4U); ++p) {
      req.push_back(PageId{p});
      extend(std::max(used, p + 1), max_n);
      req.pop_back();
    }
  };
  extend(0, 12);
  return {mismatches == 0, std::to_string(traces) +
                               " (trace, k) pairs: every canonical trace with n <= 12, "
                               "universe <= 5, k 1..4; " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome ftl_combiner() {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst = -1e300;
  for_each_instance([&](const BaseTrace& base, const Predictor& p, const Trace& trace) {
    const double ftl = as_double(run_policy(PolicyKind::ftl, trace, base.k).cost);
    const double bo = as_double(run_policy(PolicyKind::blind_oracle, trace, base.k).cost);
    const double lru = as_double(run_policy(PolicyKind::lru, trace, base.k).cost);
    const double rhs = 2.0 * std::min(bo, lru) + 2.0 * as_double(base.k);
    ++checked;
    worst = std::max(worst, ftl - 2.0 * std::min(bo, lru));
    if (ftl > rhs) {
      ++failures;
      std::cerr << "  criterion 7: " << p.name << " k=" << base.k << " ftl=" << ftl
                << " bo=" << bo << " lru=" << lru << '\n';
    }
  });
  return {failures == 0, std::to_string(checked) + " runs incl. random_replace:p=1 and "
                             "reversed predictions, " + std::to_string(failures) +
                             " violations, max(FTL - 2 min) = " + fmt(worst)};
}

Outcome mw_combiner() {
  constexpr int kSeeds = 100;
  std::vector<std::pair<std::string, Trace>> traces;
  std::vector<std::size_t> ks;
  Rng rng(8);
  const WorkloadKind kinds[] = {WorkloadKind::uniform, WorkloadKind::zipf, WorkloadKind::phased,
                                WorkloadKind::cyclic};
  const std::size_t pick[] = {0, 3, 6, 9, 10};  // perfect, w=100, shift, p=1, reversed
  for (std::size_t k : {2, 5, 10}) {
    for (auto kind : kinds) {
      const WorkloadSpec spec{.kind = kind, .universe_size = 3 * k, .length = 1000,
                              .cycle = k + 1, .working_set = k + 1, .phase_length = 100};
      const auto base = make_workload_trace(spec, rng.next());
      for (auto idx : pick) {
        const auto& p = predictors()[idx];
        traces.emplace_back(workload_id(spec) + "/" + p.name,
                            base.with_predictions(p.make(base, rng.next())));
        ks.push_back(k);
      }
    }
  }

  bool pass = true;
  std::string summary = std::to_string(traces.size()) + " traces x " + std::to_string(kSeeds) +
                        " seeds; empirical constant c (mean <= (1+e) min + c k/e):";
  for (double eps : {0.05, 0.1, 0.2}) {
    double worst_c = -1e300;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto& trace = traces[i].second;
      const auto k = ks[i];
      double mw_total = 0.0;
      double marker_total = 0.0;
      for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        mw_total += as_double(run_policy(PolicyKind::mw, trace, k, seed, eps).cost);
        marker_total += as_double(run_policy(PolicyKind::marker, trace, k, derive_seed(seed, 1)).cost);
      }
      const double mw = mw_total / kSeeds;
      const double marker = marker_total / kSeeds;
      const double bo = as_double(run_policy(PolicyKind::blind_oracle, trace, k).cost);
      const double base = (1.0 + eps) * std::min(bo, marker);
      const double kk = as_double(k);
      worst_c = std::max(worst_c, (mw - base) * eps / kk);
      if (mw > base + 8.0 * kk / eps) {
        ++failures;
        std::cerr << "  criterion 8: eps=" << eps << " " << traces[i].first << " k=" << k
                  << " mw=" << mw << " bo=" << bo << " marker=" << marker << '\n';
      }
    }
    pass = pass && failures == 0;
    summary += " e=" + fmt(eps) + ": c=" + fmt(worst_c) + ", " + std::to_string(failures) +
               " violations;";
  }
  summary.pop_back();
  return {pass, summary};
}

Outcome adversary_construction() {
  std::size_t configs = 0;
  std::size_t phases = 0;
  std::size_t cost_bad = 0;
  std::size_t opt_bad = 0;
  std::size_t eta_bad = 0;
  std::size_t eta_p_bad = 0;
  std::size_t cert_bad = 0;
  for (auto kind : {PolicyKind::lru, PolicyKind::blind_oracle, PolicyKind::ftl}) {
    for (std::size_t k : {3, 5, 8}) {
      std::vector<std::size_t> js{1, (k + 1) / 2, k - 1};
      js.erase(std::unique(js.begin(), js.end()), js.end());
      for (auto j : js) {
        const AdversaryConfig config{.k = k, .j = j, .num_phases = 10};
        const auto result = run_adversary(
            [&] { return make_policy(kind, PolicyOptions{.capacity = k}); }, config);
        ++configs;
        std::size_t bad_here = 0;
        double worst_eta = 0.0;
        double worst_spare = 0.0;
        for (const auto& ph : result.phases) {
          ++phases;
          if (!ph.cost_ok(j)) ++cost_bad;
          if (!ph.opt_ok()) ++opt_bad;
          if (!ph.eta_ok()) {
            ++eta_bad;
            ++bad_here;
            if (ph.eta > worst_eta) {
              worst_eta = ph.eta;
              worst_spare = ph.eta_spare_page;
            }
          }
          if (ph.eta - ph.eta_spare_page > ph.eta_upper_bound) ++eta_p_bad;
        }
        if (certify_lower_bound(result).verdict != Verdict::pass) ++cert_bad;
        if (bad_here > 0) {
          std::cerr << "  criterion 9: " << policy_name(kind) << " k=" << k << " j=" << j
                    << ": eta > 2jk in " << bad_here << "/" << result.phases.size()
                    << " phases, worst phase eta " << fmt(worst_eta) << " (bound "
                    << fmt(2.0 * as_double(j * k)) << "), of which " << fmt(worst_spare)
                    << " from spare-page requests\n";
        }
      }
    }
  }
  const bool pass = cost_bad == 0 && opt_bad == 0 && eta_bad == 0;
  const auto ok = [&](std::size_t bad) {
    return std::to_string(phases - bad) + "/" + std::to_string(phases);
  };
  return {pass, std::to_string(configs) + " configs: cost >= j+1 in " + ok(cost_bad) +
                    " phases, OPT <= 2 in " + ok(opt_bad) + ", eta within bound in " +
                    ok(eta_bad) + " (excluding spare-page requests: " + ok(eta_p_bad) +
                    "), certificate failures " + std::to_string(cert_bad)};
}

Outcome robust_baselines() {
  std::size_t lru_checked = 0;
  std::size_t lru_failures = 0;
  for (const auto& base : corpus()) {
    const double lru = as_double(run_policy(PolicyKind::lru, base.trace, base.k).cost);
    ++lru_checked;
    if (lru > as_double(base.k) * as_double(base.opt) + as_double(base.k)) {
      ++lru_failures;
      std::cerr << "  criterion 10: lru k=" << base.k << " cost=" << lru << " opt=" << base.opt
                << '\n';
    }
  }

  constexpr int kSeeds = 200;
  std::size_t marker_checked = 0;
  std::size_t marker_failures = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < corpus().size(); i += 10) {
    const auto& base = corpus()[i];
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      total += as_double(run_policy(PolicyKind::marker, base.trace, base.k, seed).cost);
    }
    const double mean = total / kSeeds;
    const double ratio = 2.0 * harmonic(base.k) - 1.0;
    ++marker_checked;
    if (base.opt > 0) worst_ratio = std::max(worst_ratio, mean / as_double(base.opt) / ratio);
    if (mean > ratio * as_double(base.opt) + as_double(base.k)) {
      ++marker_failures;
      std::cerr << "  criterion 10: marker k=" << base.k << " mean=" << mean
                << " opt=" << base.opt << '\n';
    }
  }
  return {lru_failures == 0 && marker_failures == 0,
          "LRU: " + std::to_string(lru_checked) + " traces, " + std::to_string(lru_failures) +
              " violations; Marker: " + std::to_string(marker_checked) + " traces x " +
              std::to_string(kSeeds) + " seeds, " + std::to_string(marker_failures) +
              " violations, max mean/(OPT (2H_k - 1)) = " + fmt(worst_ratio)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "perfect predictions: BlindOracle = Belady", perfect_prediction_optimality},
      {2, "BlindOracle <= OPT + 2 eta", [] { return blind_oracle_bounds(true); }},
      {3, "BlindOracle <= 2 OPT + 4 eta/(k-1) + k", [] { return blind_oracle_bounds(false); }},
      {4, "eta >= M/2", inversions_vs_loss},
      {5, "fast inversion count = quadratic count", inversion_oracle},
      {6, "Belady = exhaustive optimum", belady_oracle},
      {7, "FTL(BO, LRU) <= 2 min(BO, LRU) + 2k", ftl_combiner},
      {8, "mean MW(BO, Marker) <= (1+e) min + 8k/e", mw_combiner},
      {9, "adaptive adversary per-phase accounting", adversary_construction},
      {10, "LRU <= k OPT + k, mean Marker <= (2H_k - 1) OPT + k", robust_baselines},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const auto outcome = c.run();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title
              << " | " << outcome.summary << " [" << fmt(elapsed.count()) << " s]" << std::endl;
    if (!outcome.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed"
                            : std::to_string(failed) + " of " + std::to_string(criteria.size()) +
                                  " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
