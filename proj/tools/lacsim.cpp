// lacsim: trace-driven experiments for caching with next-arrival predictions.
//
//   lacsim run       --config exp.json [--trace f] [--k 4 ...] [--policy lru ...]
//                    [--seed s] [--epsilon e] [--out results.csv]
//   lacsim generate  --workload zipf:alpha=1,universe=100,length=1000
//                    [--noise additive_uniform:w=4] [--seed s] --out trace.csv
//   lacsim adversary --k 5 --j 4 --phases 20 --policy ftl [--trace-out adv.csv]
//
// Exit codes: 0 ok, 1 configuration or parse error, 2 I/O error, 3 a bound
// listed under "fatal" failed.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lacache/adversary.hpp"
#include "lacache/errors.hpp"
#include "lacache/experiment.hpp"
#include "lacache/registry.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitFatalBound = 3;

struct RunArgs {
  std::string config;
  std::string trace;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> k;
  std::vector<std::string> policies;
  std::optional<double> epsilon;
  std::vector<std::string> fatal;
};

int run_command(const RunArgs& args) {
  lacache::ExperimentConfig cfg;
  if (!args.config.empty()) {
    cfg = lacache::load_experiment_config(args.config);
  } else {
    cfg.policies = {lacache::PolicyKind::belady, lacache::PolicyKind::blind_oracle,
                    lacache::PolicyKind::lru, lacache::PolicyKind::ftl};
  }
  if (!args.trace.empty()) cfg.traces = {lacache::TraceSource{args.trace, std::nullopt}};
  if (!args.out.empty()) cfg.output = args.out;
  if (args.seed) cfg.seeds = {*args.seed};
  if (!args.k.empty()) cfg.k_values = args.k;
  if (!args.policies.empty()) {
    cfg.policies.clear();
    for (const auto& p : args.policies) cfg.policies.push_back(lacache::parse_policy_kind(p));
  }
  if (args.epsilon) cfg.epsilon = *args.epsilon;
  for (const auto& f : args.fatal) cfg.fatal.push_back(lacache::parse_bound_id(f));

  const auto rows = lacache::run_experiment(cfg);
  if (cfg.output.empty() || cfg.output == "-") {
    std::cout << lacache::format_csv(rows);
  } else {
    lacache::emit_csv(rows, cfg.output);
  }
  return lacache::has_fatal_failure(rows, cfg.fatal) ? kExitFatalBound : 0;
}

int generate_command(const std::string& workload, const std::string& noise,
                     std::uint64_t seed, const std::string& out) {
  const auto spec = lacache::parse_workload_spec(workload);
  auto trace = lacache::make_workload_trace(spec, seed);
  if (!noise.empty()) {
    trace = trace.with_predictions(lacache::perturb_predictions(
        trace.arrivals(), lacache::parse_noise_spec(noise), lacache::derive_seed(seed, 1)));
  }
  if (out.empty() || out == "-") {
    std::cout << lacache::write_trace(trace);
  } else {
    lacache::write_trace_file(trace, out);
  }
  return 0;
}

int adversary_command(std::size_t k, std::size_t j, std::size_t phases,
                      const std::string& policy, const std::string& trace_out,
                      bool fatal) {
  const auto kind = lacache::parse_policy_kind(policy);
  const lacache::AdversaryConfig config{k, j, phases};
  const auto result = lacache::run_adversary(
      [&] { return lacache::make_policy(kind, lacache::PolicyOptions{k}); }, config);
  if (!trace_out.empty()) lacache::write_trace_file(result.trace, trace_out);

  std::cout << "phase,begin,end,alg_cost,opt_cost,eta,eta_spare_page,eta_upper_bound\n";
  for (std::size_t p = 0; p < result.phases.size(); ++p) {
    const auto& r = result.phases[p];
    std::cout << p + 1 << ',' << r.begin << ',' << r.end << ',' << r.alg_cost << ','
              << r.opt_cost << ',' << lacache::format_double(r.eta) << ','
              << lacache::format_double(r.eta_spare_page) << ','
              << lacache::format_double(r.eta_upper_bound) << '\n';
  }
  const auto cert = lacache::certify_lower_bound(result);
  const bool ok = cert.verdict == lacache::Verdict::pass;
  std::cerr << "policy=" << policy << " alg=" << result.alg.cost << " opt=" << result.opt_cost
            << " eta=" << lacache::format_double(result.eta) << " certificate="
            << (ok ? "pass" : "fail") << " (need alg >= "
            << lacache::format_double(cert.lhs) << ")\n";
  return fatal && !ok ? kExitFatalBound : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven simulator for caching with next-arrival predictions"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment sweep and write results CSV");
  run->add_option("--config", run_args.config, "JSON experiment config");
  run->add_option("--trace", run_args.trace, "Trace CSV (overrides config trace sources)");
  run->add_option("--out", run_args.out, "Results CSV path ('-' for stdout)");
  run->add_option("--seed", run_args.seed, "Single seed (overrides config seeds)");
  run->add_option("--k", run_args.k, "Cache size; repeatable");
  run->add_option("--policy", run_args.policies,
                  "belady|blind_oracle|lru|marker|ftl|mw; repeatable");
  run->add_option("--epsilon", run_args.epsilon, "mw parameter, 0 < epsilon < 1/4");
  run->add_option("--fatal", run_args.fatal, "Bound id whose failure exits with 3");

  std::string workload, noise, gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("generate", "Generate a synthetic trace file");
  gen->add_option("--workload", workload, "e.g. zipf:alpha=1,universe=100,length=1000")
      ->required();
  gen->add_option("--noise", noise, "e.g. additive_uniform:w=4 (default: perfect)");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "Trace CSV path ('-' for stdout)");

  std::size_t adv_k = 5, adv_j = 1, adv_phases = 10;
  std::string adv_policy = "ftl", adv_trace_out;
  bool adv_fatal = false;
  auto* adv = app.add_subcommand("adversary", "Run the adaptive lower-bound adversary");
  adv->add_option("--k", adv_k, "Cache size");
  adv->add_option("--j", adv_j, "Severity, 0 <= j < k");
  adv->add_option("--phases", adv_phases, "Number of phases");
  adv->add_option("--policy", adv_policy, "lru|blind_oracle|ftl");
  adv->add_option("--trace-out", adv_trace_out, "Write the generated trace here");
  adv->add_flag("--fatal", adv_fatal, "Exit with 3 if the certificate fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return run_command(run_args);
    if (*gen) return generate_command(workload, noise, gen_seed, gen_out);
    if (*adv) {
      return adversary_command(adv_k, adv_j, adv_phases, adv_policy, adv_trace_out, adv_fatal);
    }
  } catch (const lacache::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const lacache::ParseError& e) {
    std::cerr << "trace parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lacache::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lacache::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
