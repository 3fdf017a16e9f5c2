#include "lacache/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "lacache/combine.hpp"
#include "lacache/errors.hpp"
#include "lacache/registry.hpp"

namespace lacache {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

double number_param(const std::map<std::string, std::string>& params,
                    const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  double v = 0.0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("parameter '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

std::size_t count_param(const std::map<std::string, std::string>& params,
                        const std::string& key, std::size_t fallback) {
  const double v = number_param(params, key, static_cast<double>(fallback));
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError("parameter '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

// Splits "kind:key=value,key=value".
std::pair<std::string, std::map<std::string, std::string>> split_spec(
    std::string_view text) {
  const auto colon = text.find(':');
  std::string kind(text.substr(0, colon));
  std::map<std::string, std::string> params;
  if (colon == std::string_view::npos) return {kind, params};
  auto rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("expected key=value in '" + std::string(text) + "'");
    }
    params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return {kind, params};
}

std::map<std::string, std::string> json_params(const json& obj, const char* skip) {
  std::map<std::string, std::string> params;
  for (const auto& [key, value] : obj.items()) {
    if (key == skip) continue;
    if (!value.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
    params[key] = value.dump();
  }
  return params;
}

NoiseSpec make_noise(const std::string& kind, const std::map<std::string, std::string>& p) {
  NoiseSpec n;
  if (kind == "perfect") {
    n.kind = NoiseKind::perfect;
  } else if (kind == "additive_uniform") {
    n.kind = NoiseKind::additive_uniform;
    n.width = number_param(p, "w", 0.0);
  } else if (kind == "additive_gaussian") {
    n.kind = NoiseKind::additive_gaussian;
    n.scale = number_param(p, "s", 0.0);
  } else if (kind == "lognormal_scale") {
    n.kind = NoiseKind::lognormal_scale;
    n.scale = number_param(p, "s", 0.0);
  } else if (kind == "constant_shift") {
    n.kind = NoiseKind::constant_shift;
    n.shift = number_param(p, "c", 0.0);
  } else if (kind == "random_replace") {
    n.kind = NoiseKind::random_replace;
    n.probability = number_param(p, "p", 0.0);
    n.range = number_param(p, "range", 0.0);
  } else {
    throw ConfigError("unknown noise kind '" + kind + "'");
  }
  n.validate();
  return n;
}

WorkloadSpec make_workload(const std::string& kind,
                           const std::map<std::string, std::string>& p) {
  WorkloadSpec w;
  if (kind == "uniform") {
    w.kind = WorkloadKind::uniform;
  } else if (kind == "zipf") {
    w.kind = WorkloadKind::zipf;
  } else if (kind == "cyclic") {
    w.kind = WorkloadKind::cyclic;
  } else if (kind == "phased") {
    w.kind = WorkloadKind::phased;
  } else {
    throw ConfigError("unknown workload kind '" + kind + "'");
  }
  w.universe_size = count_param(p, "universe", 0);
  w.length = count_param(p, "length", 0);
  w.alpha = number_param(p, "alpha", 1.0);
  w.cycle = count_param(p, "m", w.universe_size);
  w.working_set = count_param(p, "m", 1);
  w.phase_length = count_param(p, "phase_len", 1);
  w.validate();
  return w;
}

template <typename T>
std::vector<T> as_list(const json& node, const char* key) {
  try {
    if (node.is_array()) return node.get<std::vector<T>>();
    return {node.get<T>()};
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

NoiseSpec parse_noise_spec(std::string_view text) {
  auto [kind, params] = split_spec(text);
  return make_noise(kind, params);
}

WorkloadSpec parse_workload_spec(std::string_view text) {
  auto [kind, params] = split_spec(text);
  return make_workload(kind, params);
}

std::string TraceSource::id() const {
  if (path) {
    auto stem = std::filesystem::path(*path).filename().string();
    std::replace(stem.begin(), stem.end(), ',', '_');
    return "file:" + stem;
  }
  return workload ? workload_id(*workload) : "none";
}

void ExperimentConfig::validate() const {
  if (policies.empty() && !adversary) throw ConfigError("at least one policy is required");
  if (k_values.empty()) throw ConfigError("at least one k value is required");
  for (auto k : k_values) {
    if (k < 1) throw ConfigError("k values must be >= 1");
  }
  if (!policies.empty() && traces.empty()) throw ConfigError("no trace source given");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::find(policies.begin(), policies.end(), PolicyKind::mw) != policies.end()) {
    validate_epsilon(epsilon);
  }
  for (const auto& t : traces) {
    if (t.path.has_value() == t.workload.has_value()) {
      throw ConfigError("each trace source needs exactly one of 'file' or 'workload'");
    }
  }
  if (adversary) {
    if (adversary->policies.empty()) throw ConfigError("adversary needs policies");
    for (auto p : adversary->policies) {
      if (p == PolicyKind::marker || p == PolicyKind::mw || p == PolicyKind::belady) {
        throw ConfigError("adversary policies must be deterministic online policies");
      }
    }
    for (auto k : adversary->k_values) {
      for (auto j : adversary->j_values) {
        AdversaryConfig{k, j, adversary->num_phases}.validate();
      }
    }
  }
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known{"k",      "trace",  "traces",    "noise",
                                           "policies", "epsilon", "seeds",   "adversary",
                                           "fatal",  "slack",  "threads",   "out"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig cfg;
  cfg.policies.clear();
  if (doc.contains("k")) cfg.k_values = as_list<std::size_t>(doc["k"], "k");

  auto read_source = [](const json& node) {
    if (!node.is_object()) throw ConfigError("trace source must be an object");
    TraceSource src;
    if (node.contains("file")) {
      if (!node["file"].is_string()) throw ConfigError("'file' must be a string");
      src.path = node["file"].get<std::string>();
    } else if (node.contains("workload")) {
      if (!node["workload"].is_string()) throw ConfigError("'workload' must be a string");
      src.workload = make_workload(node["workload"].get<std::string>(),
                                   json_params(node, "workload"));
    } else {
      throw ConfigError("trace source needs 'file' or 'workload'");
    }
    return src;
  };
  if (doc.contains("trace")) cfg.traces.push_back(read_source(doc["trace"]));
  if (doc.contains("traces")) {
    if (!doc["traces"].is_array()) throw ConfigError("'traces' must be an array");
    for (const auto& node : doc["traces"]) cfg.traces.push_back(read_source(node));
  }

  if (doc.contains("noise")) {
    const auto& node = doc["noise"];
    const auto items = node.is_array() ? node : json::array({node});
    for (const auto& item : items) {
      if (item.is_string()) {
        cfg.noise.push_back(parse_noise_spec(item.get<std::string>()));
      } else if (item.is_object() && item.contains("kind") && item["kind"].is_string()) {
        cfg.noise.push_back(make_noise(item["kind"].get<std::string>(), json_params(item, "kind")));
      } else {
        throw ConfigError("bad entry in 'noise'");
      }
    }
  }

  if (doc.contains("policies")) {
    for (const auto& name : as_list<std::string>(doc["policies"], "policies")) {
      cfg.policies.push_back(parse_policy_kind(name));
    }
  }
  if (doc.contains("epsilon")) {
    if (!doc["epsilon"].is_number()) throw ConfigError("'epsilon' must be a number");
    cfg.epsilon = doc["epsilon"].get<double>();
  }
  if (doc.contains("seeds")) {
    const auto& node = doc["seeds"];
    if (node.is_object()) {
      const auto count = node.value("count", std::size_t{1});
      const auto start = node.value("start", std::uint64_t{1});
      cfg.seeds.clear();
      for (std::size_t i = 0; i < count; ++i) cfg.seeds.push_back(start + i);
    } else {
      cfg.seeds = as_list<std::uint64_t>(node, "seeds");
    }
  }
  if (doc.contains("adversary")) {
    const auto& node = doc["adversary"];
    if (!node.is_object()) throw ConfigError("'adversary' must be an object");
    AdversarySweep sweep;
    sweep.k_values = as_list<std::size_t>(node.value("k", json(5)), "adversary.k");
    sweep.j_values = as_list<std::size_t>(node.value("j", json(1)), "adversary.j");
    sweep.num_phases = node.value("phases", std::size_t{10});
    for (const auto& name : as_list<std::string>(
             node.value("policies", json::array({"lru", "blind_oracle", "ftl"})),
             "adversary.policies")) {
      sweep.policies.push_back(parse_policy_kind(name));
    }
    cfg.adversary = sweep;
  }
  if (doc.contains("fatal")) {
    for (const auto& name : as_list<std::string>(doc["fatal"], "fatal")) {
      cfg.fatal.push_back(parse_bound_id(name));
    }
  }
  if (doc.contains("slack")) {
    const auto& s = doc["slack"];
    try {
      cfg.slack.prop1 = s.value("prop1", cfg.slack.prop1);
      cfg.slack.prop2_per_k = s.value("prop2_per_k", cfg.slack.prop2_per_k);
      cfg.slack.ftl_per_k = s.value("ftl_per_k", cfg.slack.ftl_per_k);
      cfg.slack.mw_per_k_over_eps = s.value("mw_per_k_over_eps", cfg.slack.mw_per_k_over_eps);
      cfg.slack.lru_per_k = s.value("lru_per_k", cfg.slack.lru_per_k);
      cfg.slack.marker_per_k = s.value("marker_per_k", cfg.slack.marker_per_k);
    } catch (const json::exception&) {
      throw ConfigError("bad value in 'slack'");
    }
  }
  if (doc.contains("threads")) cfg.threads = as_list<std::size_t>(doc["threads"], "threads").at(0);
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("'out' must be a string");
    cfg.output = doc["out"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Running

namespace {

constexpr std::uint64_t kWorkloadStream = 10;
constexpr std::uint64_t kNoiseStream = 20;

std::vector<BoundId> row_bounds(PolicyKind policy, bool aggregate) {
  std::vector<BoundId> ids{BoundId::lemma1};
  switch (policy) {
    case PolicyKind::blind_oracle:
      ids.insert(ids.end(), {BoundId::thm1_prop1, BoundId::thm1_prop2});
      break;
    case PolicyKind::lru:
      ids.push_back(BoundId::lru_k);
      break;
    case PolicyKind::ftl:
      ids.insert(ids.end(), {BoundId::ftl_thm2, BoundId::cor1_det});
      break;
    case PolicyKind::marker:
      if (aggregate) ids.push_back(BoundId::marker_2hk);
      break;
    case PolicyKind::mw:
      if (aggregate) ids.insert(ids.end(), {BoundId::mw_thm3, BoundId::cor2_rand});
      break;
    case PolicyKind::belady:
      break;
  }
  return ids;
}

std::vector<BoundRecord> select_bounds(const BoundReport& report,
                                       const std::vector<BoundId>& ids) {
  std::vector<BoundRecord> out;
  for (auto id : ids) {
    if (const auto* r = report.find(id)) out.push_back(*r);
  }
  return out;
}

struct Cell {
  std::size_t source = 0;
  std::size_t k = 0;
  std::optional<std::size_t> noise;
  std::uint64_t seed = 0;
};

struct CellResult {
  std::vector<ResultRow> rows;
  std::map<PolicyKind, double> costs;
  double opt = 0.0;
  double eta = 0.0;
  double inversions = 0.0;
};

CellResult run_cell(const ExperimentConfig& cfg, const std::vector<std::optional<Trace>>& files,
                    const Cell& cell) {
  const auto& source = cfg.traces[cell.source];
  Trace trace = source.path ? *files[cell.source]
                            : make_workload_trace(*source.workload,
                                                  derive_seed(cell.seed, kWorkloadStream));
  std::string noise_label = source.path ? "file" : "perfect";
  if (cell.noise) {
    const auto& noise = cfg.noise[*cell.noise];
    trace = trace.with_predictions(perturb_predictions(
        trace.arrivals(), noise, derive_seed(cell.seed, kNoiseStream)));
    noise_label = noise_id(noise);
  }

  std::set<PolicyKind> to_run(cfg.policies.begin(), cfg.policies.end());
  if (to_run.count(PolicyKind::ftl)) to_run.insert({PolicyKind::blind_oracle, PolicyKind::lru});
  if (to_run.count(PolicyKind::mw)) to_run.insert({PolicyKind::blind_oracle, PolicyKind::marker});

  CellResult out;
  out.opt = static_cast<double>(optimal_cost(trace, cell.k));
  const auto summary = summarize_errors(trace, static_cast<std::size_t>(out.opt));
  out.eta = summary.eta;
  out.inversions = static_cast<double>(summary.inversions);

  BoundInputs inputs;
  inputs.opt = out.opt;
  inputs.eta = out.eta;
  inputs.inversions = out.inversions;
  inputs.k = cell.k;
  inputs.epsilon = cfg.epsilon;
  for (auto kind : to_run) {
    const auto result = run_policy(kind, trace, cell.k, cell.seed, cfg.epsilon);
    inputs.costs[kind] = static_cast<double>(result.cost);
  }
  out.costs = inputs.costs;
  const auto report = check_bounds(inputs, cfg.slack);

  for (auto kind : cfg.policies) {
    ResultRow row;
    row.trace_id = source.id();
    row.k = cell.k;
    row.noise_id = noise_label;
    row.seed = cell.seed;
    row.policy = std::string(policy_name(kind));
    row.cost = inputs.costs.at(kind);
    row.opt = out.opt;
    row.eta = out.eta;
    row.inversions = out.inversions;
    row.eps_ratio = summary.eps_ratio;
    row.bounds = select_bounds(report, row_bounds(kind, false));
    out.rows.push_back(std::move(row));
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (auto i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<std::optional<Trace>> files(cfg.traces.size());
  for (std::size_t i = 0; i < cfg.traces.size(); ++i) {
    if (cfg.traces[i].path) files[i] = read_trace_file(*cfg.traces[i].path);
  }

  std::vector<Cell> cells;
  if (!cfg.policies.empty()) {
    for (std::size_t s = 0; s < cfg.traces.size(); ++s) {
      for (auto k : cfg.k_values) {
        std::vector<std::optional<std::size_t>> noises;
        if (cfg.noise.empty()) noises.emplace_back();
        for (std::size_t n = 0; n < cfg.noise.size(); ++n) noises.emplace_back(n);
        for (const auto& n : noises) {
          for (auto seed : cfg.seeds) cells.push_back(Cell{s, k, n, seed});
        }
      }
    }
  }

  std::vector<CellResult> results(cells.size());
  parallel_for(cells.size(), cfg.threads,
               [&](std::size_t i) { results[i] = run_cell(cfg, files, cells[i]); });

  std::vector<ResultRow> rows;
  for (const auto& r : results) rows.insert(rows.end(), r.rows.begin(), r.rows.end());

  // Seed means for randomized policies, one group per (trace, k, noise).
  const bool wants_agg =
      std::any_of(cfg.policies.begin(), cfg.policies.end(), [](PolicyKind p) {
        return p == PolicyKind::marker || p == PolicyKind::mw;
      });
  if (wants_agg) {
    const auto group_size = cfg.seeds.size();
    for (std::size_t g = 0; g < cells.size(); g += group_size) {
      BoundInputs mean;
      mean.k = cells[g].k;
      mean.epsilon = cfg.epsilon;
      for (std::size_t i = g; i < g + group_size; ++i) {
        mean.opt += results[i].opt;
        mean.eta += results[i].eta;
        mean.inversions += results[i].inversions;
        for (const auto& [kind, c] : results[i].costs) mean.costs[kind] += c;
      }
      const auto scale = 1.0 / static_cast<double>(group_size);
      mean.opt *= scale;
      mean.eta *= scale;
      mean.inversions *= scale;
      for (auto& [kind, c] : mean.costs) c *= scale;
      const auto report = check_bounds(mean, cfg.slack);
      const auto& first = results[g].rows.front();
      for (auto kind : cfg.policies) {
        if (kind != PolicyKind::marker && kind != PolicyKind::mw) continue;
        ResultRow row;
        row.trace_id = first.trace_id;
        row.k = first.k;
        row.noise_id = first.noise_id;
        row.policy = std::string(policy_name(kind));
        row.cost = mean.costs.at(kind);
        row.opt = mean.opt;
        row.eta = mean.eta;
        row.inversions = mean.inversions;
        if (mean.opt > 0.0) row.eps_ratio = mean.eta / mean.opt;
        row.bounds = select_bounds(report, row_bounds(kind, true));
        rows.push_back(std::move(row));
      }
    }
  }

  if (cfg.adversary) {
    const auto& sweep = *cfg.adversary;
    for (auto k : sweep.k_values) {
      for (auto j : sweep.j_values) {
        const AdversaryConfig ac{k, j, sweep.num_phases};
        for (auto kind : sweep.policies) {
          const auto result = run_adversary(
              [&] { return make_policy(kind, PolicyOptions{k, 0, cfg.epsilon}); }, ac);
          const auto summary = summarize_errors(result.trace, result.opt_cost);
          ResultRow row;
          row.trace_id = "adversary(k" + std::to_string(k) + ";j" + std::to_string(j) +
                         ";x" + std::to_string(sweep.num_phases) + ")";
          row.k = k;
          row.noise_id = "adaptive";
          row.seed = 0;
          row.policy = std::string(policy_name(kind));
          row.cost = static_cast<double>(result.alg.cost);
          row.opt = static_cast<double>(result.opt_cost);
          row.eta = summary.eta;
          row.inversions = static_cast<double>(summary.inversions);
          row.eps_ratio = summary.eps_ratio;
          row.bounds.push_back(make_record(BoundId::lemma1, row.inversions / 2.0, row.eta, 0.0));
          row.bounds.push_back(certify_lower_bound(result));
          rows.push_back(std::move(row));
        }
      }
    }
  }

  sort_rows(rows);
  return rows;
}

bool has_fatal_failure(const std::vector<ResultRow>& rows,
                       const std::vector<BoundId>& fatal) {
  for (const auto& row : rows) {
    for (const auto& b : row.bounds) {
      if (b.verdict == Verdict::fail &&
          std::find(fatal.begin(), fatal.end(), b.id) != fatal.end()) {
        return true;
      }
    }
  }
  return false;
}

void sort_rows(std::vector<ResultRow>& rows) {
  auto key = [](const ResultRow& r) {
    // Aggregate rows sort after every numeric seed.
    return std::make_tuple(std::cref(r.trace_id), r.k, std::cref(r.noise_id),
                           !r.seed.has_value(), r.seed.value_or(0), std::cref(r.policy));
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "trace_id,k,noise_id,seed,policy,cost,opt,eta,inversions,eps_ratio,bounds_passed,"
      "bounds_failed\n";
  auto join = [](const std::vector<BoundRecord>& bounds, Verdict v) {
    std::string s;
    for (const auto& b : bounds) {
      if (b.verdict != v) continue;
      if (!s.empty()) s += ';';
      s += bound_name(b.id);
    }
    return s;
  };
  for (const auto& r : rows) {
    out += r.trace_id + ',' + std::to_string(r.k) + ',' + r.noise_id + ',' +
           (r.seed ? std::to_string(*r.seed) : std::string("agg")) + ',' + r.policy + ',' +
           format_double(r.cost) + ',' + format_double(r.opt) + ',' + format_double(r.eta) +
           ',' + format_double(r.inversions) + ',' +
           (r.eps_ratio ? format_double(*r.eps_ratio) : std::string("undef")) + ',' +
           join(r.bounds, Verdict::pass) + ',' + join(r.bounds, Verdict::fail) + '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_csv(rows);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace lacache
