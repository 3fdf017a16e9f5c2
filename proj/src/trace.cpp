#include "lacache/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lacache/errors.hpp"
#include "lacache/rng.hpp"

namespace lacache {

std::vector<Time> next_arrivals(std::span<const PageId> requests) {
  const auto n = static_cast<Time>(requests.size());
  std::vector<Time> arrivals(requests.size());
  std::unordered_map<std::uint32_t, Time> next_seen;
  next_seen.reserve(requests.size());
  for (Time t = n; t >= 1; --t) {
    const auto page = requests[static_cast<std::size_t>(t - 1)].value;
    auto [it, inserted] = next_seen.try_emplace(page, n + 1);
    arrivals[static_cast<std::size_t>(t - 1)] = it->second;
    it->second = t;
  }
  return arrivals;
}

Trace::Trace(std::vector<std::string> names, std::vector<PageId> requests,
             std::vector<double> predictions)
    : names_(std::move(names)),
      requests_(std::move(requests)),
      predictions_(std::move(predictions)) {
  if (requests_.empty()) throw ConfigError("trace must contain at least one request");
  if (predictions_.size() != requests_.size()) {
    throw ConfigError("trace has " + std::to_string(requests_.size()) +
                      " requests but " + std::to_string(predictions_.size()) +
                      " predictions");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw ConfigError("page ids must be non-empty");
    if (!seen.insert(name).second) throw ConfigError("duplicate page id '" + name + "'");
  }
  for (const auto page : requests_) {
    if (page.value >= names_.size()) throw ConfigError("request refers to unknown page");
  }
  for (const double h : predictions_) {
    if (!std::isfinite(h) || h < 0.0) {
      throw ConfigError("predictions must be finite and non-negative");
    }
  }
  arrivals_ = next_arrivals(requests_);
}

Trace Trace::from_tokens(std::span<const std::string> tokens,
                         std::vector<double> predictions) {
  std::vector<std::string> names;
  std::vector<PageId> requests;
  requests.reserve(tokens.size());
  std::unordered_map<std::string, std::uint32_t> index;
  for (const auto& token : tokens) {
    auto [it, inserted] =
        index.try_emplace(token, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(token);
    requests.push_back(PageId{it->second});
  }
  return Trace(std::move(names), std::move(requests), std::move(predictions));
}

Trace Trace::with_predictions(std::vector<double> predictions) const {
  return Trace(names_, requests_, std::move(predictions));
}

// ---------------------------------------------------------------------------

void WorkloadSpec::validate() const {
  if (universe_size < 1) throw ConfigError("workload universe_size must be >= 1");
  if (length < 1) throw ConfigError("workload length must be >= 1");
  switch (kind) {
    case WorkloadKind::uniform:
      break;
    case WorkloadKind::zipf:
      if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("zipf alpha must be > 0");
      }
      break;
    case WorkloadKind::cyclic:
      if (cycle < 1 || cycle > universe_size) {
        throw ConfigError("cyclic period must be in [1, universe_size]");
      }
      break;
    case WorkloadKind::phased:
      if (working_set < 1 || working_set > universe_size) {
        throw ConfigError("phased working_set must be in [1, universe_size]");
      }
      if (phase_length < 1) throw ConfigError("phased phase_length must be >= 1");
      break;
  }
}

std::vector<PageId> generate_workload(const WorkloadSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<PageId> out;
  out.reserve(spec.length);
  const auto universe = static_cast<std::uint64_t>(spec.universe_size);

  switch (spec.kind) {
    case WorkloadKind::uniform:
      for (std::size_t i = 0; i < spec.length; ++i) {
        out.push_back(PageId{static_cast<std::uint32_t>(rng.uniform_below(universe))});
      }
      break;

    case WorkloadKind::zipf: {
      std::vector<double> cdf(spec.universe_size);
      double total = 0.0;
      for (std::size_t r = 0; r < spec.universe_size; ++r) {
        total += std::pow(static_cast<double>(r + 1), -spec.alpha);
        cdf[r] = total;
      }
      for (std::size_t i = 0; i < spec.length; ++i) {
        const double u = rng.uniform01() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out.push_back(PageId{static_cast<std::uint32_t>(it - cdf.begin())});
      }
      break;
    }

    case WorkloadKind::cyclic:
      for (std::size_t i = 0; i < spec.length; ++i) {
        out.push_back(PageId{static_cast<std::uint32_t>(i % spec.cycle)});
      }
      break;

    case WorkloadKind::phased: {
      std::vector<std::uint32_t> pool(spec.universe_size);
      std::iota(pool.begin(), pool.end(), 0U);
      for (std::size_t i = 0; i < spec.length; ++i) {
        if (i % spec.phase_length == 0) {
          // Partial Fisher-Yates: the first working_set slots become the phase's pages.
          for (std::size_t s = 0; s < spec.working_set; ++s) {
            const auto pick = s + rng.uniform_below(universe - s);
            std::swap(pool[s], pool[pick]);
          }
        }
        out.push_back(PageId{pool[rng.uniform_below(spec.working_set)]});
      }
      break;
    }
  }
  return out;
}

Trace make_workload_trace(const WorkloadSpec& spec, std::uint64_t seed) {
  auto requests = generate_workload(spec, seed);
  std::vector<std::string> names(spec.universe_size);
  for (std::size_t i = 0; i < names.size(); ++i) names[i] = "p" + std::to_string(i + 1);
  const auto arrivals = next_arrivals(requests);
  std::vector<double> predictions(arrivals.begin(), arrivals.end());
  return Trace(std::move(names), std::move(requests), std::move(predictions));
}

std::string workload_id(const WorkloadSpec& spec) {
  std::string id;
  switch (spec.kind) {
    case WorkloadKind::uniform:
      id = "uniform";
      break;
    case WorkloadKind::zipf:
      id = "zipf(" + format_double(spec.alpha) + ")";
      break;
    case WorkloadKind::cyclic:
      id = "cyclic(" + std::to_string(spec.cycle) + ")";
      break;
    case WorkloadKind::phased:
      id = "phased(" + std::to_string(spec.working_set) + ";" +
           std::to_string(spec.phase_length) + ")";
      break;
  }
  return id + "/u" + std::to_string(spec.universe_size) + "/n" +
         std::to_string(spec.length);
}

// ---------------------------------------------------------------------------

void NoiseSpec::validate() const {
  auto finite_nonneg = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(std::string("noise parameter ") + what +
                        " must be finite and >= 0");
    }
  };
  switch (kind) {
    case NoiseKind::perfect:
      break;
    case NoiseKind::additive_uniform:
      finite_nonneg(width, "w");
      break;
    case NoiseKind::additive_gaussian:
    case NoiseKind::lognormal_scale:
      finite_nonneg(scale, "s");
      break;
    case NoiseKind::constant_shift:
      if (!std::isfinite(shift)) throw ConfigError("noise parameter c must be finite");
      break;
    case NoiseKind::random_replace:
      if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ConfigError("noise parameter p must be in [0, 1]");
      }
      finite_nonneg(range, "range");
      break;
  }
}

std::vector<double> perturb_predictions(std::span<const Time> arrivals,
                                        const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(arrivals.size());
  for (const Time y_time : arrivals) {
    const auto y = static_cast<double>(y_time);
    double h = y;
    switch (noise.kind) {
      case NoiseKind::perfect:
        break;
      case NoiseKind::additive_uniform:
        h = y + rng.uniform(-noise.width, noise.width);
        break;
      case NoiseKind::additive_gaussian:
        h = y + noise.scale * rng.normal();
        break;
      case NoiseKind::lognormal_scale:
        h = y * std::exp(noise.scale * rng.normal());
        break;
      case NoiseKind::constant_shift:
        h = y + noise.shift;
        break;
      case NoiseKind::random_replace:
        if (rng.bernoulli(noise.probability)) h = rng.uniform(0.0, noise.range);
        break;
    }
    if (!std::isfinite(h)) h = y;
    out.push_back(std::max(h, 0.0));
  }
  return out;
}

std::string noise_id(const NoiseSpec& noise) {
  switch (noise.kind) {
    case NoiseKind::perfect:
      return "perfect";
    case NoiseKind::additive_uniform:
      return "additive_uniform(" + format_double(noise.width) + ")";
    case NoiseKind::additive_gaussian:
      return "additive_gaussian(" + format_double(noise.scale) + ")";
    case NoiseKind::lognormal_scale:
      return "lognormal_scale(" + format_double(noise.scale) + ")";
    case NoiseKind::constant_shift:
      return "constant_shift(" + format_double(noise.shift) + ")";
    case NoiseKind::random_replace:
      return "random_replace(" + format_double(noise.probability) + ";" +
             format_double(noise.range) + ")";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

constexpr std::string_view kHeader = "t,page,h";

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Trace parse_trace(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<double> predictions;
  std::size_t line_no = 0;
  bool saw_header = false;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!saw_header) {
      if (line != kHeader) throw ParseError(line_no, "expected header 't,page,h'");
      saw_header = true;
      continue;
    }
    if (line.empty()) {
      if (text.empty()) break;  // trailing newline
      throw ParseError(line_no, "empty line");
    }

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 3 comma-separated fields");
    }
    const auto t_text = line.substr(0, c1);
    const auto page = line.substr(c1 + 1, c2 - c1 - 1);
    const auto h_text = line.substr(c2 + 1);

    std::int64_t t = 0;
    if (!parse_number(t_text, t)) throw ParseError(line_no, "non-integer t");
    const auto expected = static_cast<std::int64_t>(tokens.size()) + 1;
    if (t != expected) {
      throw ParseError(line_no, "expected t = " + std::to_string(expected));
    }
    if (page.empty()) throw ParseError(line_no, "empty page id");
    double h = 0.0;
    if (!parse_number(h_text, h) || !std::isfinite(h)) {
      throw ParseError(line_no, "non-numeric prediction");
    }
    if (h < 0.0) throw ParseError(line_no, "negative prediction");

    tokens.emplace_back(page);
    predictions.push_back(h);
  }

  if (!saw_header) throw ParseError(1, "missing header");
  if (tokens.empty()) throw ParseError(1, "empty trace");
  return Trace::from_tokens(tokens, std::move(predictions));
}

std::string write_trace(const Trace& trace) {
  std::string out(kHeader);
  out += '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& name = trace.name(trace.requests()[i]);
    if (name.find_first_of(",\r\n") != std::string::npos) {
      throw ConfigError("page id '" + name + "' cannot be written to a trace file");
    }
    out += std::to_string(i + 1);
    out += ',';
    out += name;
    out += ',';
    out += format_double(trace.predictions()[i]);
    out += '\n';
  }
  return out;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void write_trace_file(const Trace& trace, const std::string& path) {
  const auto text = write_trace(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace lacache
