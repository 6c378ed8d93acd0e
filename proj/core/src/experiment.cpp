#include "irsmec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "irsmec/errors.hpp"
#include "json.hpp"

namespace irsmec {

using nlohmann::json;

namespace {

constexpr std::uint32_t kChannelSeedTag = 200;
constexpr std::uint32_t kRunSeedTag = 201;

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fmt(values[i]);
  }
  return out;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Sdr: return "sdr";
    case Scheme::Sca: return "sca";
    case Scheme::NoIrs: return "no_irs";
    case Scheme::NoDirect: return "no_direct";
    case Scheme::RandomPhase: return "random_phase";
  }
  return "sdr";
}

std::optional<Scheme> parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::Sdr, Scheme::Sca, Scheme::NoIrs, Scheme::NoDirect, Scheme::RandomPhase}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

ChannelSet scheme_channels(Scheme scheme, const ChannelSet& channels) {
  switch (scheme) {
    case Scheme::NoIrs: return channels.without_cascade();
    case Scheme::NoDirect: return channels.without_direct();
    default: return channels;
  }
}

BcdResult run_scheme(Scheme scheme, const ChannelSet& channels, const ScenarioConfig& cfg,
                     std::uint64_t seed) {
  BcdOptions opts;
  opts.seed = seed;
  const ChannelSet used = scheme_channels(scheme, channels);
  switch (scheme) {
    case Scheme::Sdr: return run_bcd(used, cfg, ReflectScheme::Sdr, opts);
    case Scheme::Sca: return run_bcd(used, cfg, ReflectScheme::Sca, opts);
    case Scheme::NoIrs: return run_bcd(used, cfg, ReflectScheme::None, opts);
    case Scheme::NoDirect: return run_bcd(used, cfg, ReflectScheme::Sca, opts);
    case Scheme::RandomPhase: return run_bcd(used, cfg, ReflectScheme::None, opts);
  }
  throw ConfigError("scheme", "unknown scheme");
}

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::WdDistance: return "wd_distance";
    case SweepParameter::EdgeCpu: return "edge_cpu";
    case SweepParameter::TransmitPower: return "transmit_power";
    case SweepParameter::IciRatio: return "ici_ratio";
    case SweepParameter::Iterations: return "iterations";
  }
  return "wd_distance";
}

std::optional<SweepParameter> parse_sweep_parameter(const std::string& name) {
  for (SweepParameter p : {SweepParameter::WdDistance, SweepParameter::EdgeCpu,
                           SweepParameter::TransmitPower, SweepParameter::IciRatio,
                           SweepParameter::Iterations}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, SweepParameter parameter,
                                 double value) {
  ScenarioConfig out = cfg;
  switch (parameter) {
    case SweepParameter::WdDistance: place_wds(out, value); break;
    case SweepParameter::EdgeCpu: out.edge_cpu_total_hz = value; break;
    case SweepParameter::TransmitPower: out.transmit_power_mw = dbm_to_mw(value); break;
    case SweepParameter::IciRatio: out.ici_power_mw = out.noise_power_mw * db_to_linear(value); break;
    case SweepParameter::Iterations:
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw ConfigError("values", "iteration counts must be positive integers");
      }
      out.caps.outer = static_cast<int>(value);
      // Only an exactly repeated objective stops the run before the cap.
      out.tolerances.outer = std::numeric_limits<double>::min();
      break;
  }
  validate(out);
  return out;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("values", "sweep grid is empty");
  if (schemes.empty()) throw ConfigError("schemes", "no schemes selected");
  if (seeds < 1) throw ConfigError("seeds", "must be >= 1");
}

SweepSpec sweep_spec_from_json_text(const std::string& text) {
  SweepSpec spec;
  try {
    const json j = json::parse(text);
    for (const auto& [key, _] : j.items()) {
      static const char* known[] = {"parameter", "values", "schemes", "seeds", "master_seed",
                                    "output"};
      if (std::find_if(std::begin(known), std::end(known),
                       [&](const char* k) { return key == k; }) == std::end(known)) {
        throw ConfigError(key, "unknown sweep key");
      }
    }
    const auto name = j.at("parameter").get<std::string>();
    const auto param = parse_sweep_parameter(name);
    if (!param) throw ConfigError("parameter", "unknown sweep parameter '" + name + "'");
    spec.parameter = *param;
    spec.values = j.at("values").get<std::vector<double>>();
    if (j.contains("schemes")) {
      spec.schemes.clear();
      for (const auto& s : j.at("schemes")) {
        const auto scheme = parse_scheme(s.get<std::string>());
        if (!scheme) throw ConfigError("schemes", "unknown scheme '" + s.get<std::string>() + "'");
        spec.schemes.push_back(*scheme);
      }
    }
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<int>();
    if (j.contains("master_seed")) spec.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output")) spec.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError("sweep", e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("sweep", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return sweep_spec_from_json_text(buf.str());
}

std::uint64_t channel_seed(std::uint64_t master_seed, int seed_index) {
  return block_stream(master_seed, kChannelSeedTag, static_cast<std::uint32_t>(seed_index), 0)();
}

std::uint64_t run_seed(std::uint64_t master_seed, int seed_index) {
  return block_stream(master_seed, kRunSeedTag, static_cast<std::uint32_t>(seed_index), 0)();
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base, int threads) {
  spec.validate();
  struct Task {
    double value;
    Scheme scheme;
    int seed;
  };
  std::vector<Task> tasks;
  for (double v : spec.values) {
    for (Scheme s : spec.schemes) {
      for (int seed = 0; seed < spec.seeds; ++seed) tasks.push_back({v, s, seed});
    }
  }
  // Configurations are built up front so bad values fail before any work starts.
  std::vector<ScenarioConfig> configs;
  for (double v : spec.values) configs.push_back(apply_sweep_value(base, spec.parameter, v));

  std::vector<SweepRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const Task& task = tasks[i];
        const auto value_index = static_cast<std::size_t>(
            std::find(spec.values.begin(), spec.values.end(), task.value) - spec.values.begin());
        const ScenarioConfig& cfg = configs[value_index];
        const std::uint64_t cseed = channel_seed(spec.master_seed, task.seed);
        const ChannelSet channels = synthesize(cfg, cseed);
        const BcdResult res = run_scheme(task.scheme, channels, cfg,
                                         run_seed(spec.master_seed, task.seed));
        SweepRow& row = rows[i];
        row.sweep_param = to_string(spec.parameter);
        row.value = task.value;
        row.scheme = task.scheme;
        row.seed = task.seed;
        row.t_ms = res.report.objective_s * 1e3;
        for (const auto& r : res.report.rows) row.per_wd_latency_ms.push_back(r.total_s * 1e3);
        row.ell_bits = res.plan.offload_bits;
        row.fe_cycles = res.plan.edge_cpu_hz;
        row.iters = static_cast<int>(res.trace.outer.size());
        for (const auto& o : res.trace.outer) row.wall_ms += o.wall_ms;
        row.channel_seed = cseed;
        row.w = res.w;
        row.theta = res.theta;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned count = std::min<unsigned>(threads > 0 ? static_cast<unsigned>(threads) : hw,
                                            static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows, bool deterministic) {
  using detail::format_double;
  std::ostringstream out;
  out << "sweep_param,value,scheme,seed,t_ms,per_wd_latency_ms,ell_bits,fe_cycles,iters,wall_ms\n";
  for (const auto& r : rows) {
    out << r.sweep_param << ',' << format_double(r.value) << ',' << to_string(r.scheme) << ','
        << r.seed << ',' << format_double(r.t_ms) << ','
        << join(r.per_wd_latency_ms, format_double) << ','
        << join(r.ell_bits, [](std::int64_t b) { return std::to_string(b); }) << ','
        << join(r.fe_cycles, format_double) << ',' << r.iters << ','
        << format_double(deterministic ? 0.0 : r.wall_ms) << '\n';
  }
  return out.str();
}

std::string rows_to_jsonl(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    json w = json::array();
    for (Eigen::Index k = 0; k < r.w.cols(); ++k) {
      json col = json::array();
      for (Eigen::Index m = 0; m < r.w.rows(); ++m) col.push_back({r.w(m, k).real(), r.w(m, k).imag()});
      w.push_back(std::move(col));
    }
    json theta = json::array();
    for (Eigen::Index n = 0; n < r.theta.angles().size(); ++n) theta.push_back(r.theta.angles()(n));
    json j = {{"sweep_param", r.sweep_param},
              {"value", r.value},
              {"scheme", to_string(r.scheme)},
              {"seed", r.seed},
              {"channel_seed", r.channel_seed},
              {"t_ms", r.t_ms},
              {"ell_bits", r.ell_bits},
              {"fe_cycles", r.fe_cycles},
              {"w", std::move(w)},
              {"theta", std::move(theta)}};
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace irsmec
