// Command-line harness: single solves, parameter sweeps and channel dumps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "irsmec/channel.hpp"
#include "irsmec/errors.hpp"
#include "irsmec/experiment.hpp"
#include "irsmec/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int verbosity = 0;

void log(int level, const std::string& msg) {
  if (verbosity >= level) std::cerr << msg << '\n';
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw irsmec::Error("io", "cannot write '" + path.string() + "'");
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw irsmec::Error("io", "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

irsmec::ScenarioConfig load_config(const std::string& path) {
  if (path.empty()) return irsmec::default_scenario();
  log(1, "config: " + path);
  return irsmec::load_scenario(path);
}

std::vector<irsmec::Scheme> parse_scheme_list(const std::string& text) {
  std::vector<irsmec::Scheme> out;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto s = irsmec::parse_scheme(name);
    if (!s) throw irsmec::ConfigError("scheme", "unknown scheme '" + name + "'");
    out.push_back(*s);
  }
  if (out.empty()) throw irsmec::ConfigError("scheme", "empty scheme list");
  return out;
}

// One JSON line on stderr so wrappers can parse failures.
int report_error(const std::string& code, const std::string& message,
                 const std::string& field = {}) {
  json j = {{"error", {{"code", code}, {"message", message}}}};
  if (!field.empty()) j["error"]["field"] = field;
  std::cerr << j.dump() << std::endl;
  return code == "config" || code == "dimension" ? 2 : 1;
}

struct SolveArgs {
  std::string config;
  std::string channels;
  std::string scheme = "sdr";
  std::optional<std::uint64_t> seed;
  std::string out;
  bool deterministic = false;
};

int run_solve(const SolveArgs& a) {
  const irsmec::ScenarioConfig cfg = load_config(a.config);
  const auto scheme = irsmec::parse_scheme(a.scheme);
  if (!scheme) throw irsmec::ConfigError("scheme", "unknown scheme '" + a.scheme + "'");
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  const irsmec::ChannelSet channels = a.channels.empty()
                                          ? irsmec::synthesize(cfg, seed)
                                          : irsmec::channels_from_json_text(read_file(a.channels));
  log(1, "solving with scheme " + irsmec::to_string(*scheme));
  const irsmec::BcdResult res = irsmec::run_scheme(*scheme, channels, cfg, seed);

  json summary = {{"scheme", irsmec::to_string(*scheme)},
                  {"seed", seed},
                  {"t_ms", res.report.objective_s * 1e3},
                  {"outer_iterations", res.trace.outer.size()},
                  {"converged", res.trace.converged},
                  {"ell_bits", res.plan.offload_bits},
                  {"fe_cycles", res.plan.edge_cpu_hz}};
  json per_wd = json::array();
  for (const auto& r : res.report.rows) {
    per_wd.push_back({{"local_ms", r.local_s * 1e3},
                      {"edge_ms", r.edge_s * 1e3},
                      {"total_ms", r.total_s * 1e3}});
  }
  summary["per_wd"] = std::move(per_wd);
  json theta = json::array();
  for (Eigen::Index n = 0; n < res.theta.angles().size(); ++n) theta.push_back(res.theta.angles()(n));
  summary["theta"] = std::move(theta);

  if (!a.out.empty()) {
    const fs::path dir(a.out);
    write_file(dir / "result.json", summary.dump(2) + "\n");
    write_file(dir / "trace.csv", res.trace.to_csv(a.deterministic));
    log(1, "wrote " + (dir / "result.json").string() + " and trace.csv");
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string sweep;
  std::string schemes;
  int seeds = 0;
  std::string out;
  int threads = 0;
  bool deterministic = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  const irsmec::ScenarioConfig cfg = load_config(a.config);
  irsmec::SweepSpec spec = irsmec::load_sweep_spec(a.sweep);
  if (!a.schemes.empty()) spec.schemes = parse_scheme_list(a.schemes);
  if (a.seeds > 0) spec.seeds = a.seeds;
  spec.validate();
  log(1, "sweep " + irsmec::to_string(spec.parameter) + ": " +
             std::to_string(spec.values.size() * spec.schemes.size() * spec.seeds) + " runs");

  const auto rows = irsmec::run_sweep(spec, cfg, a.threads);
  const std::string csv = irsmec::rows_to_csv(rows, a.deterministic);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    write_file(dir / "sweep.csv", csv);
    write_file(dir / "sweep.jsonl", irsmec::rows_to_jsonl(rows));
    log(1, "wrote " + (dir / "sweep.csv").string());
  } else if (!spec.output.empty()) {
    write_file(spec.output, csv);
    log(1, "wrote " + spec.output);
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency minimization for IRS-aided cell-free edge computing"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr (repeat for more)");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one channel realization");
  solve_cmd->add_option("-c,--config", solve.config, "Scenario JSON (defaults when omitted)");
  solve_cmd->add_option("--channels", solve.channels, "Channel JSON instead of synthesizing");
  solve_cmd->add_option("-s,--scheme", solve.scheme, "sdr, sca, no_irs, no_direct or random_phase");
  solve_cmd->add_option("--seed", solve.seed, "Channel and run seed (config seed by default)");
  solve_cmd->add_option("-o,--out", solve.out, "Directory for result.json and trace.csv");
  solve_cmd->add_flag("--deterministic", solve.deterministic, "Write wall_ms as 0");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("-c,--config", sweep.config, "Base scenario JSON");
  sweep_cmd->add_option("--sweep", sweep.sweep, "Sweep spec JSON")->required();
  sweep_cmd->add_option("-s,--scheme", sweep.schemes, "Comma-separated schemes overriding the spec");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per point overriding the spec");
  sweep_cmd->add_option("-o,--out", sweep.out, "Directory for sweep.csv and sweep.jsonl");
  sweep_cmd->add_option("-j,--threads", sweep.threads, "Worker threads (0 = hardware)");
  sweep_cmd->add_flag("--deterministic", sweep.deterministic, "Write wall_ms as 0");

  std::string dump_config;
  std::uint64_t dump_seed = 0;
  bool dump_seed_set = false;
  std::string dump_out;
  auto* dump_cmd = app.add_subcommand("dump-channels", "Write one channel realization as JSON");
  dump_cmd->add_option("-c,--config", dump_config, "Scenario JSON");
  dump_cmd->add_option("--seed", dump_seed, "Channel seed")->each([&](const std::string&) {
    dump_seed_set = true;
  });
  dump_cmd->add_option("-o,--out", dump_out, "Output file (stdout when omitted)");

  auto* config_cmd = app.add_subcommand("default-config", "Print the default scenario JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*dump_cmd) {
      const irsmec::ScenarioConfig cfg = load_config(dump_config);
      const auto text =
          irsmec::channels_to_json_text(irsmec::synthesize(cfg, dump_seed_set ? dump_seed : cfg.seed));
      if (dump_out.empty()) std::cout << text << '\n';
      else write_file(dump_out, text + "\n");
      return 0;
    }
    if (*config_cmd) {
      std::cout << irsmec::scenario_to_json_text(irsmec::default_scenario()) << '\n';
      return 0;
    }
  } catch (const irsmec::ConfigError& e) {
    return report_error(e.code(), e.what(), e.field());
  } catch (const irsmec::DimensionError& e) {
    return report_error(e.code(), e.what(), e.block());
  } catch (const irsmec::Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
