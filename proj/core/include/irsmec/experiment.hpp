#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irsmec/channel.hpp"
#include "irsmec/orchestrator.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

/// Optimized schemes and the three baselines.
enum class Scheme { Sdr, Sca, NoIrs, NoDirect, RandomPhase };

std::string to_string(Scheme scheme);
/// "sdr", "sca", "no_irs", "no_direct", "random_phase".
std::optional<Scheme> parse_scheme(const std::string& name);

/// Channel set the scheme actually optimizes over (cascade or direct links removed).
ChannelSet scheme_channels(Scheme scheme, const ChannelSet& channels);

/// Full solve of one scheme on one channel realization.
BcdResult run_scheme(Scheme scheme, const ChannelSet& channels, const ScenarioConfig& cfg,
                     std::uint64_t run_seed);

enum class SweepParameter { WdDistance, EdgeCpu, TransmitPower, IciRatio, Iterations };

std::string to_string(SweepParameter parameter);
std::optional<SweepParameter> parse_sweep_parameter(const std::string& name);

/// Copy of cfg with one swept value applied. Units: m, cycles/s, dBm, dB (ICI-to-noise
/// ratio), outer-iteration count.
ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, SweepParameter parameter,
                                 double value);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::WdDistance;
  std::vector<double> values;
  std::vector<Scheme> schemes{Scheme::Sdr};
  int seeds = 1;
  std::uint64_t master_seed = 1;
  std::string output;  // CSV path; empty means stdout

  /// Throws ConfigError on an empty grid, no schemes or seeds < 1.
  void validate() const;
};

SweepSpec sweep_spec_from_json_text(const std::string& text);
SweepSpec load_sweep_spec(const std::string& path);

/// Seeds shared by every scheme and sweep value of one seed index, so comparisons are paired.
std::uint64_t channel_seed(std::uint64_t master_seed, int seed_index);
std::uint64_t run_seed(std::uint64_t master_seed, int seed_index);

struct SweepRow {
  std::string sweep_param;
  double value = 0.0;
  Scheme scheme = Scheme::Sdr;
  int seed = 0;
  double t_ms = 0.0;
  std::vector<double> per_wd_latency_ms;
  std::vector<std::int64_t> ell_bits;
  std::vector<double> fe_cycles;
  int iters = 0;
  double wall_ms = 0.0;

  // Solution, kept for re-derivation.
  std::uint64_t channel_seed = 0;
  MudMatrix w;
  PhaseVector theta;
};

/// One row per (value, scheme, seed) in that nesting order. threads = 0 picks the hardware
/// concurrency.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                int threads = 0);

/// Header sweep_param,value,scheme,seed,t_ms,per_wd_latency_ms,ell_bits,fe_cycles,iters,wall_ms;
/// per-WD lists joined by ';'. wall_ms is written as 0 when deterministic.
std::string rows_to_csv(const std::vector<SweepRow>& rows, bool deterministic = false);

/// One JSON object per row with the channel seed, l, f^e, W and theta.
std::string rows_to_jsonl(const std::vector<SweepRow>& rows);

}  // namespace irsmec
