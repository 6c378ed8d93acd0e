#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "irsmec/channel.hpp"
#include "irsmec/latency_model.hpp"
#include "irsmec/reflect.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

enum class ReflectScheme { Sdr, Sca, None };

std::string to_string(ReflectScheme scheme);
/// Accepts "sdr", "sca", "none" (case-insensitive).
std::optional<ReflectScheme> parse_reflect_scheme(const std::string& name);

/// One inner alternation (detector step then reflect step, repeated).
struct InnerTrace {
  std::vector<double> t_sequence;  // max edge latency: initial, then after every step
  std::vector<ScaStep> sca_steps;
  std::vector<SdrTrace> sdr;
  int iterations = 0;
  int mud_rejections = 0;  // detector updates discarded by the incumbent guard
  int solver_failures = 0;
};

struct OuterRecord {
  int l4 = 0;
  double t_step2 = 0.0;    // overall latency after the compute allocation
  double t_step3 = 0.0;    // max edge latency after the inner alternation
  double objective = 0.0;  // overall latency after the inner alternation
  double eps4 = 0.0;
  ReflectScheme scheme = ReflectScheme::None;
  int inner_iterations = 0;
  double wall_ms = 0.0;
};

struct RunTrace {
  std::vector<OuterRecord> outer;
  std::vector<InnerTrace> inner;
  bool converged = false;  // stopped by the eps4 test rather than the cap

  /// Columns l4,t_step2,t_step3,eps4,scheme,wall_ms; wall_ms written as 0 when deterministic.
  std::string to_csv(bool deterministic = false) const;
};

struct InnerResult {
  double t = 0.0;  // max edge latency
  MudMatrix w;
  PhaseVector theta;
  InnerTrace trace;
};

InnerResult inner_alternate(const ChannelSet& channels, const ComputePlan& plan,
                            const ScenarioConfig& cfg, ReflectScheme scheme,
                            const PhaseVector& theta_init, const MudMatrix& w_init,
                            std::mt19937_64& rng);

struct BcdOptions {
  /// Fixed starting phases; uniform random when absent.
  std::optional<PhaseVector> theta_init;
  /// Seed of the run's generator (initial phases, randomization); cfg.seed when absent.
  std::optional<std::uint64_t> seed;
};

struct BcdResult {
  ComputePlan plan;
  MudMatrix w;
  PhaseVector theta;
  LatencyReport report;
  RunTrace trace;
};

BcdResult run_bcd(const ChannelSet& channels, const ScenarioConfig& cfg, ReflectScheme scheme,
                  const BcdOptions& options = {});

}  // namespace irsmec
