#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "irsmec/channel.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

inline constexpr double kInfiniteLatency = std::numeric_limits<double>::infinity();

/// Detection matrix W (MB x K); column k is w_k.
using MudMatrix = CMatrix;

/// Offload sizes and edge-CPU shares for every WD.
struct ComputePlan {
  std::vector<std::int64_t> offload_bits;  // l_k, 0 <= l_k <= L_k
  std::vector<double> edge_cpu_hz;         // f^e_k, sum <= f_total
  double objective_s = kInfiniteLatency;   // max_k D_k under the rates used to build the plan

  int size() const { return static_cast<int>(offload_bits.size()); }
  /// Edge processing time l_k c_k / f^e_k (0 when nothing is offloaded).
  double compute_time(const ScenarioConfig& cfg, int k) const;
  double max_compute_time(const ScenarioConfig& cfg) const;
  bool any_offload() const;
};

struct LatencyRow {
  double local_s = 0.0;
  double edge_s = 0.0;
  double total_s = 0.0;
};

struct LatencyReport {
  std::vector<LatencyRow> rows;
  double objective_s = 0.0;  // max_k D_k

  double max_edge_s() const;
};

/// Per-WD SINR with noise sigma^2 ||w||^2 + sigma_ICI^2; zero detector gives 0.
double sinr(const CVector& w, const ChannelSet& channels, const PhaseVector& theta,
            const ScenarioConfig& cfg, int k);
/// Same, from precomputed effective channels (MB x K).
double sinr_effective(const CVector& w, const CMatrix& effective, const ScenarioConfig& cfg, int k);

/// W_bw log2(1 + gamma).
double rate(double gamma, const ScenarioConfig& cfg);

/// Rates of every WD under detectors W and phases theta.
std::vector<double> rates(const MudMatrix& w, const ChannelSet& channels, const PhaseVector& theta,
                          const ScenarioConfig& cfg);

/// Local, edge and total latency of WD k. l > 0 with R = 0 or f^e = 0 is infinite.
LatencyRow latency(double offload_bits, double edge_cpu_hz, double rate_bps,
                   const ScenarioConfig& cfg, int k);

LatencyReport evaluate(const ComputePlan& plan, const std::vector<double>& rates_bps,
                       const ScenarioConfig& cfg);
LatencyReport evaluate(const ComputePlan& plan, const MudMatrix& w, const ChannelSet& channels,
                       const PhaseVector& theta, const ScenarioConfig& cfg);

/// SINR needed for D^e_k <= t: 2^(l_k / (W_bw (t - t_c,k))) - 1. Zero when l_k = 0,
/// infinite when t <= t_c,k.
double sinr_requirement(double t, const ComputePlan& plan, const ScenarioConfig& cfg, int k);

/// Normalized MRC detectors w_k = h_k / ||h_k|| (zero columns stay zero).
MudMatrix mrc_detectors(const CMatrix& effective);

}  // namespace irsmec
