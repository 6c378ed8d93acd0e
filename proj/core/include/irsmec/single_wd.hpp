#pragma once

#include <cstdint>

#include "irsmec/channel.hpp"
#include "irsmec/latency_model.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

/// Offload size of the only WD when it owns the whole edge CPU.
std::int64_t single_offload(double rate_bps, const ScenarioConfig& cfg);

/// w = h / ||h|| for the effective channel of WD 0.
CVector mrc_detector(const ChannelSet& channels, const PhaseVector& theta);

/// Phases that align every reflected path with w^H h_d:
/// theta_n = arg(w^H h_d) - arg((w^H G)_n h_r,n).
PhaseVector aligned_phases(const ChannelSet& channels, const CVector& w);

struct SingleWdResult {
  std::int64_t offload_bits = 0;
  CVector w;
  PhaseVector theta;
  double snr = 0.0;
  double rate_bps = 0.0;
  LatencyRow latency;
  int rounds = 0;
};

/// Alternates MRC and phase alignment until the SNR settles, then splits the task.
SingleWdResult solve_single(const ChannelSet& channels, const ScenarioConfig& cfg);
SingleWdResult solve_single(const ChannelSet& channels, const ScenarioConfig& cfg,
                            const PhaseVector& theta_init);

}  // namespace irsmec
