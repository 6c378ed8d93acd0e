#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irsmec/latency_model.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

struct OffloadDecision {
  std::int64_t bits = 0;
  bool forced_local = false;  // R = 0 or f^e = 0
};

/// Continuous balance point L c R f^e / (f^e f^l + c R (f^e + f^l)).
double continuous_offload(double rate_bps, double edge_cpu_hz, const ScenarioConfig& cfg, int k);

/// Integer offload size: floor or ceiling of the balance point, whichever has the smaller
/// latency (ties go to the floor).
OffloadDecision optimal_offload(double rate_bps, double edge_cpu_hz, const ScenarioConfig& cfg,
                                int k);

/// Infinite-edge-CPU latency limit L c / (f^l + c R); targets at or below it are infeasible.
double latency_floor(double rate_bps, const ScenarioConfig& cfg, int k);

/// Smallest f^e >= 0 whose balanced latency is at most t; nullopt when none exists.
std::optional<double> min_edge_cpu(double target_s, double rate_bps, const ScenarioConfig& cfg,
                                   int k);
/// Same quantity from a one-variable LP through the conic solver (cross-check path).
std::optional<double> min_edge_cpu_conic(double target_s, double rate_bps,
                                         const ScenarioConfig& cfg, int k);

struct AllocationStats {
  double t_lo = 0.0;
  double t_hi = 0.0;
  int bisection_steps = 0;
};

/// Joint offload sizes and edge-CPU shares under fixed rates by bisection on t.
/// WDs with zero rate or zero data stay local and receive no edge CPU.
ComputePlan allocate(const std::vector<double>& rates_bps, const ScenarioConfig& cfg,
                     AllocationStats* stats = nullptr);

}  // namespace irsmec
