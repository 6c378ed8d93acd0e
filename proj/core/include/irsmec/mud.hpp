#pragma once

#include <optional>

#include "irsmec/channel.hpp"
#include "irsmec/conic.hpp"
#include "irsmec/latency_model.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

/// One per-WD detector SOCP: maximize the margin s of
///   ||[sqrt(P) h_j^H w]_j ; sigma_eff|| sqrt(alpha/(1+alpha)) <= Re(w^H h_k) - s
/// subject to Im(w^H h_k) = 0 and ||w|| <= 1. Feasible for the target iff s >= 0.
struct DetectorProbe {
  conic::Status status = conic::Status::NumericalFailure;
  double margin = 0.0;
  CVector w;

  bool feasible() const { return status == conic::Status::Optimal && margin >= 0.0; }
};

DetectorProbe detector_probe(double t, int k, const CMatrix& effective, const ComputePlan& plan,
                             const ScenarioConfig& cfg);

/// Detectors meeting D^e_k <= t for every offloading WD, or nullopt. WDs with l_k = 0
/// receive unit-norm MRC columns.
std::optional<MudMatrix> socp_feasible(double t, const ChannelSet& channels,
                                       const PhaseVector& theta, const ComputePlan& plan,
                                       const ScenarioConfig& cfg);

struct MudResult {
  double t_bisection = 0.0;   // smallest feasible target found
  double max_edge_s = 0.0;    // max_k D^e_k recomputed from the returned detectors
  MudMatrix w;
  int probes = 0;
  int solver_failures = 0;    // probes treated as infeasible after a numerical failure
};

/// Bisection on t between max_k t_c,k + delta and the MRC latency (doubled until feasible).
MudResult optimize_mud(const ChannelSet& channels, const PhaseVector& theta,
                       const ComputePlan& plan, const ScenarioConfig& cfg);

}  // namespace irsmec
