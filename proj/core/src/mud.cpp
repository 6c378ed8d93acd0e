#include "irsmec/mud.hpp"

#include <algorithm>
#include <cmath>

#include "irsmec/errors.hpp"

namespace irsmec {

namespace {

constexpr double kBracketOffset = 1e-9;

}  // namespace

DetectorProbe detector_probe(double t, int k, const CMatrix& effective, const ComputePlan& plan,
                             const ScenarioConfig& cfg) {
  DetectorProbe probe;
  const double alpha = sinr_requirement(t, plan, cfg, k);
  if (!std::isfinite(alpha)) {
    probe.status = conic::Status::Infeasible;
    return probe;
  }
  const int mb = static_cast<int>(effective.rows());
  const int num_wds = static_cast<int>(effective.cols());
  const int n = 2 * mb + 1;  // [Re w; Im w; s]
  // Channels scaled so the noise entry is 1.
  const CMatrix h = effective * (std::sqrt(cfg.transmit_power_mw) / std::sqrt(cfg.effective_noise_mw()));
  const double inv_beta = std::sqrt(alpha / (1.0 + alpha));

  conic::ConicProblem p(n);
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(n);
  objective(n - 1) = -1.0;
  p.set_objective(objective);

  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  row.head(2 * mb) = conic::inner_imag_row(h.col(k));
  p.add_equality(row, 0.0);

  conic::SocConstraint sinr;
  sinr.F = Eigen::MatrixXd::Zero(2 * num_wds + 1, n);
  sinr.g = Eigen::VectorXd::Zero(2 * num_wds + 1);
  for (int j = 0; j < num_wds; ++j) {
    sinr.F.row(2 * j).head(2 * mb) = inv_beta * conic::inner_real_row(h.col(j)).transpose();
    sinr.F.row(2 * j + 1).head(2 * mb) = inv_beta * conic::inner_imag_row(h.col(j)).transpose();
  }
  sinr.g(2 * num_wds) = inv_beta;
  sinr.c = Eigen::VectorXd::Zero(n);
  sinr.c.head(2 * mb) = conic::inner_real_row(h.col(k));
  sinr.c(n - 1) = -1.0;
  p.add_soc(std::move(sinr));

  conic::SocConstraint unit;
  unit.F = Eigen::MatrixXd::Zero(2 * mb, n);
  unit.F.leftCols(2 * mb).setIdentity();
  unit.g = Eigen::VectorXd::Zero(2 * mb);
  unit.c = Eigen::VectorXd::Zero(n);
  unit.d = 1.0;
  p.add_soc(std::move(unit));

  const auto out = conic::solve(p, cfg.tolerances.feasibility);
  probe.status = out.status;
  if (out.ok()) {
    probe.margin = out.x(n - 1);
    probe.w = conic::complexify(out.x.head(2 * mb));
  }
  return probe;
}

std::optional<MudMatrix> socp_feasible(double t, const ChannelSet& channels,
                                       const PhaseVector& theta, const ComputePlan& plan,
                                       const ScenarioConfig& cfg) {
  const CMatrix h = effective_channels(channels, theta);
  MudMatrix w = mrc_detectors(h);
  for (int k = 0; k < cfg.num_wds; ++k) {
    if (plan.offload_bits[k] == 0) continue;
    const DetectorProbe probe = detector_probe(t, k, h, plan, cfg);
    if (!probe.feasible()) return std::nullopt;
    w.col(k) = probe.w;
  }
  return w;
}

MudResult optimize_mud(const ChannelSet& channels, const PhaseVector& theta,
                       const ComputePlan& plan, const ScenarioConfig& cfg) {
  if (plan.size() != cfg.num_wds) throw DimensionError("plan", "size must equal K");
  const CMatrix h = effective_channels(channels, theta);
  MudResult result;
  result.w = mrc_detectors(h);
  if (!plan.any_offload()) return result;

  const auto probe_all = [&](double t, MudMatrix& w) {
    ++result.probes;
    for (int k = 0; k < cfg.num_wds; ++k) {
      if (plan.offload_bits[k] == 0) continue;
      const DetectorProbe probe = detector_probe(t, k, h, plan, cfg);
      if (probe.status == conic::Status::NumericalFailure) ++result.solver_failures;
      if (!probe.feasible()) return false;
      w.col(k) = probe.w;
    }
    return true;
  };

  double lo = plan.max_compute_time(cfg) + kBracketOffset;
  double hi = evaluate(plan, result.w, channels, theta, cfg).max_edge_s();
  if (!std::isfinite(hi)) hi = 2.0 * lo + 1.0;
  MudMatrix w_hi = result.w;
  int expansions = 0;
  while (!probe_all(hi, w_hi)) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > cfg.caps.bisection) {
      throw Error("solver", "detector bracket expansion did not find a feasible target");
    }
  }
  for (int step = 0; step < cfg.caps.bisection && hi - lo > cfg.tolerances.detector * hi; ++step) {
    const double mid = 0.5 * (lo + hi);
    MudMatrix w_mid = w_hi;
    if (probe_all(mid, w_mid)) {
      hi = mid;
      w_hi = std::move(w_mid);
    } else {
      lo = mid;
    }
  }
  result.t_bisection = hi;
  result.w = std::move(w_hi);
  result.max_edge_s = evaluate(plan, result.w, channels, theta, cfg).max_edge_s();
  return result;
}

}  // namespace irsmec
