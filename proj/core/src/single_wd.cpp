#include "irsmec/single_wd.hpp"

#include <cmath>

#include "irsmec/compute_alloc.hpp"
#include "irsmec/errors.hpp"

namespace irsmec {

namespace {

void require_single(const ScenarioConfig& cfg) {
  if (cfg.num_wds != 1) throw ConfigError("num_wds", "single-WD solver requires exactly one WD");
}

}  // namespace

std::int64_t single_offload(double rate_bps, const ScenarioConfig& cfg) {
  require_single(cfg);
  return optimal_offload(rate_bps, cfg.edge_cpu_total_hz, cfg, 0).bits;
}

CVector mrc_detector(const ChannelSet& channels, const PhaseVector& theta) {
  const CVector h = effective_channel(channels, theta, 0);
  const double n = h.norm();
  return n > 0.0 ? CVector(h / n) : h;
}

PhaseVector aligned_phases(const ChannelSet& channels, const CVector& w) {
  const int in = channels.dims().reflect_dim();
  const double ref = std::arg(w.dot(channels.direct().col(0)));
  const CVector wg = channels.cascade().adjoint() * w;  // conj of (w^H G)
  Eigen::VectorXd angles(in);
  for (int n = 0; n < in; ++n) {
    angles(n) = ref - std::arg(std::conj(wg(n)) * channels.reflect()(n, 0));
  }
  return PhaseVector(std::move(angles));
}

SingleWdResult solve_single(const ChannelSet& channels, const ScenarioConfig& cfg) {
  return solve_single(channels, cfg, PhaseVector::zeros(channels.dims().reflect_dim()));
}

SingleWdResult solve_single(const ChannelSet& channels, const ScenarioConfig& cfg,
                            const PhaseVector& theta_init) {
  require_single(cfg);
  SingleWdResult res;
  res.theta = theta_init;
  res.w = mrc_detector(channels, res.theta);
  res.snr = sinr(res.w, channels, res.theta, cfg, 0);
  for (int round = 0; round < cfg.caps.inner; ++round) {
    ++res.rounds;
    if (channels.dims().reflect_dim() > 0) res.theta = aligned_phases(channels, res.w);
    res.w = mrc_detector(channels, res.theta);
    const double snr = sinr(res.w, channels, res.theta, cfg, 0);
    const double change = std::abs(snr - res.snr) / std::max(snr, 1e-300);
    res.snr = snr;
    if (change <= cfg.tolerances.detector) break;
  }
  res.rate_bps = rate(res.snr, cfg);
  res.offload_bits = single_offload(res.rate_bps, cfg);
  res.latency = latency(static_cast<double>(res.offload_bits), cfg.edge_cpu_total_hz,
                        res.rate_bps, cfg, 0);
  return res;
}

}  // namespace irsmec
