#include "irsmec/latency_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irsmec/errors.hpp"

namespace irsmec {

double ComputePlan::compute_time(const ScenarioConfig& cfg, int k) const {
  if (offload_bits[k] == 0) return 0.0;
  if (!(edge_cpu_hz[k] > 0.0)) return kInfiniteLatency;
  return static_cast<double>(offload_bits[k]) * cfg.cycles_per_bit[k] / edge_cpu_hz[k];
}

double ComputePlan::max_compute_time(const ScenarioConfig& cfg) const {
  double t = 0.0;
  for (int k = 0; k < size(); ++k) t = std::max(t, compute_time(cfg, k));
  return t;
}

bool ComputePlan::any_offload() const {
  return std::any_of(offload_bits.begin(), offload_bits.end(), [](auto l) { return l > 0; });
}

double LatencyReport::max_edge_s() const {
  double t = 0.0;
  for (const auto& r : rows) t = std::max(t, r.edge_s);
  return t;
}

double sinr_effective(const CVector& w, const CMatrix& effective, const ScenarioConfig& cfg,
                      int k) {
  if (w.size() != effective.rows()) {
    throw DimensionError("detector", "expected " + std::to_string(effective.rows()) +
                                         " entries, got " + std::to_string(w.size()));
  }
  if (k < 0 || k >= effective.cols()) throw DimensionError("wd", "index out of range");
  const double norm2 = w.squaredNorm();
  if (norm2 == 0.0) return 0.0;
  const double p = cfg.transmit_power_mw;
  const CVector proj = effective.adjoint() * w;  // entry j is (w^H h_j)^*
  const double signal = p * std::norm(proj(k));
  const double interference = p * (proj.squaredNorm() - std::norm(proj(k)));
  return signal / (std::max(interference, 0.0) + cfg.noise_power_mw * norm2 + cfg.ici_power_mw);
}

double sinr(const CVector& w, const ChannelSet& channels, const PhaseVector& theta,
            const ScenarioConfig& cfg, int k) {
  return sinr_effective(w, effective_channels(channels, theta), cfg, k);
}

double rate(double gamma, const ScenarioConfig& cfg) {
  return cfg.bandwidth_hz * std::log2(1.0 + gamma);
}

std::vector<double> rates(const MudMatrix& w, const ChannelSet& channels, const PhaseVector& theta,
                          const ScenarioConfig& cfg) {
  const CMatrix h = effective_channels(channels, theta);
  if (w.cols() != h.cols()) throw DimensionError("detector", "column count must equal K");
  std::vector<double> out(static_cast<std::size_t>(h.cols()));
  for (int k = 0; k < h.cols(); ++k) out[k] = rate(sinr_effective(w.col(k), h, cfg, k), cfg);
  return out;
}

LatencyRow latency(double offload_bits, double edge_cpu_hz, double rate_bps,
                   const ScenarioConfig& cfg, int k) {
  const double total = static_cast<double>(cfg.data_bits[k]);
  const double c = cfg.cycles_per_bit[k];
  LatencyRow row;
  row.local_s = (total - offload_bits) * c / cfg.local_cpu_hz[k];
  if (offload_bits > 0.0) {
    row.edge_s = (rate_bps > 0.0 && edge_cpu_hz > 0.0)
                     ? offload_bits / rate_bps + offload_bits * c / edge_cpu_hz
                     : kInfiniteLatency;
  }
  row.total_s = std::max(row.local_s, row.edge_s);
  return row;
}

LatencyReport evaluate(const ComputePlan& plan, const std::vector<double>& rates_bps,
                       const ScenarioConfig& cfg) {
  if (plan.size() != cfg.num_wds || static_cast<int>(rates_bps.size()) != cfg.num_wds) {
    throw DimensionError("plan", "size must equal the number of WDs");
  }
  LatencyReport report;
  report.rows.reserve(rates_bps.size());
  for (int k = 0; k < cfg.num_wds; ++k) {
    report.rows.push_back(latency(static_cast<double>(plan.offload_bits[k]), plan.edge_cpu_hz[k],
                                  rates_bps[k], cfg, k));
    report.objective_s = std::max(report.objective_s, report.rows.back().total_s);
  }
  return report;
}

LatencyReport evaluate(const ComputePlan& plan, const MudMatrix& w, const ChannelSet& channels,
                       const PhaseVector& theta, const ScenarioConfig& cfg) {
  return evaluate(plan, rates(w, channels, theta, cfg), cfg);
}

double sinr_requirement(double t, const ComputePlan& plan, const ScenarioConfig& cfg, int k) {
  if (plan.offload_bits[k] == 0) return 0.0;
  const double window = t - plan.compute_time(cfg, k);
  if (!(window > 0.0)) return kInfiniteLatency;
  const double exponent = static_cast<double>(plan.offload_bits[k]) / (cfg.bandwidth_hz * window);
  return std::expm1(exponent * std::numbers::ln2);
}

MudMatrix mrc_detectors(const CMatrix& effective) {
  MudMatrix w = effective;
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    const double n = w.col(k).norm();
    if (n > 0.0) w.col(k) /= n;
  }
  return w;
}

}  // namespace irsmec
