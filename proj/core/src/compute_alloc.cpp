#include "irsmec/compute_alloc.hpp"

#include <algorithm>
#include <cmath>

#include "irsmec/conic.hpp"
#include "irsmec/errors.hpp"

namespace irsmec {

namespace {

void check_wd(const ScenarioConfig& cfg, int k) {
  if (k < 0 || k >= cfg.num_wds) throw DimensionError("wd", "index out of range");
}

// Coefficients of the balanced-latency constraint a f^e <= b at target t.
struct CpuConstraint {
  double a;
  double b;
};

CpuConstraint cpu_constraint(double t, double rate, const ScenarioConfig& cfg, int k) {
  const double l = static_cast<double>(cfg.data_bits[k]);
  const double c = cfg.cycles_per_bit[k];
  const double fl = cfg.local_cpu_hz[k];
  return {l * c - t * (fl + c * rate), t * c * rate * fl - l * c * c * rate};
}

}  // namespace

double continuous_offload(double rate_bps, double edge_cpu_hz, const ScenarioConfig& cfg, int k) {
  check_wd(cfg, k);
  if (!(rate_bps > 0.0) || !(edge_cpu_hz > 0.0)) return 0.0;
  const double l = static_cast<double>(cfg.data_bits[k]);
  const double c = cfg.cycles_per_bit[k];
  const double fl = cfg.local_cpu_hz[k];
  const double fe = edge_cpu_hz;
  const double r = rate_bps;
  return l * c * r * fe / (fe * fl + c * r * (fe + fl));
}

OffloadDecision optimal_offload(double rate_bps, double edge_cpu_hz, const ScenarioConfig& cfg,
                                int k) {
  check_wd(cfg, k);
  if (!(rate_bps > 0.0) || !(edge_cpu_hz > 0.0)) return {0, true};
  const double cont = continuous_offload(rate_bps, edge_cpu_hz, cfg, k);
  const auto lo = static_cast<std::int64_t>(std::floor(cont));
  const auto hi = std::min<std::int64_t>(static_cast<std::int64_t>(std::ceil(cont)),
                                         cfg.data_bits[k]);
  const double d_lo = latency(static_cast<double>(lo), edge_cpu_hz, rate_bps, cfg, k).total_s;
  const double d_hi = latency(static_cast<double>(hi), edge_cpu_hz, rate_bps, cfg, k).total_s;
  return {d_hi < d_lo ? hi : lo, false};
}

double latency_floor(double rate_bps, const ScenarioConfig& cfg, int k) {
  check_wd(cfg, k);
  const double l = static_cast<double>(cfg.data_bits[k]);
  const double c = cfg.cycles_per_bit[k];
  return l * c / (cfg.local_cpu_hz[k] + c * std::max(rate_bps, 0.0));
}

std::optional<double> min_edge_cpu(double target_s, double rate_bps, const ScenarioConfig& cfg,
                                   int k) {
  check_wd(cfg, k);
  const auto [a, b] = cpu_constraint(target_s, rate_bps, cfg, k);
  if (b >= 0.0) return 0.0;
  if (a < 0.0) return b / a;
  return std::nullopt;
}

std::optional<double> min_edge_cpu_conic(double target_s, double rate_bps,
                                         const ScenarioConfig& cfg, int k) {
  check_wd(cfg, k);
  const auto [a, b] = cpu_constraint(target_s, rate_bps, cfg, k);
  // Normalize by f_total so the LP is well scaled.
  const double scale = cfg.edge_cpu_total_hz;
  conic::ConicProblem lp(1);
  lp.set_objective(Eigen::VectorXd::Ones(1));
  const double norm = std::max(std::abs(a * scale), std::abs(b));
  lp.add_inequality(Eigen::VectorXd::Constant(1, a * scale / norm), b / norm);
  lp.add_inequality(Eigen::VectorXd::Constant(1, -1.0), 0.0);
  const auto out = conic::solve(lp);
  if (out.status == conic::Status::Infeasible) return std::nullopt;
  if (!out.ok()) throw Error("solver", "edge-CPU LP: " + conic::to_string(out.status));
  return out.x(0) * scale;
}

ComputePlan allocate(const std::vector<double>& rates_bps, const ScenarioConfig& cfg,
                     AllocationStats* stats) {
  const int n = cfg.num_wds;
  if (static_cast<int>(rates_bps.size()) != n) {
    throw DimensionError("rates", "size must equal the number of WDs");
  }
  std::vector<bool> active(n);
  double t_hi = 0.0;
  double t_lo = 0.0;
  for (int k = 0; k < n; ++k) {
    active[k] = rates_bps[k] > 0.0 && cfg.data_bits[k] > 0;
    const double local = cfg.all_local_latency(k);
    t_hi = std::max(t_hi, local);
    t_lo = std::max(t_lo, active[k] ? latency_floor(rates_bps[k], cfg, k) : local);
  }

  const auto demand = [&](double t, std::vector<double>* shares) -> std::optional<double> {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      double f = 0.0;
      if (active[k]) {
        const auto need = min_edge_cpu(t, rates_bps[k], cfg, k);
        if (!need) return std::nullopt;
        f = *need;
      } else if (cfg.all_local_latency(k) > t) {
        return std::nullopt;
      }
      if (shares) (*shares)[k] = f;
      total += f;
    }
    return total;
  };

  int steps = 0;
  while (t_hi - t_lo > cfg.tolerances.allocation * t_hi && steps < cfg.caps.bisection) {
    const double mid = 0.5 * (t_lo + t_hi);
    const auto need = demand(mid, nullptr);
    if (need && *need <= cfg.edge_cpu_total_hz) {
      t_hi = mid;
    } else {
      t_lo = mid;
    }
    ++steps;
  }
  if (stats) *stats = {t_lo, t_hi, steps};

  std::vector<double> shares(n, 0.0);
  const double used = demand(t_hi, &shares).value_or(0.0);
  // Shaved so rounding in the proportional split cannot push the sum past f_total.
  const double leftover = (cfg.edge_cpu_total_hz - used) * (1.0 - 1e-12);
  if (leftover > 0.0) {
    const int num_active = static_cast<int>(std::count(active.begin(), active.end(), true));
    for (int k = 0; k < n; ++k) {
      if (!active[k]) continue;
      shares[k] += used > 0.0 ? leftover * shares[k] / used : leftover / num_active;
    }
  }

  ComputePlan plan;
  plan.offload_bits.assign(n, 0);
  plan.edge_cpu_hz = shares;
  for (int k = 0; k < n; ++k) {
    if (active[k]) plan.offload_bits[k] = optimal_offload(rates_bps[k], shares[k], cfg, k).bits;
  }
  plan.objective_s = evaluate(plan, rates_bps, cfg).objective_s;
  return plan;
}

}  // namespace irsmec
