#include "irsmec/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

#include "format.hpp"
#include "irsmec/compute_alloc.hpp"
#include "irsmec/errors.hpp"
#include "irsmec/mud.hpp"

namespace irsmec {

namespace {

constexpr std::uint32_t kRunStreamTag = 100;

double max_edge(const ComputePlan& plan, const MudMatrix& w, const ChannelSet& channels,
                const PhaseVector& theta, const ScenarioConfig& cfg) {
  return evaluate(plan, w, channels, theta, cfg).max_edge_s();
}

}  // namespace

std::string to_string(ReflectScheme scheme) {
  switch (scheme) {
    case ReflectScheme::Sdr: return "sdr";
    case ReflectScheme::Sca: return "sca";
    case ReflectScheme::None: return "none";
  }
  return "none";
}

std::optional<ReflectScheme> parse_reflect_scheme(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "sdr") return ReflectScheme::Sdr;
  if (lower == "sca") return ReflectScheme::Sca;
  if (lower == "none") return ReflectScheme::None;
  return std::nullopt;
}

std::string RunTrace::to_csv(bool deterministic) const {
  std::ostringstream out;
  out << "l4,t_step2,t_step3,eps4,scheme,wall_ms\n";
  for (const auto& r : outer) {
    out << r.l4 << ',' << detail::format_double(r.t_step2) << ','
        << detail::format_double(r.t_step3) << ',' << detail::format_double(r.eps4) << ','
        << to_string(r.scheme) << ',' << detail::format_double(deterministic ? 0.0 : r.wall_ms)
        << '\n';
  }
  return out.str();
}

InnerResult inner_alternate(const ChannelSet& channels, const ComputePlan& plan,
                            const ScenarioConfig& cfg, ReflectScheme scheme,
                            const PhaseVector& theta_init, const MudMatrix& w_init,
                            std::mt19937_64& rng) {
  InnerResult res{0.0, w_init, theta_init, {}};
  double t = max_edge(plan, res.w, channels, res.theta, cfg);
  res.trace.t_sequence.push_back(t);
  if (!plan.any_offload()) {
    res.t = t;
    return res;
  }
  const bool reflect = scheme != ReflectScheme::None && channels.dims().reflect_dim() > 0;
  const double tol = scheme == ReflectScheme::Sca ? cfg.tolerances.reflect : cfg.tolerances.detector;

  for (int it = 0; it < cfg.caps.inner; ++it) {
    const double t_start = t;
    ++res.trace.iterations;

    MudResult mud = optimize_mud(channels, res.theta, plan, cfg);
    res.trace.solver_failures += mud.solver_failures;
    if (mud.max_edge_s <= t) {
      res.w = std::move(mud.w);
      t = mud.max_edge_s;
    } else {
      ++res.trace.mud_rejections;
    }
    res.trace.t_sequence.push_back(t);
    if (!reflect) break;

    ReflectResult step;
    if (scheme == ReflectScheme::Sdr) {
      SdrTrace sdr;
      step = optimize_reflect_sdr(channels, res.w, plan, cfg, res.theta, rng, &sdr);
      res.trace.sdr.push_back(std::move(sdr));
    } else {
      step = optimize_reflect_sca(channels, res.w, plan, cfg, res.theta, &res.trace.sca_steps);
    }
    res.trace.solver_failures += step.solver_failures;
    if (step.improved) {
      const double t_new = max_edge(plan, res.w, channels, step.theta, cfg);
      if (t_new <= t) {
        res.theta = step.theta;
        t = t_new;
      }
    }
    res.trace.t_sequence.push_back(t);
    if (!(t > 0.0) || (t_start - t) / t <= tol) break;
  }
  res.t = t;
  return res;
}

BcdResult run_bcd(const ChannelSet& channels, const ScenarioConfig& cfg, ReflectScheme scheme,
                  const BcdOptions& options) {
  validate(cfg);
  if (channels.dims() != dims_of(cfg)) throw DimensionError("channels", "do not match config");
  using clock = std::chrono::steady_clock;
  auto rng = block_stream(options.seed.value_or(cfg.seed), kRunStreamTag, 0, 0);

  BcdResult out;
  out.theta = options.theta_init ? *options.theta_init
                                 : PhaseVector::uniform_random(cfg.reflect_dim(), rng);
  if (out.theta.size() != cfg.reflect_dim()) throw DimensionError("theta", "length must be IN");
  out.w = mrc_detectors(effective_channels(channels, out.theta));

  double previous = kInfiniteLatency;
  bool have_plan = false;
  for (int l4 = 1; l4 <= cfg.caps.outer; ++l4) {
    const auto start = clock::now();
    OuterRecord rec;
    rec.l4 = l4;
    rec.scheme = scheme;

    const std::vector<double> r = rates(out.w, channels, out.theta, cfg);
    ComputePlan plan = allocate(r, cfg);
    if (have_plan) {
      const double kept = evaluate(out.plan, r, cfg).objective_s;
      if (kept < plan.objective_s) {
        plan = out.plan;
        plan.objective_s = kept;
      }
    }
    out.plan = std::move(plan);
    have_plan = true;
    rec.t_step2 = out.plan.objective_s;

    InnerResult inner = inner_alternate(channels, out.plan, cfg, scheme, out.theta, out.w, rng);
    out.w = std::move(inner.w);
    out.theta = std::move(inner.theta);
    rec.inner_iterations = inner.trace.iterations;
    out.trace.inner.push_back(std::move(inner.trace));

    out.report = evaluate(out.plan, out.w, channels, out.theta, cfg);
    rec.t_step3 = out.report.max_edge_s();
    rec.objective = out.report.objective_s;
    const double change = std::abs(rec.objective - previous);
    if (!std::isfinite(previous)) {
      rec.eps4 = kInfiniteLatency;
    } else {
      rec.eps4 = rec.objective < 1e-9 ? change : change / rec.objective;
    }
    previous = rec.objective;
    rec.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    out.trace.outer.push_back(rec);
    if (rec.eps4 <= cfg.tolerances.outer) {
      out.trace.converged = true;
      break;
    }
  }
  out.plan.objective_s = out.report.objective_s;
  return out;
}

}  // namespace irsmec
