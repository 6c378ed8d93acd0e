#include "irsmec/reflect.hpp"

#include <algorithm>
#include <cmath>

#include "irsmec/errors.hpp"

namespace irsmec {

namespace {

constexpr double kBracketOffset = 1e-9;
constexpr double kRankOneRatio = 1e-6;
constexpr int kBacktrackSteps = 8;

// Unit-modulus v from a homogeneous vector [v; x_last].
CVector dehomogenize(const CVector& xi) {
  const auto n = xi.size() - 1;
  const double ref = std::arg(xi(n));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = xi(i) == Complex(0.0) ? Complex(1.0) : std::polar(1.0, std::arg(xi(i)) - ref);
  }
  return v;
}

CVector project_unit(const CVector& v, const CVector& fallback) {
  CVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    out(i) = m > 1e-12 ? v(i) / m : fallback(i);
  }
  return out;
}

}  // namespace

QuadraticForms::QuadraticForms(int num_wds, int dim)
    : num_wds_(num_wds), dim_(dim),
      a_(static_cast<std::size_t>(num_wds) * num_wds, CVector::Zero(dim)),
      d_(static_cast<std::size_t>(num_wds) * num_wds, Complex(0.0)),
      noise_(static_cast<std::size_t>(num_wds), 0.0) {}

CMatrix QuadraticForms::c(int k, int j) const { return a(k, j) * a(k, j).adjoint(); }

CVector QuadraticForms::u(int k, int j) const { return a(k, j) * d(k, j); }

CMatrix QuadraticForms::lifted(int k, int j) const {
  CMatrix r = CMatrix::Zero(dim_ + 1, dim_ + 1);
  r.topLeftCorner(dim_, dim_) = c(k, j);
  const CVector uu = u(k, j);
  r.topRightCorner(dim_, 1) = uu;
  r.bottomLeftCorner(1, dim_) = uu.adjoint();
  return r;
}

double QuadraticForms::power(const CVector& v, int k, int j) const {
  return std::norm(a(k, j).dot(v) + d(k, j));
}

double QuadraticForms::sinr(const CVector& v, int k) const {
  double interference = 0.0;
  for (int j = 0; j < num_wds_; ++j) {
    if (j != k) interference += power(v, k, j);
  }
  const double den = interference + noise_[k];
  return den > 0.0 ? power(v, k, k) / den : 0.0;
}

void QuadraticForms::set(int k, int j, CVector a, Complex d) {
  if (a.size() != dim_) throw DimensionError("forms", "a has the wrong length");
  a_[index(k, j)] = std::move(a);
  d_[index(k, j)] = d;
}

QuadraticForms build_forms(const ChannelSet& channels, const MudMatrix& w,
                           const ScenarioConfig& cfg) {
  const auto& dims = channels.dims();
  if (w.rows() != dims.receive_dim() || w.cols() != dims.num_wds) {
    throw DimensionError("detector", "W must be MB x K");
  }
  const double sp = std::sqrt(cfg.transmit_power_mw);
  QuadraticForms forms(dims.num_wds, dims.reflect_dim());
  for (int k = 0; k < dims.num_wds; ++k) {
    const CVector ghw = channels.cascade().adjoint() * w.col(k);
    for (int j = 0; j < dims.num_wds; ++j) {
      forms.set(k, j, sp * channels.reflect().col(j).conjugate().cwiseProduct(ghw),
                sp * w.col(k).dot(channels.direct().col(j)));
    }
    forms.set_noise(k, cfg.noise_power_mw * w.col(k).squaredNorm() + cfg.ici_power_mw);
  }
  return forms;
}

std::vector<double> edge_latencies(const CVector& v, const QuadraticForms& forms,
                                   const ComputePlan& plan, const ScenarioConfig& cfg) {
  std::vector<double> out(static_cast<std::size_t>(forms.num_wds()), 0.0);
  for (int k = 0; k < forms.num_wds(); ++k) {
    if (plan.offload_bits[k] == 0) continue;
    out[k] = latency(static_cast<double>(plan.offload_bits[k]), plan.edge_cpu_hz[k],
                     rate(forms.sinr(v, k), cfg), cfg, k)
                 .edge_s;
  }
  return out;
}

double max_edge_latency(const CVector& v, const QuadraticForms& forms, const ComputePlan& plan,
                        const ScenarioConfig& cfg) {
  const auto d = edge_latencies(v, forms, plan, cfg);
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

double f_value(const CVector& v, const QuadraticForms& forms, double t, const ComputePlan& plan,
               const ScenarioConfig& cfg, int k) {
  const double alpha = sinr_requirement(t, plan, cfg, k);
  double interference = 0.0;
  for (int j = 0; j < forms.num_wds(); ++j) {
    if (j != k) interference += forms.power(v, k, j);
  }
  return alpha * (interference + forms.noise(k)) - forms.power(v, k, k);
}

double f_upper(const CVector& v, const CVector& v_prev, const QuadraticForms& forms, double t,
               const ComputePlan& plan, const ScenarioConfig& cfg, int k) {
  const double alpha = sinr_requirement(t, plan, cfg, k);
  double interference = 0.0;
  for (int j = 0; j < forms.num_wds(); ++j) {
    if (j != k) interference += forms.power(v, k, j);
  }
  const CVector g = forms.a(k, k) * (forms.a(k, k).dot(v_prev) + forms.d(k, k));
  const double tangent = forms.power(v_prev, k, k) + 2.0 * g.dot(v - v_prev).real();
  return alpha * (interference + forms.noise(k)) - tangent;
}

Eigen::VectorXd f_upper_gradient(const CVector& v, const CVector& v_prev,
                                 const QuadraticForms& forms, double t, const ComputePlan& plan,
                                 const ScenarioConfig& cfg, int k) {
  const double alpha = sinr_requirement(t, plan, cfg, k);
  CVector grad = CVector::Zero(forms.dim());
  for (int j = 0; j < forms.num_wds(); ++j) {
    if (j != k) grad += alpha * forms.a(k, j) * (forms.a(k, j).dot(v) + forms.d(k, j));
  }
  grad -= forms.a(k, k) * (forms.a(k, k).dot(v_prev) + forms.d(k, k));
  return 2.0 * conic::realify(grad);
}

SdrProbe sdr_feasible(double t, const QuadraticForms& forms, const ComputePlan& plan,
                      const ScenarioConfig& cfg) {
  SdrProbe probe;
  probe.t = t;
  const int n = forms.dim() + 1;
  std::vector<int> wds;
  std::vector<CMatrix> q_mat;
  std::vector<double> q_const;
  for (int k = 0; k < forms.num_wds(); ++k) {
    if (plan.offload_bits[k] == 0) continue;
    const double alpha = sinr_requirement(t, plan, cfg, k);
    if (!std::isfinite(alpha)) {
      probe.status = conic::Status::Infeasible;
      return probe;
    }
    CMatrix q = forms.lifted(k, k);
    double qc = std::norm(forms.d(k, k)) - alpha * forms.noise(k);
    for (int j = 0; j < forms.num_wds(); ++j) {
      if (j == k) continue;
      q -= alpha * forms.lifted(k, j);
      qc -= alpha * std::norm(forms.d(k, j));
    }
    const double scale = 1.0 / (forms.noise(k) * (1.0 + alpha));
    wds.push_back(k);
    q_mat.push_back(scale * q);
    q_const.push_back(scale * qc);
  }
  const int num = static_cast<int>(wds.size());
  if (num == 0) {
    probe.status = conic::Status::Optimal;
    probe.feasible = true;
    probe.v_lifted = CMatrix::Identity(n, n);
    return probe;
  }

  // Dual of  max s  s.t.  Tr(Q_k V) + q_k >= s, diag V = 1, V psd:
  //   min sum y + sum lambda_k q_k  s.t.  Diag(y) - sum lambda_k Q_k psd, sum lambda = 1.
  const int nv = n + num;
  conic::ConicProblem p(nv);
  Eigen::VectorXd c(nv);
  c.head(n).setOnes();
  for (int i = 0; i < num; ++i) c(n + i) = q_const[i];
  p.set_objective(c);
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(nv);
  ones.tail(num).setOnes();
  p.add_equality(ones, 1.0);
  for (int i = 0; i < num; ++i) p.add_inequality(-Eigen::VectorXd::Unit(nv, n + i), 0.0);
  conic::LmiConstraint lmi;
  lmi.constant = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    e(i, i) = 1.0;
    e(n + i, n + i) = 1.0;
    lmi.coefficients.push_back(std::move(e));
  }
  for (int i = 0; i < num; ++i) lmi.coefficients.push_back(-conic::hermitian_embedding(q_mat[i]));
  p.add_lmi(std::move(lmi));

  const auto out = conic::solve(p, cfg.tolerances.feasibility);
  probe.status = out.status;
  if (!out.ok()) return probe;
  probe.margin = out.objective;

  const Eigen::MatrixXd& z = out.lmi_duals.front();
  CMatrix v(n, n);
  v.real() = z.topLeftCorner(n, n) + z.bottomRightCorner(n, n);
  v.imag() = z.bottomLeftCorner(n, n) - z.topRightCorner(n, n);
  v = 0.5 * (v + v.adjoint()).eval();
  Eigen::VectorXd diag = v.diagonal().real();
  probe.max_diag_error = (diag.array() - 1.0).abs().maxCoeff();
  const Eigen::VectorXd inv_sqrt = diag.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  v = inv_sqrt.asDiagonal() * v * inv_sqrt.asDiagonal();
  probe.min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<CMatrix>(v, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  probe.min_residual = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num; ++i) {
    probe.min_residual =
        std::min(probe.min_residual, (q_mat[i] * v).trace().real() + q_const[i]);
  }
  probe.feasible = probe.margin >= 0.0;
  if (probe.feasible) probe.v_lifted = std::move(v);
  return probe;
}

CVector randomize(const CMatrix& v_lifted, const QuadraticForms& forms, const ComputePlan& plan,
                  const ScenarioConfig& cfg, int num_draws, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(v_lifted);
  const Eigen::VectorXd& lam = eig.eigenvalues();  // ascending
  const auto n = lam.size();
  const CMatrix& vecs = eig.eigenvectors();
  CVector best = dehomogenize(vecs.col(n - 1));
  const double lam1 = lam(n - 1);
  const double lam2 = n > 1 ? lam(n - 2) : 0.0;
  if (!(lam1 > 0.0) || lam2 / lam1 <= kRankOneRatio) return best;

  double best_t = max_edge_latency(best, forms, plan, cfg);
  const CMatrix root = vecs * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector r(n);
  for (int draw = 0; draw < num_draws; ++draw) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      r(i) = Complex(re, im);
    }
    const CVector cand = dehomogenize(root * r);
    const double t = max_edge_latency(cand, forms, plan, cfg);
    if (t < best_t) {
      best_t = t;
      best = cand;
    }
  }
  return best;
}

ReflectResult optimize_reflect_sdr(const ChannelSet& channels, const MudMatrix& w,
                                   const ComputePlan& plan, const ScenarioConfig& cfg,
                                   const PhaseVector& incumbent, std::mt19937_64& rng,
                                   SdrTrace* trace) {
  const QuadraticForms forms = build_forms(channels, w, cfg);
  const CVector v_inc = incumbent.coefficients();
  const double t_inc = max_edge_latency(v_inc, forms, plan, cfg);
  ReflectResult result{incumbent, t_inc, false, 0};
  SdrTrace local;
  SdrTrace& tr = trace ? *trace : local;
  tr = SdrTrace{};
  tr.t_incumbent = t_inc;
  tr.t_recomputed = t_inc;
  if (forms.dim() == 0 || !plan.any_offload()) return result;

  double lo = plan.max_compute_time(cfg) + kBracketOffset;
  double hi = t_inc;
  CMatrix best_v;
  if (!std::isfinite(hi)) {
    hi = std::max(2.0 * lo, lo + 1.0);
    for (int e = 0; e < cfg.caps.bisection; ++e) {
      SdrProbe probe = sdr_feasible(hi, forms, plan, cfg);
      result.solver_failures += probe.status == conic::Status::NumericalFailure;
      const bool ok = probe.feasible;
      if (ok) best_v = probe.v_lifted;
      tr.probes.push_back(std::move(probe));
      if (ok) break;
      lo = hi;
      hi *= 2.0;
    }
    if (best_v.size() == 0) return result;
  }
  for (int step = 0; step < cfg.caps.bisection && hi - lo > cfg.tolerances.detector * hi;
       ++step) {
    const double mid = 0.5 * (lo + hi);
    SdrProbe probe = sdr_feasible(mid, forms, plan, cfg);
    result.solver_failures += probe.status == conic::Status::NumericalFailure;
    if (probe.feasible) {
      hi = mid;
      best_v = probe.v_lifted;
    } else {
      lo = mid;
    }
    tr.probes.push_back(std::move(probe));
  }
  tr.t_lo = lo;
  tr.t_hi = hi;
  if (best_v.size() == 0) {
    CVector vbar(forms.dim() + 1);
    vbar << v_inc, Complex(1.0);
    best_v = vbar * vbar.adjoint();
  }

  const CVector v = randomize(best_v, forms, plan, cfg, cfg.randomization_draws, rng);
  const double t_new = max_edge_latency(v, forms, plan, cfg);
  tr.t_recomputed = t_new;
  if (t_new < t_inc) {
    result.theta = PhaseVector::from_coefficients(v);
    result.t = t_new;
    result.improved = true;
  }
  tr.improved = result.improved;
  return result;
}

ScaStep sca_step(const CVector& v_prev, const QuadraticForms& forms, double t,
                 const ComputePlan& plan, const ScenarioConfig& cfg) {
  ScaStep out;
  out.v = v_prev;
  out.before = max_edge_latency(v_prev, forms, plan, cfg);
  out.after = out.before;
  const int m = forms.dim();
  const int num_wds = forms.num_wds();
  if (m == 0 || !plan.any_offload()) return out;

  std::vector<double> alpha(num_wds, 0.0);
  double worst = 0.0;
  for (int k = 0; k < num_wds; ++k) {
    if (plan.offload_bits[k] == 0) continue;
    alpha[k] = sinr_requirement(t, plan, cfg, k);
    if (!std::isfinite(alpha[k])) {
      out.status = conic::Status::Infeasible;
      return out;
    }
    worst = std::max(worst, forms.noise(k) * (1.0 + alpha[k]));
  }
  const double scale = 1.0 / worst;

  const int nv = 2 * m + 1;  // [Re v; Im v; z]
  conic::ConicProblem p(nv);
  p.set_objective(Eigen::VectorXd::Unit(nv, nv - 1));
  for (int k = 0; k < num_wds; ++k) {
    if (plan.offload_bits[k] == 0) continue;
    const CVector g = forms.a(k, k) * (forms.a(k, k).dot(v_prev) + forms.d(k, k));
    const double constant =
        alpha[k] * forms.noise(k) - forms.power(v_prev, k, k) + 2.0 * g.dot(v_prev).real();
    // r(x) = z + 2 scale Re(g^H v) - scale * constant must dominate the convex part.
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(nv);
    rho.head(2 * m) = 2.0 * scale * conic::inner_real_row(g);
    rho(nv - 1) = 1.0;
    const double r0 = -scale * constant;
    if (num_wds == 1) {
      p.add_inequality(-rho, r0);
      continue;
    }
    const int rows = 2 * (num_wds - 1);
    CMatrix map(num_wds - 1, m);
    CVector offset(num_wds - 1);
    for (int j = 0, row = 0; j < num_wds; ++j) {
      if (j == k) continue;
      map.row(row) = forms.a(k, j).adjoint();
      offset(row) = forms.d(k, j);
      ++row;
    }
    const double gain = 2.0 * std::sqrt(alpha[k] * scale);
    conic::SocConstraint soc;
    soc.F = Eigen::MatrixXd::Zero(rows + 1, nv);
    soc.F.topLeftCorner(rows, 2 * m) = gain * conic::realify_map(map);
    soc.F.row(rows) = rho.transpose();
    soc.g = Eigen::VectorXd::Zero(rows + 1);
    soc.g.head(rows) = gain * conic::realify(offset);
    soc.g(rows) = r0 - 1.0;
    soc.c = rho;
    soc.d = r0 + 1.0;
    p.add_soc(std::move(soc));
  }
  for (int i = 0; i < m; ++i) {
    conic::SocConstraint unit;
    unit.F = Eigen::MatrixXd::Zero(2, nv);
    unit.F(0, i) = 1.0;
    unit.F(1, m + i) = 1.0;
    unit.g = Eigen::VectorXd::Zero(2);
    unit.c = Eigen::VectorXd::Zero(nv);
    unit.d = 1.0;
    p.add_soc(std::move(unit));
  }

  const auto sol = conic::solve(p, cfg.tolerances.feasibility);
  out.status = sol.status;
  if (!sol.ok()) return out;
  out.z = sol.x(nv - 1) / scale;
  const CVector target = conic::complexify(sol.x.head(2 * m));
  double mu = 1.0;
  for (int b = 0; b < kBacktrackSteps; ++b, mu *= 0.5) {
    const CVector cand = project_unit(v_prev + mu * (target - v_prev), v_prev);
    const double t_cand = max_edge_latency(cand, forms, plan, cfg);
    if (t_cand < out.before) {
      out.v = cand;
      out.after = t_cand;
      out.accepted = true;
      out.step = mu;
      break;
    }
  }
  return out;
}

ReflectResult optimize_reflect_sca(const ChannelSet& channels, const MudMatrix& w,
                                   const ComputePlan& plan, const ScenarioConfig& cfg,
                                   const PhaseVector& incumbent, std::vector<ScaStep>* steps) {
  const QuadraticForms forms = build_forms(channels, w, cfg);
  CVector v = incumbent.coefficients();
  double t = max_edge_latency(v, forms, plan, cfg);
  ReflectResult result{incumbent, t, false, 0};
  if (forms.dim() == 0 || !plan.any_offload()) return result;
  for (int it = 0; it < cfg.caps.inner; ++it) {
    ScaStep step = sca_step(v, forms, t, plan, cfg);
    result.solver_failures += step.status == conic::Status::NumericalFailure;
    const bool accepted = step.accepted;
    const double after = step.after;
    if (accepted) v = step.v;
    if (steps) steps->push_back(std::move(step));
    if (!accepted) break;
    const double change = (t - after) / after;
    t = after;
    result.improved = true;
    if (change <= cfg.tolerances.reflect) break;
  }
  if (result.improved) {
    result.theta = PhaseVector::from_coefficients(v);
    result.t = t;
  }
  return result;
}

}  // namespace irsmec
