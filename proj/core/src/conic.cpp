#include "irsmec/conic.hpp"

#include <algorithm>
#include <ostream>

#include "cone_ipm.hpp"
#include "irsmec/errors.hpp"

namespace irsmec::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

ConicProblem::ConicProblem(int num_vars)
    : num_vars_(num_vars), ineq_a_(0, num_vars), ineq_b_(0), eq_a_(0, num_vars), eq_b_(0) {
  if (num_vars <= 0) throw DimensionError("conic", "need at least one variable");
}

namespace {

void check_length(const char* what, Eigen::Index got, int want) {
  if (got != want) {
    throw DimensionError(what, "expected length " + std::to_string(want) + ", got " +
                                   std::to_string(got));
  }
}

void append_row(MatrixXd& a, VectorXd& b, const VectorXd& row, double rhs) {
  a.conservativeResize(a.rows() + 1, Eigen::NoChange);
  a.row(a.rows() - 1) = row.transpose();
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

}  // namespace

void ConicProblem::set_objective(VectorXd c) {
  check_length("objective", c.size(), num_vars_);
  objective_ = std::move(c);
}

void ConicProblem::add_inequality(const VectorXd& a, double b) {
  check_length("inequality", a.size(), num_vars_);
  append_row(ineq_a_, ineq_b_, a, b);
}

void ConicProblem::add_equality(const VectorXd& a, double b) {
  check_length("equality", a.size(), num_vars_);
  append_row(eq_a_, eq_b_, a, b);
}

void ConicProblem::add_soc(SocConstraint soc) {
  check_length("soc.c", soc.c.size(), num_vars_);
  check_length("soc.F cols", soc.F.cols(), num_vars_);
  check_length("soc.g", soc.g.size(), static_cast<int>(soc.F.rows()));
  socs_.push_back(std::move(soc));
}

void ConicProblem::add_lmi(LmiConstraint lmi) {
  check_length("lmi coefficients", static_cast<Eigen::Index>(lmi.coefficients.size()), num_vars_);
  const auto m = lmi.constant.rows();
  if (lmi.constant.cols() != m) throw DimensionError("lmi", "constant must be square");
  for (const auto& f : lmi.coefficients) {
    if (f.rows() != m || f.cols() != m) throw DimensionError("lmi", "coefficient order mismatch");
  }
  lmis_.push_back(std::move(lmi));
}

void ConicProblem::set_bounds(const VectorXd& lower, const VectorXd& upper) {
  check_length("lower bounds", lower.size(), num_vars_);
  check_length("upper bounds", upper.size(), num_vars_);
  for (int i = 0; i < num_vars_; ++i) {
    if (std::isfinite(lower(i))) add_inequality(-VectorXd::Unit(num_vars_, i), -lower(i));
    if (std::isfinite(upper(i))) add_inequality(VectorXd::Unit(num_vars_, i), upper(i));
  }
}

namespace {

detail::StandardForm to_standard_form(const ConicProblem& p) {
  detail::StandardForm f;
  const int n = p.num_vars();
  f.c = p.objective().size() == n ? p.objective() : VectorXd::Zero(n);
  f.A = p.equality_matrix();
  f.b = p.equality_rhs();
  f.dims.linear = static_cast<int>(p.inequality_rhs().size());
  for (const auto& q : p.socs()) f.dims.soc.push_back(static_cast<int>(q.F.rows()) + 1);
  for (const auto& l : p.lmis()) f.dims.psd.push_back(static_cast<int>(l.constant.rows()));
  const int rows = f.dims.total();
  f.G = MatrixXd::Zero(rows, n);
  f.h = VectorXd::Zero(rows);
  int off = 0;
  f.G.topRows(f.dims.linear) = p.inequality_matrix();
  f.h.head(f.dims.linear) = p.inequality_rhs();
  off += f.dims.linear;
  for (const auto& q : p.socs()) {
    const auto k = q.F.rows();
    f.G.row(off) = -q.c.transpose();
    f.h(off) = q.d;
    f.G.block(off + 1, 0, k, n) = -q.F;
    f.h.segment(off + 1, k) = q.g;
    off += static_cast<int>(k) + 1;
  }
  for (const auto& l : p.lmis()) {
    const auto m = l.constant.rows();
    for (int i = 0; i < n; ++i) {
      f.G.block(off, i, m * m, 1) = -Eigen::Map<const VectorXd>(l.coefficients[i].data(), m * m);
    }
    f.h.segment(off, m * m) = Eigen::Map<const VectorXd>(l.constant.data(), m * m);
    off += static_cast<int>(m * m);
  }
  return f;
}

}  // namespace

ConicOutcome solve(const ConicProblem& problem, const SolverOptions& options) {
  const detail::StandardForm f = to_standard_form(problem);
  if (f.dims.total() == 0) throw DimensionError("conic", "no cone constraints");
  detail::IpmSettings st;
  st.feastol = std::min(1e-9, 1e-2 * options.feasibility_tol);
  st.abstol = options.gap_tol;
  st.reltol = options.relative_gap_tol;
  st.max_iterations = options.max_iterations;
  const detail::IpmResult r = detail::solve_standard_form(f, st);

  ConicOutcome out;
  out.status = r.status;
  out.iterations = r.iterations;
  out.x = r.x;
  out.objective = f.c.dot(r.x);
  out.max_violation = max_violation(problem, r.x);
  if (out.status == Status::Optimal && !(out.max_violation <= options.feasibility_tol)) {
    out.status = Status::NumericalFailure;
  }

  out.equality_dual = r.y;
  int off = 0;
  out.inequality_dual = r.z.head(f.dims.linear);
  off += f.dims.linear;
  for (int q : f.dims.soc) {
    out.soc_duals.push_back(r.z.segment(off, q));
    off += q;
  }
  for (int m : f.dims.psd) {
    MatrixXd zm = Eigen::Map<const MatrixXd>(r.z.data() + off, m, m);
    out.lmi_duals.push_back(0.5 * (zm + zm.transpose()));
    off += m * m;
  }
  return out;
}

double max_violation(const ConicProblem& p, const VectorXd& x) {
  check_length("x", x.size(), p.num_vars());
  double v = 0.0;
  if (p.inequality_rhs().size() > 0) {
    v = std::max(v, (p.inequality_matrix() * x - p.inequality_rhs()).maxCoeff());
  }
  if (p.equality_rhs().size() > 0) {
    v = std::max(v, (p.equality_matrix() * x - p.equality_rhs()).cwiseAbs().maxCoeff());
  }
  for (const auto& q : p.socs()) {
    v = std::max(v, (q.F * x + q.g).norm() - (q.c.dot(x) + q.d));
  }
  for (const auto& l : p.lmis()) {
    MatrixXd s = l.constant;
    for (int i = 0; i < p.num_vars(); ++i) s += x(i) * l.coefficients[i];
    s = 0.5 * (s + s.transpose()).eval();
    const double mn =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    v = std::max(v, -mn);
  }
  return std::max(v, 0.0);
}

void write_triplets(const ConicProblem& p, std::ostream& out) {
  const detail::StandardForm f = to_standard_form(p);
  out << "# vars " << p.num_vars() << " linear " << f.dims.linear << " soc";
  for (int q : f.dims.soc) out << ' ' << q;
  out << " psd";
  for (int m : f.dims.psd) out << ' ' << m;
  out << '\n';
  const auto dump_vec = [&](const char* tag, const VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) != 0.0) out << tag << ' ' << i << " 0 " << v(i) << '\n';
    }
  };
  const auto dump_mat = [&](const char* tag, const MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) != 0.0) out << tag << ' ' << i << ' ' << j << ' ' << m(i, j) << '\n';
      }
    }
  };
  dump_vec("c", f.c);
  dump_mat("G", f.G);
  dump_vec("h", f.h);
  dump_mat("A", f.A);
  dump_vec("b", f.b);
}

VectorXd realify(const Eigen::VectorXcd& z) {
  VectorXd x(2 * z.size());
  x << z.real(), z.imag();
  return x;
}

Eigen::VectorXcd complexify(const VectorXd& x) {
  const auto n = x.size() / 2;
  Eigen::VectorXcd z(n);
  z.real() = x.head(n);
  z.imag() = x.tail(n);
  return z;
}

MatrixXd realify_map(const Eigen::MatrixXcd& m) {
  MatrixXd r(2 * m.rows(), 2 * m.cols());
  r << m.real(), -m.imag(), m.imag(), m.real();
  return r;
}

MatrixXd hermitian_embedding(const Eigen::MatrixXcd& h) { return realify_map(h); }

VectorXd inner_real_row(const Eigen::VectorXcd& a) {
  VectorXd r(2 * a.size());
  r << a.real(), a.imag();
  return r;
}

VectorXd inner_imag_row(const Eigen::VectorXcd& a) {
  VectorXd r(2 * a.size());
  r << -a.imag(), a.real();
  return r;
}

}  // namespace irsmec::conic
