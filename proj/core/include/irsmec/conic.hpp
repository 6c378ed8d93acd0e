#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsmec::conic {

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(Status status);

/// ||F x + g||_2 <= c^T x + d
struct SocConstraint {
  Eigen::MatrixXd F;
  Eigen::VectorXd g;
  Eigen::VectorXd c;
  double d = 0.0;
};

/// F0 + sum_i x_i F_i is positive semidefinite. All matrices symmetric, same order.
struct LmiConstraint {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coefficients;  // one per decision variable
};

/// Real conic program: minimize c^T x over linear, second-order cone and LMI constraints.
/// An empty objective turns the problem into a pure feasibility check.
class ConicProblem {
 public:
  explicit ConicProblem(int num_vars);

  int num_vars() const { return num_vars_; }

  void set_objective(Eigen::VectorXd c);
  /// a^T x <= b
  void add_inequality(const Eigen::VectorXd& a, double b);
  /// a^T x == b
  void add_equality(const Eigen::VectorXd& a, double b);
  void add_soc(SocConstraint soc);
  void add_lmi(LmiConstraint lmi);
  /// Bounds become plain inequality rows; infinite entries are skipped.
  void set_bounds(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

  const Eigen::VectorXd& objective() const { return objective_; }
  const Eigen::MatrixXd& inequality_matrix() const { return ineq_a_; }
  const Eigen::VectorXd& inequality_rhs() const { return ineq_b_; }
  const Eigen::MatrixXd& equality_matrix() const { return eq_a_; }
  const Eigen::VectorXd& equality_rhs() const { return eq_b_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }
  const std::vector<LmiConstraint>& lmis() const { return lmis_; }

 private:
  int num_vars_;
  Eigen::VectorXd objective_;
  Eigen::MatrixXd ineq_a_;
  Eigen::VectorXd ineq_b_;
  Eigen::MatrixXd eq_a_;
  Eigen::VectorXd eq_b_;
  std::vector<SocConstraint> socs_;
  std::vector<LmiConstraint> lmis_;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;  // bound on the re-verified constraint violation
  double gap_tol = 1e-9;          // absolute duality gap
  double relative_gap_tol = 1e-8;
  int max_iterations = 100;
};

struct ConicOutcome {
  Status status = Status::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double max_violation = 0.0;  // independent re-check of x
  int iterations = 0;

  // Dual multipliers; on Infeasible they form the certificate.
  Eigen::VectorXd inequality_dual;
  Eigen::VectorXd equality_dual;
  std::vector<Eigen::VectorXd> soc_duals;
  std::vector<Eigen::MatrixXd> lmi_duals;

  bool ok() const { return status == Status::Optimal; }
};

ConicOutcome solve(const ConicProblem& problem, const SolverOptions& options = {});
inline ConicOutcome solve(const ConicProblem& problem, double feasibility_tol) {
  SolverOptions o;
  o.feasibility_tol = feasibility_tol;
  return solve(problem, o);
}

/// Largest violation of any constraint at x (0 when feasible); LMIs use -lambda_min.
double max_violation(const ConicProblem& problem, const Eigen::VectorXd& x);

/// Sparse triplet dump ("<block> <row> <col> <value>" lines) for debugging.
void write_triplets(const ConicProblem& problem, std::ostream& out);

// Complex-to-real lifting: z in C^n maps to [Re z; Im z] in R^2n.

Eigen::VectorXd realify(const Eigen::VectorXcd& z);
Eigen::VectorXcd complexify(const Eigen::VectorXd& x);
/// Real matrix of the map z -> M z.
Eigen::MatrixXd realify_map(const Eigen::MatrixXcd& m);
/// Hermitian H to [[Re H, -Im H], [Im H, Re H]].
Eigen::MatrixXd hermitian_embedding(const Eigen::MatrixXcd& h);
/// Rows r_re, r_im with Re(a^H z) = r_re . x and Im(a^H z) = r_im . x.
Eigen::VectorXd inner_real_row(const Eigen::VectorXcd& a);
Eigen::VectorXd inner_imag_row(const Eigen::VectorXcd& a);

}  // namespace irsmec::conic
