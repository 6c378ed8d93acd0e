#pragma once

// Homogeneous self-dual interior-point method for
//   minimize c^T x  s.t.  G x + s = h,  A x = b,  s in K
// with K a product of a nonnegative orthant, second-order cones and PSD cones.
// PSD blocks are stored as full column-major m*m vectors, so the trace inner
// product is the plain dot product.

#include <Eigen/Dense>
#include <vector>

#include "irsmec/conic.hpp"

namespace irsmec::conic::detail {

struct ConeDims {
  int linear = 0;
  std::vector<int> soc;
  std::vector<int> psd;  // matrix orders

  int total() const;
  int degree() const;
};

struct StandardForm {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ConeDims dims;
};

struct IpmSettings {
  double feastol = 1e-9;
  double abstol = 1e-9;
  double reltol = 1e-8;
  int max_iterations = 100;
};

struct IpmResult {
  Status status = Status::NumericalFailure;
  Eigen::VectorXd x, y, s, z;
  int iterations = 0;
};

/// Nesterov-Todd scaling at (s, z): W z = W^-T s = lambda.
struct Scaling {
  Eigen::VectorXd lp_w;
  std::vector<double> soc_beta;
  std::vector<Eigen::VectorXd> soc_v;
  std::vector<Eigen::MatrixXd> psd_r;
  std::vector<Eigen::MatrixXd> psd_rinv;
  Eigen::VectorXd lambda;
};

/// Returns false when s or z is not strictly interior.
bool compute_scaling(const ConeDims& dims, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                     Scaling& out);

enum class Apply { W, WInv, WT, WInvT };
Eigen::VectorXd apply_scaling(const ConeDims& dims, const Scaling& w, Apply op,
                              const Eigen::VectorXd& u);

/// Jordan product u o v.
Eigen::VectorXd jordan_product(const ConeDims& dims, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v);
/// Solves lambda o x = u where PSD blocks of lambda are diagonal.
Eigen::VectorXd jordan_divide(const ConeDims& dims, const Eigen::VectorXd& lambda,
                              const Eigen::VectorXd& u);
Eigen::VectorXd identity_element(const ConeDims& dims);
/// Largest alpha with lambda + alpha d in K (lambda interior, PSD blocks diagonal); inf if none.
double max_step(const ConeDims& dims, const Eigen::VectorXd& lambda, const Eigen::VectorXd& d);
/// Smallest t with u + t e in K (may be negative when u is interior).
double interior_offset(const ConeDims& dims, const Eigen::VectorXd& u);

IpmResult solve_standard_form(const StandardForm& problem, const IpmSettings& settings);

}  // namespace irsmec::conic::detail
