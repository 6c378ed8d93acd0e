#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cone_ipm.hpp"
#include "irsmec/conic.hpp"
#include "irsmec/errors.hpp"

namespace irsmec::conic {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Conic, LinearProgram) {
  ConicProblem p(1);
  p.set_objective(vec({1.0}));
  p.add_inequality(vec({-1.0}), -3.0);  // x >= 3
  const ConicOutcome out = solve(p);
  ASSERT_TRUE(out.ok()) << to_string(out.status);
  EXPECT_NEAR(out.x(0), 3.0, 1e-6);
  EXPECT_NEAR(out.objective, 3.0, 1e-6);
  EXPECT_LE(out.max_violation, 1e-7);
}

TEST(Conic, SecondOrderCone) {
  ConicProblem p(2);
  p.set_objective(vec({-1.0, 0.0}));
  p.add_soc({MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), 1.0});
  const ConicOutcome out = solve(p);
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out.x(0), 1.0, 1e-6);
  EXPECT_NEAR(out.x(1), 0.0, 1e-5);
}

TEST(Conic, SemidefiniteBoundary) {
  ConicProblem p(1);
  p.set_objective(vec({-1.0}));
  LmiConstraint lmi;
  lmi.constant = MatrixXd::Identity(2, 2);
  MatrixXd f = MatrixXd::Zero(2, 2);
  f(0, 1) = f(1, 0) = 1.0;
  lmi.coefficients = {f};
  p.add_lmi(lmi);
  const ConicOutcome out = solve(p);
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out.x(0), 1.0, 1e-6);
}

TEST(Conic, EqualityAndBounds) {
  ConicProblem p(2);
  p.set_objective(vec({1.0, 2.0}));
  p.add_equality(vec({1.0, 1.0}), 1.0);
  p.set_bounds(vec({0.0, 0.0}), vec({INFINITY, INFINITY}));
  const ConicOutcome out = solve(p);
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out.x(0), 1.0, 1e-6);
  EXPECT_NEAR(out.x(1), 0.0, 1e-6);
}

TEST(Conic, InfeasibleDetected) {
  ConicProblem p(1);
  p.set_objective(vec({1.0}));
  p.add_inequality(vec({1.0}), 1.0);    // x <= 1
  p.add_inequality(vec({-1.0}), -2.0);  // x >= 2
  EXPECT_EQ(solve(p).status, Status::Infeasible);

  ConicProblem q(2);
  q.add_soc({MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), 1.0});
  q.add_inequality(vec({-1.0, 0.0}), -2.0);
  EXPECT_EQ(solve(q).status, Status::Infeasible);
}

TEST(Conic, UnboundedDetected) {
  ConicProblem p(1);
  p.set_objective(vec({-1.0}));
  p.add_inequality(vec({-1.0}), 0.0);
  EXPECT_EQ(solve(p).status, Status::Unbounded);
}

TEST(Conic, FeasibilityOnly) {
  ConicProblem p(2);
  p.add_soc({MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), 1.0});
  p.add_inequality(vec({-1.0, -1.0}), -1.0);
  const ConicOutcome out = solve(p);
  ASSERT_TRUE(out.ok());
  EXPECT_LE(max_violation(p, out.x), 1e-7);
}

TEST(Conic, RowScalingKeepsStatus) {
  for (double scale : {1e-3, 1.0, 1e3}) {
    ConicProblem p(2);
    p.set_objective(vec({-1.0, -1.0}));
    p.add_soc({scale * MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), scale});
    const ConicOutcome out = solve(p);
    ASSERT_TRUE(out.ok()) << scale;
    EXPECT_NEAR(out.x(0), std::sqrt(0.5), 1e-6);
  }
}

TEST(Conic, MaxViolationEvaluator) {
  ConicProblem p(2);
  p.add_inequality(vec({1.0, 0.0}), 1.0);
  p.add_equality(vec({0.0, 1.0}), 0.0);
  p.add_soc({MatrixXd::Identity(2, 2), VectorXd::Zero(2), VectorXd::Zero(2), 1.0});
  EXPECT_EQ(max_violation(p, vec({0.5, 0.0})), 0.0);
  EXPECT_NEAR(max_violation(p, vec({2.0, 0.0})), 1.0, 1e-15);
  EXPECT_NEAR(max_violation(p, vec({0.0, 0.25})), 0.25, 1e-15);
  LmiConstraint lmi{MatrixXd::Identity(2, 2), {MatrixXd::Zero(2, 2), -MatrixXd::Identity(2, 2)}};
  p.add_lmi(lmi);
  EXPECT_NEAR(max_violation(p, vec({0.0, 3.0})), 3.0, 1e-12);
}

TEST(Conic, DimensionChecks) {
  ConicProblem p(2);
  EXPECT_THROW(p.add_inequality(vec({1.0}), 0.0), DimensionError);
  EXPECT_THROW(p.set_objective(vec({1.0, 2.0, 3.0})), DimensionError);
  EXPECT_THROW(ConicProblem(0), DimensionError);
}

TEST(Conic, TripletDump) {
  ConicProblem p(2);
  p.add_inequality(vec({1.0, 0.0}), 1.0);
  std::ostringstream out;
  write_triplets(p, out);
  EXPECT_NE(out.str().find("1"), std::string::npos);
}

TEST(Lifting, RealComplexConventions) {
  Eigen::VectorXcd z(2);
  z << std::complex<double>(1, 2), std::complex<double>(-3, 0.5);
  EXPECT_TRUE(realify(z).isApprox(vec({1.0, -3.0, 2.0, 0.5})));
  EXPECT_TRUE(complexify(realify(z)).isApprox(z));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = {g(rng), g(rng)};
  EXPECT_LE((realify_map(m) * realify(z) - realify(m * z)).norm(), 1e-12);

  Eigen::VectorXcd a(2);
  a << std::complex<double>(0.3, -1.0), std::complex<double>(2.0, 0.7);
  const auto inner = a.dot(z);  // a^H z
  EXPECT_NEAR(inner_real_row(a).dot(realify(z)), inner.real(), 1e-12);
  EXPECT_NEAR(inner_imag_row(a).dot(realify(z)), inner.imag(), 1e-12);

  const Eigen::MatrixXcd h = a * a.adjoint() + Eigen::MatrixXcd::Identity(2, 2);
  const double quad = z.dot(h * z).real();
  EXPECT_NEAR(realify(z).dot(hermitian_embedding(h) * realify(z)), quad, 1e-12);
}

TEST(IpmDetail, NesterovToddScalingIdentity) {
  detail::ConeDims dims;
  dims.linear = 2;
  dims.soc = {3};
  dims.psd = {2};
  VectorXd s(9), z(9);
  s << 1.0, 2.0, 2.0, 0.5, -0.3, 2.0, 0.4, 0.4, 1.0;
  z << 0.5, 3.0, 1.5, -0.2, 0.7, 1.0, -0.2, -0.2, 3.0;
  detail::Scaling w;
  ASSERT_TRUE(detail::compute_scaling(dims, s, z, w));
  const VectorXd wz = detail::apply_scaling(dims, w, detail::Apply::W, z);
  const VectorXd wits = detail::apply_scaling(dims, w, detail::Apply::WInvT, s);
  EXPECT_LE((wz - w.lambda).norm(), 1e-10);
  EXPECT_LE((wits - w.lambda).norm(), 1e-10);
  const VectorXd back =
      detail::apply_scaling(dims, w, detail::Apply::WInv, detail::apply_scaling(dims, w, detail::Apply::W, s));
  EXPECT_LE((back - s).norm(), 1e-10);
}

TEST(IpmDetail, IdentityAndStepLength) {
  detail::ConeDims dims;
  dims.linear = 1;
  dims.soc = {2};
  const VectorXd e = detail::identity_element(dims);
  EXPECT_TRUE(e.isApprox(vec({1.0, 1.0, 0.0})));
  EXPECT_TRUE(detail::jordan_product(dims, e, vec({2.0, 3.0, 1.0})).isApprox(vec({2.0, 3.0, 1.0})));
  EXPECT_NEAR(detail::max_step(dims, e, vec({-2.0, 0.0, 0.0})), 0.5, 1e-12);
  EXPECT_NEAR(detail::interior_offset(dims, vec({0.5, 0.0, 2.0})), 2.0, 1e-12);
}

}  // namespace
}  // namespace irsmec::conic
