#include <gtest/gtest.h>

#include <cmath>

#include "irsmec/compute_alloc.hpp"
#include "irsmec/mud.hpp"
#include "irsmec/reflect.hpp"
#include "test_support.hpp"

namespace irsmec {
namespace {

// Small instance after one allocation and one detector step.
struct Instance {
  ScenarioConfig cfg;
  ChannelSet channels;
  PhaseVector theta;
  ComputePlan plan;
  MudMatrix w;
  double t = 0.0;
};

Instance make_instance(std::uint64_t seed, int num_wds = 2, int elements = 3) {
  Instance in;
  in.cfg = testing::small_scenario(num_wds, 2, elements, 3, 2);
  in.channels = synthesize(in.cfg, seed);
  std::mt19937_64 rng(seed);
  in.theta = PhaseVector::uniform_random(in.cfg.reflect_dim(), rng);
  const MudMatrix mrc = mrc_detectors(effective_channels(in.channels, in.theta));
  in.plan = allocate(rates(mrc, in.channels, in.theta, in.cfg), in.cfg);
  const MudResult mud = optimize_mud(in.channels, in.theta, in.plan, in.cfg);
  in.w = mud.w;
  in.t = mud.max_edge_s;
  return in;
}

TEST(Forms, ExpansionIdentity) {
  const Instance in = make_instance(1);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector v = testing::random_unit_modulus(forms.dim(), rng);
    const CMatrix h = effective_channels(in.channels, PhaseVector::from_coefficients(v));
    CVector vbar(forms.dim() + 1);
    vbar << v, Complex(1.0);
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 2; ++j) {
        const double direct = in.cfg.transmit_power_mw * std::norm(in.w.col(k).dot(h.col(j)));
        const double lifted =
            vbar.dot(forms.lifted(k, j) * vbar).real() + std::norm(forms.d(k, j));
        const double expanded = v.dot(forms.c(k, j) * v).real() +
                                2.0 * v.dot(forms.u(k, j)).real() + std::norm(forms.d(k, j));
        EXPECT_LE(std::abs(forms.power(v, k, j) - direct), 1e-10 * direct);
        EXPECT_LE(std::abs(lifted - direct), 1e-10 * direct);
        EXPECT_LE(std::abs(expanded - direct), 1e-10 * direct);
      }
    }
  }
}

TEST(Forms, HermitianAndZeroChannels) {
  const Instance in = make_instance(2);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  const CMatrix r = forms.lifted(0, 1);
  EXPECT_TRUE(r == r.adjoint());

  const auto& d = in.channels.dims();
  const ChannelSet zero(d, CMatrix::Zero(d.receive_dim(), d.num_wds),
                        CMatrix::Zero(d.reflect_dim(), d.num_wds),
                        CMatrix::Zero(d.receive_dim(), d.reflect_dim()));
  const QuadraticForms z = build_forms(zero, in.w, in.cfg);
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(z.a(k, j).norm(), 0.0);
      EXPECT_EQ(z.d(k, j), Complex(0.0));
    }
    if (in.plan.offload_bits[k] == 0) continue;
    const double alpha = sinr_requirement(in.t, in.plan, in.cfg, k);
    const CVector v = CVector::Ones(z.dim());
    EXPECT_NEAR(f_value(v, z, in.t, in.plan, in.cfg, k) / (alpha * z.noise(k)), 1.0, 1e-12);
  }
}

TEST(Forms, SinrMatchesLatencyModel) {
  const Instance in = make_instance(3);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  const CVector v = in.theta.coefficients();
  for (int k = 0; k < 2; ++k) {
    const double expect = sinr(in.w.col(k), in.channels, in.theta, in.cfg, k);
    EXPECT_NEAR(forms.sinr(v, k) / expect, 1.0, 1e-10);
  }
}

TEST(Forms, TightAfterDetectorStep) {
  const Instance in = make_instance(4);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  const CVector v = in.theta.coefficients();
  double worst = -INFINITY;
  for (int k = 0; k < 2; ++k) {
    if (in.plan.offload_bits[k] == 0) continue;
    const double f = f_value(v, forms, in.t, in.plan, in.cfg, k);
    EXPECT_LE(f, 1e-9 * forms.power(v, k, k));
    worst = std::max(worst, f / forms.power(v, k, k));
  }
  EXPECT_NEAR(worst, 0.0, 1e-9);
}

TEST(Majorization, UpperBoundTangentAndGradient) {
  for (std::uint64_t seed : {5u, 6u}) {
    const Instance in = make_instance(seed);
    const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
    std::mt19937_64 rng(seed);
    const CVector v0 = testing::random_unit_modulus(forms.dim(), rng);
    for (int k = 0; k < 2; ++k) {
      if (in.plan.offload_bits[k] == 0) continue;
      const double alpha = sinr_requirement(in.t, in.plan, in.cfg, k);
      const double norm = forms.noise(k) * (1.0 + alpha);
      EXPECT_LE(std::abs(f_upper(v0, v0, forms, in.t, in.plan, in.cfg, k) -
                         f_value(v0, forms, in.t, in.plan, in.cfg, k)),
                1e-9 * norm);
      for (int s = 0; s < 100; ++s) {
        const CVector v = testing::random_unit_modulus(forms.dim(), rng);
        EXPECT_GE(f_upper(v, v0, forms, in.t, in.plan, in.cfg, k) -
                      f_value(v, forms, in.t, in.plan, in.cfg, k),
                  -1e-9 * norm);
      }
      const Eigen::VectorXd g = f_upper_gradient(v0, v0, forms, in.t, in.plan, in.cfg, k);
      const Eigen::VectorXd x0 = conic::realify(v0);
      Eigen::VectorXd fd(x0.size());
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < x0.size(); ++i) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (f_value(conic::complexify(xp), forms, in.t, in.plan, in.cfg, k) -
                 f_value(conic::complexify(xm), forms, in.t, in.plan, in.cfg, k)) /
                (2.0 * h);
      }
      EXPECT_LE((fd - g).norm(), 1e-5 * g.norm());
    }
  }
}

TEST(Sdr, ProbeCertificates) {
  const Instance in = make_instance(7);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  std::mt19937_64 rng(1);
  SdrTrace trace;
  const ReflectResult res =
      optimize_reflect_sdr(in.channels, in.w, in.plan, in.cfg, in.theta, rng, &trace);
  ASSERT_FALSE(trace.probes.empty());
  const double tol = in.cfg.tolerances.feasibility;
  for (const SdrProbe& p : trace.probes) {
    if (!p.feasible) continue;
    EXPECT_LE((p.v_lifted.diagonal().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_LE(p.max_diag_error, 1e-3);
    EXPECT_GE(p.min_eigenvalue, -tol);
    EXPECT_GE(p.min_residual, -tol);
  }
  EXPECT_LE(trace.t_lo, trace.t_recomputed);
  EXPECT_LE(res.t, trace.t_incumbent);
  EXPECT_NEAR(res.t, max_edge_latency(res.theta.coefficients(), forms, in.plan, in.cfg),
              1e-12 * res.t);
}

TEST(Sdr, SlackTargetIsFeasible) {
  const Instance in = make_instance(8);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  const SdrProbe p = sdr_feasible(100.0 * in.t, forms, in.plan, in.cfg);
  EXPECT_TRUE(p.feasible);
  EXPECT_FALSE(sdr_feasible(in.plan.max_compute_time(in.cfg), forms, in.plan, in.cfg).feasible);
}

TEST(Sdr, RankOneShortcutAndUnitModulus) {
  const Instance in = make_instance(9);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  std::mt19937_64 rng(3);
  CVector vbar = testing::random_unit_modulus(forms.dim() + 1, rng);
  const CMatrix v1 = vbar * vbar.adjoint();
  const CVector got = randomize(v1, forms, in.plan, in.cfg, 50, rng);
  for (int n = 0; n < forms.dim(); ++n) {
    EXPECT_NEAR(std::abs(got(n) - vbar(n) / vbar(forms.dim())), 0.0, 1e-9);
  }

  const CVector a = testing::random_unit_modulus(forms.dim() + 1, rng);
  const CMatrix v2 = 0.5 * (v1 + a * a.adjoint());
  std::mt19937_64 r1(11), r2(11);
  const CVector few = randomize(v2, forms, in.plan, in.cfg, 1, r1);
  const CVector many = randomize(v2, forms, in.plan, in.cfg, 200, r2);
  for (int n = 0; n < forms.dim(); ++n) EXPECT_NEAR(std::abs(many(n)), 1.0, 1e-12);
  EXPECT_LE(max_edge_latency(many, forms, in.plan, in.cfg),
            max_edge_latency(few, forms, in.plan, in.cfg));
}

TEST(Sca, StepDecreasesWhenSurrogateIsNegative) {
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const Instance in = make_instance(seed);
    const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
    const CVector v = in.theta.coefficients();
    const ScaStep step = sca_step(v, forms, in.t, in.plan, in.cfg);
    ASSERT_EQ(step.status, conic::Status::Optimal) << seed;
    double norm = 0.0;
    for (int k = 0; k < 2; ++k) {
      if (in.plan.offload_bits[k] == 0) continue;
      norm = std::max(norm, forms.noise(k) * (1.0 + sinr_requirement(in.t, in.plan, in.cfg, k)));
    }
    EXPECT_LE(step.z, 1e-6 * norm) << seed;
    EXPECT_LE(step.after, step.before);
    if (step.accepted) {
      EXPECT_LT(step.after, step.before);
      for (int n = 0; n < forms.dim(); ++n) EXPECT_NEAR(std::abs(step.v(n)), 1.0, 1e-12);
    }
  }
}

TEST(Sca, OptimizeNeverWorsens) {
  const Instance in = make_instance(13);
  std::vector<ScaStep> steps;
  const ReflectResult res =
      optimize_reflect_sca(in.channels, in.w, in.plan, in.cfg, in.theta, &steps);
  const QuadraticForms forms = build_forms(in.channels, in.w, in.cfg);
  EXPECT_LE(res.t, max_edge_latency(in.theta.coefficients(), forms, in.plan, in.cfg));
  double prev = INFINITY;
  for (const auto& s : steps) {
    EXPECT_LE(s.before, prev);
    prev = s.after;
  }
}

}  // namespace
}  // namespace irsmec
