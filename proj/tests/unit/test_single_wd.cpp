#include <gtest/gtest.h>

#include <cmath>

#include "irsmec/compute_alloc.hpp"
#include "irsmec/errors.hpp"
#include "irsmec/orchestrator.hpp"
#include "irsmec/single_wd.hpp"
#include "test_support.hpp"

namespace irsmec {
namespace {

ChannelSet real_channels(int in) {
  ChannelDims dims{1, 1, 2, 1, in};
  CMatrix direct(2, 1), reflect(in, 1), cascade(2, in);
  direct << 0.5, 0.25;
  for (int n = 0; n < in; ++n) reflect(n, 0) = 0.1 * (n + 1);
  cascade.setConstant(0.3);
  return ChannelSet(dims, direct, reflect, cascade);
}

double snr_at(const ChannelSet& ch, const PhaseVector& theta, const ScenarioConfig& cfg) {
  return cfg.transmit_power_mw * effective_channel(ch, theta, 0).squaredNorm() /
         cfg.noise_power_mw;
}

TEST(SingleWd, OffloadMatchesAllocatorAndBruteForce) {
  ScenarioConfig cfg = testing::small_scenario(1, 0, 1, 1, 1);
  EXPECT_EQ(single_offload(1e6, cfg), optimal_offload(1e6, cfg.edge_cpu_total_hz, cfg, 0).bits);
  cfg.data_bits = {200};
  cfg.cycles_per_bit = {3.0};
  cfg.local_cpu_hz = {50.0};
  cfg.edge_cpu_total_hz = 400.0;
  const double r = 20.0;
  std::int64_t best = 0;
  double best_d = INFINITY;
  for (std::int64_t l = 0; l <= 200; ++l) {
    const double d = testing::direct_latency(static_cast<double>(l), 400.0, r, cfg, 0);
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  EXPECT_EQ(testing::direct_latency(static_cast<double>(single_offload(r, cfg)), 400.0, r, cfg, 0),
            testing::direct_latency(static_cast<double>(best), 400.0, r, cfg, 0));
  cfg.data_bits = {0};
  EXPECT_EQ(single_offload(r, cfg), 0);
}

TEST(SingleWd, MrcOnUnitVector) {
  ChannelDims dims{1, 1, 3, 0, 1};
  const ChannelSet ch(dims, CMatrix(CVector::Unit(3, 0)), CMatrix::Zero(0, 1), CMatrix::Zero(3, 0));
  const CVector w = mrc_detector(ch, PhaseVector::zeros(0));
  EXPECT_TRUE(w.isApprox(CVector::Unit(3, 0)));
}

TEST(SingleWd, MrcDominatesRandomDetectors) {
  const ScenarioConfig cfg = testing::small_scenario(1, 1, 4, 2, 2);
  const ChannelSet ch = synthesize(cfg, 3);
  const PhaseVector theta = PhaseVector::zeros(4);
  const CVector w = mrc_detector(ch, theta);
  const double best = sinr(w, ch, theta, cfg, 0);
  EXPECT_NEAR(best / snr_at(ch, theta, cfg), 1.0, 1e-12);
  EXPECT_NEAR(sinr(std::polar(1.0, 0.4) * w, ch, theta, cfg, 0) / best, 1.0, 1e-12);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    CVector r = testing::random_unit_modulus(4, rng);
    r /= r.norm();
    EXPECT_LE(sinr(r, ch, theta, cfg, 0), best);
  }
}

TEST(SingleWd, RealPositiveChannelsAlignAtZero) {
  const ChannelSet ch = real_channels(3);
  const CVector w = mrc_detector(ch, PhaseVector::zeros(3));
  const PhaseVector theta = aligned_phases(ch, w);
  for (int n = 0; n < 3; ++n) {
    const double a = theta.angles()(n);
    EXPECT_LT(std::min(a, 2.0 * M_PI - a), 1e-12);
  }
}

TEST(SingleWd, AlignmentMeetsTheTriangleBound) {
  const ScenarioConfig cfg = testing::small_scenario(1, 1, 1, 1, 1);
  const ChannelSet ch = synthesize(cfg, 7);
  const CVector w = mrc_detector(ch, PhaseVector::zeros(1));
  const PhaseVector theta = aligned_phases(ch, w);
  const CVector h = effective_channel(ch, theta, 0);
  const double bound = std::abs(w.dot(ch.direct().col(0))) +
                       std::abs((w.adjoint() * ch.cascade())(0, 0) * ch.reflect()(0, 0));
  EXPECT_LE(std::abs(std::abs(w.dot(h)) - bound), 1e-10 * bound);

  // Perturbing any single phase lowers the received amplitude.
  const ScenarioConfig cfg2 = testing::small_scenario(1, 1, 3, 2, 2);
  const ChannelSet ch2 = synthesize(cfg2, 8);
  const CVector w2 = mrc_detector(ch2, PhaseVector::zeros(3));
  const PhaseVector th2 = aligned_phases(ch2, w2);
  const double base = std::norm(w2.dot(effective_channel(ch2, th2, 0)));
  for (int n = 0; n < 3; ++n) {
    for (double delta : {-0.05, 0.05}) {
      Eigen::VectorXd a = th2.angles();
      a(n) += delta;
      EXPECT_LT(std::norm(w2.dot(effective_channel(ch2, PhaseVector(a), 0))), base);
    }
  }
}

TEST(SingleWd, MatchesPhaseGrid) {
  ScenarioConfig cfg = testing::small_scenario(1, 1, 1, 1, 1);
  const ChannelSet ch = synthesize(cfg, 9);
  const SingleWdResult res = solve_single(ch, cfg);
  double grid_best = INFINITY;
  for (int i = 0; i < 360; ++i) {
    Eigen::VectorXd a(1);
    a << 2.0 * M_PI * i / 360.0;
    const double r = rate(snr_at(ch, PhaseVector(a), cfg), cfg);
    grid_best = std::min(
        grid_best, latency(static_cast<double>(single_offload(r, cfg)), cfg.edge_cpu_total_hz, r,
                           cfg, 0)
                       .total_s);
  }
  EXPECT_LE(res.latency.total_s, grid_best * (1.0 + 1e-9));
  EXPECT_GE(res.latency.total_s, grid_best * (1.0 - 1e-3));
}

TEST(SingleWd, NoIrsMatchesGeneralPipeline) {
  const ScenarioConfig cfg = testing::small_scenario(1, 0, 1, 3, 2);
  const ChannelSet ch = synthesize(cfg, 10);
  const SingleWdResult res = solve_single(ch, cfg);
  const BcdResult bcd = run_bcd(ch, cfg, ReflectScheme::None);
  EXPECT_NEAR(res.latency.total_s / bcd.report.objective_s, 1.0, 1e-3);
}

TEST(SingleWd, NotWorseThanGeneralPipeline) {
  const ScenarioConfig cfg = testing::small_scenario(1, 2, 3, 3, 2);
  const ChannelSet ch = synthesize(cfg, 11);
  const SingleWdResult res = solve_single(ch, cfg);
  const BcdResult bcd = run_bcd(ch, cfg, ReflectScheme::Sca);
  EXPECT_LE(res.latency.total_s, bcd.report.objective_s * (1.0 + 1e-3));
}

TEST(SingleWd, RequiresOneWd) {
  const ScenarioConfig cfg = default_scenario();
  EXPECT_THROW(solve_single(synthesize(cfg, 1), cfg), ConfigError);
  EXPECT_THROW(single_offload(1e6, cfg), ConfigError);
}

}  // namespace
}  // namespace irsmec
