#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "irsmec/compute_alloc.hpp"
#include "irsmec/single_wd.hpp"
#include "test_support.hpp"

namespace irsmec {
namespace {

ScenarioConfig toy(std::int64_t bits, double c, double fl) {
  ScenarioConfig cfg = testing::small_scenario(1, 0, 1, 1, 1);
  cfg.data_bits = {bits};
  cfg.cycles_per_bit = {c};
  cfg.local_cpu_hz = {fl};
  return cfg;
}

std::int64_t brute_force(double r, double fe, const ScenarioConfig& cfg, int k) {
  std::int64_t best = 0;
  double best_d = INFINITY;
  for (std::int64_t l = 0; l <= cfg.data_bits[k]; ++l) {
    const double d = testing::direct_latency(static_cast<double>(l), fe, r, cfg, k);
    if (d < best_d) {
      best_d = d;
      best = l;
    }
  }
  return best;
}

TEST(OptimalOffload, ToyExamples) {
  const ScenarioConfig cfg = toy(100, 1.0, 1.0);
  EXPECT_NEAR(continuous_offload(1.0, 1.0, cfg, 0), 100.0 / 3.0, 1e-12);
  EXPECT_NEAR(continuous_offload(1.0, 1e15, cfg, 0), 50.0, 1e-9);
  const auto d = optimal_offload(1.0, 1.0, cfg, 0);
  EXPECT_FALSE(d.forced_local);
  EXPECT_TRUE(d.bits == 33 || d.bits == 34);
  EXPECT_EQ(testing::direct_latency(static_cast<double>(d.bits), 1.0, 1.0, cfg, 0),
            testing::direct_latency(static_cast<double>(brute_force(1.0, 1.0, cfg, 0)), 1.0, 1.0,
                                    cfg, 0));
  EXPECT_EQ(optimal_offload(1.0, 1.0, toy(0, 1.0, 1.0), 0).bits, 0);
}

TEST(OptimalOffload, ZeroRateOrCpuIsFlaggedLocal) {
  const ScenarioConfig cfg = toy(100, 1.0, 1.0);
  EXPECT_TRUE(optimal_offload(0.0, 1.0, cfg, 0).forced_local);
  EXPECT_TRUE(optimal_offload(1.0, 0.0, cfg, 0).forced_local);
  EXPECT_EQ(optimal_offload(1.0, 0.0, cfg, 0).bits, 0);
}

TEST(OptimalOffload, MatchesBruteForceAndBisection) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::int64_t> bits(1, 400);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    const ScenarioConfig cfg = toy(bits(rng), u(rng), u(rng));
    const double r = u(rng), fe = u(rng);
    const std::int64_t got = optimal_offload(r, fe, cfg, 0).bits;
    const double d_got = testing::direct_latency(static_cast<double>(got), fe, r, cfg, 0);
    const double d_bf =
        testing::direct_latency(static_cast<double>(brute_force(r, fe, cfg, 0)), fe, r, cfg, 0);
    const double d_bis = testing::direct_latency(
        static_cast<double>(testing::bisection_offload(r, fe, cfg, 0)), fe, r, cfg, 0);
    EXPECT_EQ(d_got, d_bf) << trial;
    EXPECT_EQ(d_got, d_bis) << trial;
  }
}

TEST(MinEdgeCpu, BoundaryCases) {
  const ScenarioConfig cfg = default_scenario();
  const double r = 1e6;
  EXPECT_EQ(min_edge_cpu(cfg.all_local_latency(0), r, cfg, 0).value(), 0.0);
  EXPECT_FALSE(min_edge_cpu(0.999 * latency_floor(r, cfg, 0), r, cfg, 0).has_value());
  EXPECT_FALSE(min_edge_cpu_conic(0.999 * latency_floor(r, cfg, 0), r, cfg, 0).has_value());
}

TEST(MinEdgeCpu, AgreesWithBisectionAndLp) {
  const ScenarioConfig cfg = default_scenario();
  for (double r : {3e5, 1e6, 4e6}) {
    const double lo = latency_floor(r, cfg, 1);
    const double hi = cfg.all_local_latency(1);
    for (double frac : {0.1, 0.5, 0.9}) {
      const double t = lo + frac * (hi - lo);
      const double f = min_edge_cpu(t, r, cfg, 1).value();
      // Balanced latency at f^e, with the continuous offload size.
      const auto balanced = [&](double fe) {
        return latency(continuous_offload(r, fe, cfg, 1), fe, r, cfg, 1).total_s;
      };
      double a = 0.0, b = 1e14;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        (balanced(mid) <= t ? b : a) = mid;
      }
      EXPECT_NEAR(f / b, 1.0, 1e-6);
      EXPECT_NEAR(min_edge_cpu_conic(t, r, cfg, 1).value() / f, 1.0, 1e-6);
    }
  }
}

double grid_objective(const std::vector<double>& rates, const ScenarioConfig& cfg, int points) {
  double best = INFINITY;
  const double f = cfg.edge_cpu_total_hz;
  for (int i = 0; i <= points; ++i) {
    const double f0 = f * i / points, f1 = f - f0;
    double worst = 0.0;
    const double fe[2] = {f0, f1};
    for (int k = 0; k < 2; ++k) {
      const auto l = testing::bisection_offload(rates[k], fe[k], cfg, k);
      worst = std::max(worst, testing::direct_latency(static_cast<double>(l), fe[k], rates[k], cfg, k));
    }
    best = std::min(best, worst);
  }
  return best;
}

TEST(Allocate, MatchesGridOnTwoWds) {
  ScenarioConfig cfg = default_scenario();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lr(std::log(2e5), std::log(5e6));
  std::uniform_real_distribution<double> lf(std::log(1e9), std::log(5e10));
  for (int trial = 0; trial < 4; ++trial) {
    cfg.edge_cpu_total_hz = std::exp(lf(rng));
    const std::vector<double> rates{std::exp(lr(rng)), std::exp(lr(rng))};
    const ComputePlan plan = allocate(rates, cfg);
    const double grid = grid_objective(rates, cfg, 10000);
    EXPECT_NEAR(plan.objective_s / grid, 1.0, 1e-3) << trial;
    double sum = 0.0;
    for (int k = 0; k < 2; ++k) {
      sum += plan.edge_cpu_hz[k];
      EXPECT_GE(plan.offload_bits[k], 0);
      EXPECT_LE(plan.offload_bits[k], cfg.data_bits[k]);
    }
    EXPECT_LE(sum, cfg.edge_cpu_total_hz);
  }
}

TEST(Allocate, IdenticalWdsSplitEvenly) {
  ScenarioConfig cfg = default_scenario();
  cfg.data_bits = {300000, 300000};
  cfg.cycles_per_bit = {750.0, 750.0};
  cfg.local_cpu_hz = {5e8, 5e8};
  const ComputePlan plan = allocate({1e6, 1e6}, cfg);
  EXPECT_NEAR(plan.edge_cpu_hz[0] / plan.edge_cpu_hz[1], 1.0, 1e-4);
  EXPECT_EQ(plan.offload_bits[0], plan.offload_bits[1]);
}

TEST(Allocate, ZeroRateWdStaysLocal) {
  const ScenarioConfig cfg = default_scenario();
  const ComputePlan plan = allocate({0.0, 2e6}, cfg);
  EXPECT_EQ(plan.offload_bits[0], 0);
  EXPECT_EQ(plan.edge_cpu_hz[0], 0.0);
  EXPECT_NEAR(plan.objective_s, cfg.all_local_latency(0), 1e-12);
}

TEST(Allocate, MonotoneInCpuAndRates) {
  ScenarioConfig cfg = default_scenario();
  const std::vector<double> rates{8e5, 1.5e6};
  double prev = INFINITY;
  for (double f : {1e9, 5e9, 2e10, 8e10}) {
    cfg.edge_cpu_total_hz = f;
    const double t = allocate(rates, cfg).objective_s;
    EXPECT_LE(t, prev * (1.0 + 2e-4));
    prev = t;
  }
  cfg = default_scenario();
  prev = INFINITY;
  for (double r : {2e5, 1e6, 5e6}) {
    const double t = allocate({r, r}, cfg).objective_s;
    EXPECT_LE(t, prev * (1.0 + 2e-4));
    prev = t;
  }
}

TEST(Allocate, SingleWdMatchesClosedForm) {
  const ScenarioConfig cfg = testing::small_scenario(1, 0, 1, 5, 2);
  for (double r : {3e5, 2e6}) {
    const ComputePlan plan = allocate({r}, cfg);
    const double closed = latency(static_cast<double>(single_offload(r, cfg)),
                                  cfg.edge_cpu_total_hz, r, cfg, 0)
                              .total_s;
    EXPECT_NEAR(plan.objective_s / closed, 1.0, 2e-4);
  }
}

TEST(Allocate, BalanceHoldsAtReturnedPlan) {
  const ScenarioConfig cfg = default_scenario();
  const std::vector<double> rates{1e6, 3e6};
  const ComputePlan plan = allocate(rates, cfg);
  for (int k = 0; k < 2; ++k) {
    const double l = static_cast<double>(plan.offload_bits[k]);
    const LatencyRow row = latency(l, plan.edge_cpu_hz[k], rates[k], cfg, k);
    const double per_bit = cfg.cycles_per_bit[k] / cfg.local_cpu_hz[k] + 1.0 / rates[k] +
                           cfg.cycles_per_bit[k] / plan.edge_cpu_hz[k];
    EXPECT_LE(std::abs(row.local_s - row.edge_s), per_bit);
  }
}

}  // namespace
}  // namespace irsmec
