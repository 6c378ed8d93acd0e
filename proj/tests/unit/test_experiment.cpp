#include <gtest/gtest.h>

#include <sstream>

#include "irsmec/errors.hpp"
#include "irsmec/experiment.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace irsmec {
namespace {

using nlohmann::json;

SweepSpec small_spec() {
  SweepSpec spec;
  spec.parameter = SweepParameter::WdDistance;
  spec.values = {50.0, 60.0, 70.0, 80.0, 100.0};
  spec.schemes = {Scheme::NoIrs, Scheme::RandomPhase};
  spec.seeds = 3;
  spec.master_seed = 7;
  return spec;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Scheme, NamesRoundTrip) {
  for (Scheme s : {Scheme::Sdr, Scheme::Sca, Scheme::NoIrs, Scheme::NoDirect, Scheme::RandomPhase}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_FALSE(parse_scheme("SDR").has_value());
}

TEST(Scheme, BaselineChannels) {
  const ChannelSet ch = synthesize(default_scenario(), 2);
  EXPECT_EQ(scheme_channels(Scheme::NoIrs, ch).cascade().norm(), 0.0);
  EXPECT_EQ(scheme_channels(Scheme::NoDirect, ch).direct().norm(), 0.0);
  EXPECT_TRUE(scheme_channels(Scheme::Sca, ch) == ch);
}

TEST(Scheme, NoDirectAtVanishingPowerIsAllLocal) {
  ScenarioConfig cfg = testing::small_scenario(2, 2, 3, 3, 2);
  cfg.transmit_power_mw = 1e-30;
  const BcdResult res = run_scheme(Scheme::NoDirect, synthesize(cfg, 1), cfg, 1);
  EXPECT_NEAR(res.report.objective_s, cfg.all_local_latency(), 1e-12);
}

TEST(Scheme, NoIrsNeverBeatsOptimized) {
  const ScenarioConfig cfg = testing::small_scenario(2, 2, 3, 3, 2);
  for (std::uint64_t seed : {1u, 2u}) {
    const ChannelSet ch = synthesize(cfg, seed);
    const double opt = run_scheme(Scheme::Sca, ch, cfg, seed).report.objective_s;
    const double base = run_scheme(Scheme::NoIrs, ch, cfg, seed).report.objective_s;
    EXPECT_LE(opt, base * (1.0 + 1e-3)) << seed;
  }
}

TEST(Sweep, ApplyValueConversions) {
  const ScenarioConfig base = default_scenario();
  EXPECT_DOUBLE_EQ(apply_sweep_value(base, SweepParameter::WdDistance, 90.0).wd_positions[0].x,
                   90.0);
  EXPECT_DOUBLE_EQ(apply_sweep_value(base, SweepParameter::EdgeCpu, 3e10).edge_cpu_total_hz, 3e10);
  EXPECT_NEAR(apply_sweep_value(base, SweepParameter::TransmitPower, 10.0).transmit_power_mw, 10.0,
              1e-12);
  EXPECT_NEAR(apply_sweep_value(base, SweepParameter::IciRatio, 20.0).ici_power_mw,
              100.0 * base.noise_power_mw, 1e-24);
  const ScenarioConfig it = apply_sweep_value(base, SweepParameter::Iterations, 4.0);
  EXPECT_EQ(it.caps.outer, 4);
  EXPECT_LE(it.tolerances.outer, 1e-300);
  EXPECT_GT(it.tolerances.outer, 0.0);
  EXPECT_THROW(apply_sweep_value(base, SweepParameter::Iterations, 2.5), ConfigError);
  EXPECT_THROW(apply_sweep_value(base, SweepParameter::EdgeCpu, -1.0), ConfigError);
}

TEST(Sweep, SpecParsing) {
  const SweepSpec spec = sweep_spec_from_json_text(
      R"({"parameter": "edge_cpu", "values": [1e10, 2e10], "schemes": ["sca", "no_irs"],
          "seeds": 4, "master_seed": 9, "output": "out.csv"})");
  EXPECT_EQ(spec.parameter, SweepParameter::EdgeCpu);
  EXPECT_EQ(spec.values.size(), 2u);
  EXPECT_EQ(spec.schemes[1], Scheme::NoIrs);
  EXPECT_EQ(spec.seeds, 4);
  EXPECT_EQ(spec.master_seed, 9u);
  EXPECT_EQ(spec.output, "out.csv");

  EXPECT_THROW(sweep_spec_from_json_text(R"({"parameter": "wd_distance"})"), ConfigError);
  EXPECT_THROW(sweep_spec_from_json_text(R"({"parameter": "mass", "values": [1]})"), ConfigError);
  EXPECT_THROW(sweep_spec_from_json_text(R"({"parameter": "edge_cpu", "values": []})"),
               ConfigError);
  EXPECT_THROW(sweep_spec_from_json_text(R"({"parameter": "edge_cpu", "values": [1], "x": 1})"),
               ConfigError);
  EXPECT_THROW(
      sweep_spec_from_json_text(R"({"parameter": "edge_cpu", "values": [1], "schemes": ["?"]})"),
      ConfigError);
  EXPECT_THROW(sweep_spec_from_json_text("not json"), ConfigError);
}

TEST(Sweep, SeedsArePairedAcrossSchemes) {
  EXPECT_EQ(channel_seed(7, 2), channel_seed(7, 2));
  EXPECT_NE(channel_seed(7, 2), channel_seed(7, 3));
  EXPECT_NE(channel_seed(7, 2), run_seed(7, 2));
}

class SmallSweep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { rows_ = new std::vector<SweepRow>(run_sweep(small_spec(), default_scenario(), 1)); }
  static void TearDownTestSuite() {
    delete rows_;
    rows_ = nullptr;
  }
  static std::vector<SweepRow>* rows_;
};

std::vector<SweepRow>* SmallSweep::rows_ = nullptr;

TEST_F(SmallSweep, CardinalityOrderAndSchema) {
  ASSERT_EQ(rows_->size(), 30u);
  EXPECT_EQ((*rows_)[0].value, 50.0);
  EXPECT_EQ((*rows_)[0].scheme, Scheme::NoIrs);
  EXPECT_EQ((*rows_)[3].scheme, Scheme::RandomPhase);
  EXPECT_EQ((*rows_)[29].seed, 2);
  const auto csv = lines(rows_to_csv(*rows_, true));
  ASSERT_EQ(csv.size(), 31u);
  EXPECT_EQ(csv[0], "sweep_param,value,scheme,seed,t_ms,per_wd_latency_ms,ell_bits,fe_cycles,iters,wall_ms");
  for (std::size_t i = 1; i < csv.size(); ++i) {
    EXPECT_EQ(std::count(csv[i].begin(), csv[i].end(), ','), 9) << csv[i];
    EXPECT_EQ(csv[i].substr(0, 12), "wd_distance,");
    EXPECT_EQ(csv[i].substr(csv[i].size() - 2), ",0");
  }
}

TEST_F(SmallSweep, RepeatIsByteIdentical) {
  const auto again = run_sweep(small_spec(), default_scenario(), 2);
  EXPECT_EQ(rows_to_csv(*rows_, true), rows_to_csv(again, true));
  EXPECT_EQ(rows_to_jsonl(*rows_), rows_to_jsonl(again));
}

TEST_F(SmallSweep, LatencyReDerivableFromLog) {
  const ScenarioConfig base = default_scenario();
  for (const std::string& line : lines(rows_to_jsonl(*rows_))) {
    const json j = json::parse(line);
    const ScenarioConfig cfg =
        apply_sweep_value(base, SweepParameter::WdDistance, j.at("value").get<double>());
    const Scheme scheme = *parse_scheme(j.at("scheme").get<std::string>());
    const ChannelSet ch =
        scheme_channels(scheme, synthesize(cfg, j.at("channel_seed").get<std::uint64_t>()));
    ComputePlan plan;
    plan.offload_bits = j.at("ell_bits").get<std::vector<std::int64_t>>();
    plan.edge_cpu_hz = j.at("fe_cycles").get<std::vector<double>>();
    MudMatrix w(cfg.receive_dim(), cfg.num_wds);
    for (int k = 0; k < cfg.num_wds; ++k) {
      for (int m = 0; m < cfg.receive_dim(); ++m) {
        const auto& e = j.at("w")[k][m];
        w(m, k) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    }
    const auto angles = j.at("theta").get<std::vector<double>>();
    const PhaseVector theta(Eigen::Map<const Eigen::VectorXd>(angles.data(),
                                                              static_cast<Eigen::Index>(angles.size())));
    const double t = evaluate(plan, w, ch, theta, cfg).objective_s;
    EXPECT_NEAR(t, j.at("t_ms").get<double>() * 1e-3, 1e-9) << line.substr(0, 60);
  }
}

}  // namespace
}  // namespace irsmec
