#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace irsmec {

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Position& a, const Position& b);

/// Per-link-type pair of values (WD-BS, WD-IRS, IRS-BS).
struct LinkParameters {
  double wd_bs = 0.0;
  double wd_irs = 0.0;
  double irs_bs = 0.0;
};

/// Convergence thresholds. All relative except `feasibility`.
struct Tolerances {
  double allocation = 1e-4;   // bisection width for the compute split
  double detector = 1e-4;     // detector bisection and SDR alternation
  double reflect = 1e-4;      // SCA alternation
  double outer = 1e-3;        // relative objective change of the outer loop
  double feasibility = 1e-7;  // conic feasibility tolerance
};

struct IterationCaps {
  int outer = 30;
  int inner = 20;
  int bisection = 60;
};

inline constexpr double kLineOfSight = std::numeric_limits<double>::infinity();

/// Every physical, computing and algorithmic parameter of one scenario.
/// Units: Hz, mW, bits, cycles/bit, cycles/s, metres, seconds.
struct ScenarioConfig {
  int num_wds = 2;
  int num_irs = 2;
  int num_bs = 5;
  int elements_per_irs = 10;
  int antennas_per_bs = 2;

  double bandwidth_hz = 1e6;
  double transmit_power_mw = 1.0;
  double noise_power_mw = 3.98e-12;
  double ici_power_mw = 0.0;

  std::vector<std::int64_t> data_bits{250'000, 350'000};
  std::vector<double> cycles_per_bit{700.0, 800.0};
  std::vector<double> local_cpu_hz{4e8, 6e8};
  double edge_cpu_total_hz = 50e9;

  std::vector<Position> bs_positions;
  std::vector<Position> irs_positions;
  std::vector<Position> wd_positions;

  LinkParameters path_loss_exponent{4.6, 2.2, 2.8};
  LinkParameters rician_factor{0.0, 0.0, kLineOfSight};
  double reference_gain = 1e-3;  // -30 dB
  double reference_distance_m = 1.0;

  Tolerances tolerances;
  IterationCaps caps;
  int randomization_draws = 1000;
  std::uint64_t seed = 1;

  int reflect_dim() const { return num_irs * elements_per_irs; }
  int receive_dim() const { return num_bs * antennas_per_bs; }
  double effective_noise_mw() const { return noise_power_mw + ici_power_mw; }
  double all_local_latency(int k) const;
  double all_local_latency() const;
};

/// Default two-WD, five-BS, two-IRS deployment with the WDs at 60 m.
ScenarioConfig default_scenario();

/// Places WD k at (distance, spacing * k, height).
void place_wds(ScenarioConfig& cfg, double distance_m, double spacing_m = 5.0,
               double height_m = 1.0);

/// BS b at (40 b, -200, 3); IRSs at (60, 10, 6) and (100, 10, 6), extended
/// every 40 m along x when more IRSs are requested.
void place_default_infrastructure(ScenarioConfig& cfg);

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& cfg);

ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::filesystem::path& path);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

}  // namespace irsmec
