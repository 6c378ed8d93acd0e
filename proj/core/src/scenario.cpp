#include "irsmec/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "irsmec/errors.hpp"
#include "json.hpp"

namespace irsmec {

using nlohmann::json;

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double ScenarioConfig::all_local_latency(int k) const {
  return static_cast<double>(data_bits.at(k)) * cycles_per_bit.at(k) / local_cpu_hz.at(k);
}

double ScenarioConfig::all_local_latency() const {
  double worst = 0.0;
  for (int k = 0; k < num_wds; ++k) worst = std::max(worst, all_local_latency(k));
  return worst;
}

void place_wds(ScenarioConfig& cfg, double distance_m, double spacing_m, double height_m) {
  cfg.wd_positions.clear();
  for (int k = 0; k < cfg.num_wds; ++k) {
    cfg.wd_positions.push_back({distance_m, spacing_m * k, height_m});
  }
}

void place_default_infrastructure(ScenarioConfig& cfg) {
  cfg.bs_positions.clear();
  for (int b = 0; b < cfg.num_bs; ++b) cfg.bs_positions.push_back({40.0 * b, -200.0, 3.0});
  cfg.irs_positions.clear();
  for (int i = 0; i < cfg.num_irs; ++i) cfg.irs_positions.push_back({60.0 + 40.0 * i, 10.0, 6.0});
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  place_default_infrastructure(cfg);
  place_wds(cfg, 60.0);
  return cfg;
}

namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

template <typename T>
void resize_cycling(std::vector<T>& values, int n) {
  if (values.empty() || static_cast<int>(values.size()) == n) return;
  std::vector<T> out(n);
  for (int k = 0; k < n; ++k) out[k] = values[k % values.size()];
  values = std::move(out);
}

double factor_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "los") return kLineOfSight;
    throw ConfigError("rician_factor", "unrecognised value '" + s + "'");
  }
  if (j.is_null()) return kLineOfSight;
  return j.get<double>();
}

json factor_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

std::vector<Position> positions_from_json(const json& j, const char* field) {
  std::vector<Position> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) throw ConfigError(field, "each position must be [x, y, z]");
    out.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return out;
}

json positions_to_json(const std::vector<Position>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back({p.x, p.y, p.z});
  return out;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  require(cfg.num_wds >= 1, "num_wds", "must be >= 1");
  require(cfg.num_irs >= 0, "num_irs", "must be >= 0");
  require(cfg.num_bs >= 1, "num_bs", "must be >= 1");
  require(cfg.elements_per_irs >= 1, "elements_per_irs", "must be >= 1");
  require(cfg.antennas_per_bs >= 1, "antennas_per_bs", "must be >= 1");
  require(positive_finite(cfg.bandwidth_hz), "bandwidth_hz", "must be > 0");
  require(positive_finite(cfg.transmit_power_mw), "transmit_power_mw", "must be > 0");
  require(positive_finite(cfg.noise_power_mw), "noise_power_mw", "must be > 0");
  require(std::isfinite(cfg.ici_power_mw) && cfg.ici_power_mw >= 0.0, "ici_power_mw",
          "must be >= 0");
  require(positive_finite(cfg.edge_cpu_total_hz), "edge_cpu_total_hz", "must be > 0");

  const auto k = static_cast<std::size_t>(cfg.num_wds);
  require(cfg.data_bits.size() == k, "data_bits", "needs one entry per WD");
  require(cfg.cycles_per_bit.size() == k, "cycles_per_bit", "needs one entry per WD");
  require(cfg.local_cpu_hz.size() == k, "local_cpu_hz", "needs one entry per WD");
  for (std::size_t i = 0; i < k; ++i) {
    require(cfg.data_bits[i] >= 0, "data_bits", "must be >= 0");
    require(positive_finite(cfg.cycles_per_bit[i]), "cycles_per_bit", "must be > 0");
    require(positive_finite(cfg.local_cpu_hz[i]), "local_cpu_hz", "must be > 0");
  }
  require(cfg.bs_positions.size() == static_cast<std::size_t>(cfg.num_bs), "bs_positions",
          "needs one entry per BS");
  require(cfg.irs_positions.size() == static_cast<std::size_t>(cfg.num_irs), "irs_positions",
          "needs one entry per IRS");
  require(cfg.wd_positions.size() == k, "wd_positions", "needs one entry per WD");

  for (double e : {cfg.path_loss_exponent.wd_bs, cfg.path_loss_exponent.wd_irs,
                   cfg.path_loss_exponent.irs_bs}) {
    require(std::isfinite(e) && e >= 0.0, "path_loss_exponent", "must be >= 0");
  }
  for (double b : {cfg.rician_factor.wd_bs, cfg.rician_factor.wd_irs, cfg.rician_factor.irs_bs}) {
    require(b >= 0.0 && !std::isnan(b), "rician_factor", "must be >= 0 or inf");
  }
  require(positive_finite(cfg.reference_gain), "reference_gain", "must be > 0");
  require(positive_finite(cfg.reference_distance_m), "reference_distance_m", "must be > 0");

  const auto& t = cfg.tolerances;
  for (double v : {t.allocation, t.detector, t.reflect, t.outer, t.feasibility}) {
    require(positive_finite(v), "tolerances", "must be > 0");
  }
  require(cfg.caps.outer >= 1 && cfg.caps.inner >= 1 && cfg.caps.bisection >= 1, "caps",
          "must be >= 1");
  require(cfg.randomization_draws >= 1, "randomization_draws", "must be >= 1");
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");

  static const std::vector<std::string> known{
      "num_wds",          "num_irs",           "num_bs",           "elements_per_irs",
      "antennas_per_bs",  "bandwidth_hz",      "transmit_power_mw", "noise_power_mw",
      "ici_power_mw",     "data_bits",         "cycles_per_bit",   "local_cpu_hz",
      "edge_cpu_total_hz", "bs_positions",     "irs_positions",    "wd_positions",
      "wd_distance_m",    "path_loss_exponent", "rician_factor",   "reference_gain",
      "reference_distance_m", "tolerances",    "caps",             "randomization_draws",
      "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key, "unknown key");
    }
  }

  ScenarioConfig cfg;
  try {
    cfg.num_wds = j.value("num_wds", cfg.num_wds);
    cfg.num_irs = j.value("num_irs", cfg.num_irs);
    cfg.num_bs = j.value("num_bs", cfg.num_bs);
    cfg.elements_per_irs = j.value("elements_per_irs", cfg.elements_per_irs);
    cfg.antennas_per_bs = j.value("antennas_per_bs", cfg.antennas_per_bs);
    cfg.bandwidth_hz = j.value("bandwidth_hz", cfg.bandwidth_hz);
    cfg.transmit_power_mw = j.value("transmit_power_mw", cfg.transmit_power_mw);
    cfg.noise_power_mw = j.value("noise_power_mw", cfg.noise_power_mw);
    cfg.ici_power_mw = j.value("ici_power_mw", cfg.ici_power_mw);
    if (j.contains("data_bits")) {
      cfg.data_bits.clear();
      for (const auto& v : j["data_bits"]) {
        const double bits = v.get<double>();
        if (bits != std::floor(bits)) throw ConfigError("data_bits", "must be integers");
        cfg.data_bits.push_back(static_cast<std::int64_t>(bits));
      }
    }
    if (j.contains("cycles_per_bit")) cfg.cycles_per_bit = j["cycles_per_bit"].get<std::vector<double>>();
    if (j.contains("local_cpu_hz")) cfg.local_cpu_hz = j["local_cpu_hz"].get<std::vector<double>>();
    cfg.edge_cpu_total_hz = j.value("edge_cpu_total_hz", cfg.edge_cpu_total_hz);

    resize_cycling(cfg.data_bits, cfg.num_wds);
    resize_cycling(cfg.cycles_per_bit, cfg.num_wds);
    resize_cycling(cfg.local_cpu_hz, cfg.num_wds);

    place_default_infrastructure(cfg);
    if (j.contains("bs_positions")) cfg.bs_positions = positions_from_json(j["bs_positions"], "bs_positions");
    if (j.contains("irs_positions")) cfg.irs_positions = positions_from_json(j["irs_positions"], "irs_positions");
    place_wds(cfg, j.value("wd_distance_m", 60.0));
    if (j.contains("wd_positions")) cfg.wd_positions = positions_from_json(j["wd_positions"], "wd_positions");

    if (j.contains("path_loss_exponent")) {
      const auto& p = j["path_loss_exponent"];
      cfg.path_loss_exponent.wd_bs = p.value("wd_bs", cfg.path_loss_exponent.wd_bs);
      cfg.path_loss_exponent.wd_irs = p.value("wd_irs", cfg.path_loss_exponent.wd_irs);
      cfg.path_loss_exponent.irs_bs = p.value("irs_bs", cfg.path_loss_exponent.irs_bs);
    }
    if (j.contains("rician_factor")) {
      const auto& r = j["rician_factor"];
      if (r.contains("wd_bs")) cfg.rician_factor.wd_bs = factor_from_json(r["wd_bs"]);
      if (r.contains("wd_irs")) cfg.rician_factor.wd_irs = factor_from_json(r["wd_irs"]);
      if (r.contains("irs_bs")) cfg.rician_factor.irs_bs = factor_from_json(r["irs_bs"]);
    }
    cfg.reference_gain = j.value("reference_gain", cfg.reference_gain);
    cfg.reference_distance_m = j.value("reference_distance_m", cfg.reference_distance_m);
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      cfg.tolerances.allocation = t.value("allocation", cfg.tolerances.allocation);
      cfg.tolerances.detector = t.value("detector", cfg.tolerances.detector);
      cfg.tolerances.reflect = t.value("reflect", cfg.tolerances.reflect);
      cfg.tolerances.outer = t.value("outer", cfg.tolerances.outer);
      cfg.tolerances.feasibility = t.value("feasibility", cfg.tolerances.feasibility);
    }
    if (j.contains("caps")) {
      const auto& c = j["caps"];
      cfg.caps.outer = c.value("outer", cfg.caps.outer);
      cfg.caps.inner = c.value("inner", cfg.caps.inner);
      cfg.caps.bisection = c.value("bisection", cfg.caps.bisection);
    }
    cfg.randomization_draws = j.value("randomization_draws", cfg.randomization_draws);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ConfigError("<document>", e.what());
  }
  validate(cfg);
  return cfg;
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
  json j;
  j["num_wds"] = cfg.num_wds;
  j["num_irs"] = cfg.num_irs;
  j["num_bs"] = cfg.num_bs;
  j["elements_per_irs"] = cfg.elements_per_irs;
  j["antennas_per_bs"] = cfg.antennas_per_bs;
  j["bandwidth_hz"] = cfg.bandwidth_hz;
  j["transmit_power_mw"] = cfg.transmit_power_mw;
  j["noise_power_mw"] = cfg.noise_power_mw;
  j["ici_power_mw"] = cfg.ici_power_mw;
  j["data_bits"] = cfg.data_bits;
  j["cycles_per_bit"] = cfg.cycles_per_bit;
  j["local_cpu_hz"] = cfg.local_cpu_hz;
  j["edge_cpu_total_hz"] = cfg.edge_cpu_total_hz;
  j["bs_positions"] = positions_to_json(cfg.bs_positions);
  j["irs_positions"] = positions_to_json(cfg.irs_positions);
  j["wd_positions"] = positions_to_json(cfg.wd_positions);
  j["path_loss_exponent"] = {{"wd_bs", cfg.path_loss_exponent.wd_bs},
                             {"wd_irs", cfg.path_loss_exponent.wd_irs},
                             {"irs_bs", cfg.path_loss_exponent.irs_bs}};
  j["rician_factor"] = {{"wd_bs", factor_to_json(cfg.rician_factor.wd_bs)},
                        {"wd_irs", factor_to_json(cfg.rician_factor.wd_irs)},
                        {"irs_bs", factor_to_json(cfg.rician_factor.irs_bs)}};
  j["reference_gain"] = cfg.reference_gain;
  j["reference_distance_m"] = cfg.reference_distance_m;
  j["tolerances"] = {{"allocation", cfg.tolerances.allocation},
                     {"detector", cfg.tolerances.detector},
                     {"reflect", cfg.tolerances.reflect},
                     {"outer", cfg.tolerances.outer},
                     {"feasibility", cfg.tolerances.feasibility}};
  j["caps"] = {{"outer", cfg.caps.outer},
               {"inner", cfg.caps.inner},
               {"bisection", cfg.caps.bisection}};
  j["randomization_draws"] = cfg.randomization_draws;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

}  // namespace irsmec
