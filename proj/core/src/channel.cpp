#include "irsmec/channel.hpp"

#include <numbers>

#include "irsmec/errors.hpp"
#include "json.hpp"

namespace irsmec {

namespace {

constexpr std::uint32_t kDirectTag = 1;
constexpr std::uint32_t kReflectTag = 2;
constexpr std::uint32_t kCascadeTag = 3;

void check_shape(const char* block, const CMatrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(block, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                    ", got " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()));
  }
}

}  // namespace

ChannelDims dims_of(const ScenarioConfig& cfg) {
  return {cfg.num_wds, cfg.num_bs, cfg.antennas_per_bs, cfg.num_irs, cfg.elements_per_irs};
}

ChannelSet::ChannelSet(ChannelDims dims, CMatrix direct, CMatrix reflect, CMatrix cascade)
    : dims_(dims), direct_(std::move(direct)), reflect_(std::move(reflect)),
      cascade_(std::move(cascade)) {
  check_shape("direct", direct_, dims_.receive_dim(), dims_.num_wds);
  check_shape("reflect", reflect_, dims_.reflect_dim(), dims_.num_wds);
  check_shape("cascade", cascade_, dims_.receive_dim(), dims_.reflect_dim());
  if (!direct_.allFinite() || !reflect_.allFinite() || !cascade_.allFinite()) {
    throw DimensionError("channels", "non-finite entry");
  }
}

ChannelSet ChannelSet::without_cascade() const {
  return ChannelSet(dims_, direct_, reflect_, CMatrix::Zero(cascade_.rows(), cascade_.cols()));
}

ChannelSet ChannelSet::without_direct() const {
  return ChannelSet(dims_, CMatrix::Zero(direct_.rows(), direct_.cols()), reflect_, cascade_);
}

bool ChannelSet::operator==(const ChannelSet& other) const {
  return dims_ == other.dims_ && direct_ == other.direct_ && reflect_ == other.reflect_ &&
         cascade_ == other.cascade_;
}

PhaseVector::PhaseVector(Eigen::VectorXd angles) : angles_(std::move(angles)) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& a : angles_) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
  }
}

PhaseVector PhaseVector::zeros(int size) { return PhaseVector(Eigen::VectorXd::Zero(size)); }

PhaseVector PhaseVector::from_coefficients(const CVector& v) {
  Eigen::VectorXd angles(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) angles(n) = std::arg(v(n));
  return PhaseVector(std::move(angles));
}

PhaseVector PhaseVector::uniform_random(int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXd angles(size);
  for (int n = 0; n < size; ++n) angles(n) = u(rng);
  return PhaseVector(std::move(angles));
}

CVector PhaseVector::coefficients() const {
  CVector v(angles_.size());
  for (Eigen::Index n = 0; n < angles_.size(); ++n) v(n) = std::polar(1.0, angles_(n));
  return v;
}

double path_loss(double distance_m, double reference_gain, double reference_distance_m,
                 double exponent) {
  if (!(distance_m > 0.0)) {
    throw ConfigError("geometry", "link distance must be > 0 (coincident positions)");
  }
  return reference_gain * std::pow(distance_m / reference_distance_m, -exponent);
}

CMatrix rician_sample(const CMatrix& los, double rician_factor, std::mt19937_64& rng) {
  if (std::isinf(rician_factor)) return los;
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix scatter(los.rows(), los.cols());
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index c = 0; c < los.cols(); ++c) {
    for (Eigen::Index r = 0; r < los.rows(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      scatter(r, c) = Complex(re, im);
    }
  }
  const double los_weight = std::sqrt(rician_factor / (1.0 + rician_factor));
  const double nlos_weight = std::sqrt(1.0 / (1.0 + rician_factor));
  return los_weight * los + nlos_weight * scatter;
}

std::mt19937_64 block_stream(std::uint64_t master_seed, std::uint32_t tag, std::uint32_t a,
                             std::uint32_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32), tag, a, b};
  return std::mt19937_64(seq);
}

ChannelSet synthesize(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  const ChannelDims dims = dims_of(cfg);
  const int m = cfg.antennas_per_bs;
  const int n = cfg.elements_per_irs;
  const auto gain = [&](const Position& a, const Position& b, double exponent) {
    return std::sqrt(path_loss(distance(a, b), cfg.reference_gain, cfg.reference_distance_m,
                               exponent));
  };

  CMatrix direct(dims.receive_dim(), dims.num_wds);
  for (int k = 0; k < cfg.num_wds; ++k) {
    for (int b = 0; b < cfg.num_bs; ++b) {
      auto rng = block_stream(seed, kDirectTag, static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(k));
      const double g = gain(cfg.bs_positions[b], cfg.wd_positions[k], cfg.path_loss_exponent.wd_bs);
      direct.block(b * m, k, m, 1) =
          g * rician_sample(CMatrix::Ones(m, 1), cfg.rician_factor.wd_bs, rng);
    }
  }

  CMatrix reflect(dims.reflect_dim(), dims.num_wds);
  for (int k = 0; k < cfg.num_wds; ++k) {
    for (int i = 0; i < cfg.num_irs; ++i) {
      auto rng = block_stream(seed, kReflectTag, static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(k));
      const double g =
          gain(cfg.irs_positions[i], cfg.wd_positions[k], cfg.path_loss_exponent.wd_irs);
      reflect.block(i * n, k, n, 1) =
          g * rician_sample(CMatrix::Ones(n, 1), cfg.rician_factor.wd_irs, rng);
    }
  }

  CMatrix cascade(dims.receive_dim(), dims.reflect_dim());
  for (int b = 0; b < cfg.num_bs; ++b) {
    for (int i = 0; i < cfg.num_irs; ++i) {
      auto rng = block_stream(seed, kCascadeTag, static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(i));
      const double g =
          gain(cfg.bs_positions[b], cfg.irs_positions[i], cfg.path_loss_exponent.irs_bs);
      cascade.block(b * m, i * n, m, n) =
          g * rician_sample(CMatrix::Ones(m, n), cfg.rician_factor.irs_bs, rng);
    }
  }
  return ChannelSet(dims, std::move(direct), std::move(reflect), std::move(cascade));
}

CVector effective_channel(const ChannelSet& channels, const PhaseVector& theta, int k) {
  const auto& d = channels.dims();
  if (theta.size() != d.reflect_dim()) {
    throw DimensionError("theta", "expected " + std::to_string(d.reflect_dim()) + " phases, got " +
                                      std::to_string(theta.size()));
  }
  if (k < 0 || k >= d.num_wds) throw DimensionError("wd", "index out of range");
  const CVector v = theta.coefficients();
  CVector h = channels.direct().col(k);
  if (d.reflect_dim() > 0) {
    h += channels.cascade() * v.cwiseProduct(channels.reflect().col(k));
  }
  return h;
}

CMatrix effective_channels(const ChannelSet& channels, const PhaseVector& theta) {
  const auto& d = channels.dims();
  if (theta.size() != d.reflect_dim()) {
    throw DimensionError("theta", "expected " + std::to_string(d.reflect_dim()) + " phases, got " +
                                      std::to_string(theta.size()));
  }
  CMatrix h = channels.direct();
  if (d.reflect_dim() > 0) {
    const CVector v = theta.coefficients();
    h += channels.cascade() * (v.asDiagonal() * channels.reflect());
  }
  return h;
}

namespace {

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j, const char* block, Eigen::Index rows,
                         Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw DimensionError(block, "row count mismatch");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError(block, "column count mismatch");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = Complex(row[c].at(0).get<double>(), row[c].at(1).get<double>());
    }
  }
  return m;
}

}  // namespace

std::string channels_to_json_text(const ChannelSet& channels) {
  const auto& d = channels.dims();
  nlohmann::json j;
  j["dims"] = {{"num_wds", d.num_wds},
               {"num_bs", d.num_bs},
               {"antennas_per_bs", d.antennas_per_bs},
               {"num_irs", d.num_irs},
               {"elements_per_irs", d.elements_per_irs}};
  j["direct"] = matrix_to_json(channels.direct());
  j["reflect"] = matrix_to_json(channels.reflect());
  j["cascade"] = matrix_to_json(channels.cascade());
  return j.dump();
}

ChannelSet channels_from_json_text(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& jd = j.at("dims");
    ChannelDims d{jd.at("num_wds").get<int>(), jd.at("num_bs").get<int>(),
                  jd.at("antennas_per_bs").get<int>(), jd.at("num_irs").get<int>(),
                  jd.at("elements_per_irs").get<int>()};
    return ChannelSet(d, matrix_from_json(j.at("direct"), "direct", d.receive_dim(), d.num_wds),
                      matrix_from_json(j.at("reflect"), "reflect", d.reflect_dim(), d.num_wds),
                      matrix_from_json(j.at("cascade"), "cascade", d.receive_dim(),
                                       d.reflect_dim()));
  } catch (const nlohmann::json::exception& e) {
    throw DimensionError("channels", e.what());
  }
}

}  // namespace irsmec
