#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include "irsmec/scenario.hpp"

namespace irsmec {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct ChannelDims {
  int num_wds = 0;
  int num_bs = 0;
  int antennas_per_bs = 0;
  int num_irs = 0;
  int elements_per_irs = 0;

  int receive_dim() const { return num_bs * antennas_per_bs; }
  int reflect_dim() const { return num_irs * elements_per_irs; }
  bool operator==(const ChannelDims&) const = default;
};

ChannelDims dims_of(const ScenarioConfig& cfg);

/// Stacked direct, reflect and cascade channels of one fading block.
///
/// direct():  MB x K, column k is h_d,k (BS-major stacking of the M-antenna blocks)
/// reflect(): IN x K, column k is h_r,k (IRS-major stacking of the N-element blocks)
/// cascade(): MB x IN, block (b, i) is the IRS i -> BS b matrix
class ChannelSet {
 public:
  ChannelSet() = default;
  /// Throws DimensionError when a block disagrees with `dims`.
  ChannelSet(ChannelDims dims, CMatrix direct, CMatrix reflect, CMatrix cascade);

  const ChannelDims& dims() const { return dims_; }
  const CMatrix& direct() const { return direct_; }
  const CMatrix& reflect() const { return reflect_; }
  const CMatrix& cascade() const { return cascade_; }

  /// Copy with the cascade zeroed (no reflected path).
  ChannelSet without_cascade() const;
  /// Copy with every direct link zeroed (blocked line of sight).
  ChannelSet without_direct() const;

  bool operator==(const ChannelSet& other) const;

 private:
  ChannelDims dims_;
  CMatrix direct_;
  CMatrix reflect_;
  CMatrix cascade_;
};

/// Unit-amplitude IRS reflection coefficients v_n = exp(j theta_n).
class PhaseVector {
 public:
  PhaseVector() = default;
  /// Angles are wrapped into [0, 2 pi).
  explicit PhaseVector(Eigen::VectorXd angles);
  static PhaseVector zeros(int size);
  /// Takes the argument of each entry; the modulus is discarded.
  static PhaseVector from_coefficients(const CVector& v);
  static PhaseVector uniform_random(int size, std::mt19937_64& rng);

  int size() const { return static_cast<int>(angles_.size()); }
  const Eigen::VectorXd& angles() const { return angles_; }
  CVector coefficients() const;

 private:
  Eigen::VectorXd angles_;
};

/// C0 (d / d0)^-kappa. Throws ConfigError when d <= 0.
double path_loss(double distance_m, double reference_gain, double reference_distance_m,
                 double exponent);

/// sqrt(beta/(1+beta)) H_los + sqrt(1/(1+beta)) H_nlos with CN(0,1) scatter;
/// beta = inf returns H_los untouched.
CMatrix rician_sample(const CMatrix& los, double rician_factor, std::mt19937_64& rng);

/// Substream generator for one channel block; blocks never share state, so adding a WD
/// or an IRS leaves the draws of the other blocks unchanged.
std::mt19937_64 block_stream(std::uint64_t master_seed, std::uint32_t tag, std::uint32_t a,
                             std::uint32_t b);

ChannelSet synthesize(const ScenarioConfig& cfg, std::uint64_t seed);
inline ChannelSet synthesize(const ScenarioConfig& cfg) { return synthesize(cfg, cfg.seed); }

/// h_k = h_d,k + G diag(v) h_r,k.
CVector effective_channel(const ChannelSet& channels, const PhaseVector& theta, int k);
/// All effective channels as the columns of an MB x K matrix.
CMatrix effective_channels(const ChannelSet& channels, const PhaseVector& theta);

/// JSON with complex entries stored as [re, im] pairs, matrices row-major.
std::string channels_to_json_text(const ChannelSet& channels);
ChannelSet channels_from_json_text(const std::string& text);

}  // namespace irsmec
