#pragma once

#include <optional>
#include <random>
#include <vector>

#include "irsmec/channel.hpp"
#include "irsmec/conic.hpp"
#include "irsmec/latency_model.hpp"
#include "irsmec/scenario.hpp"

namespace irsmec {

/// Received powers as quadratic forms in v. For detector k and transmitter j,
///   P |w_k^H h_j|^2 = |a_kj^H v + d_kj|^2 = v^H C_kj v + 2 Re(v^H u_kj) + |d_kj|^2
/// with a_kj = sqrt(P) diag(h_r,j^H) G^H w_k, d_kj = sqrt(P) w_k^H h_d,j, C = a a^H, u = a d.
class QuadraticForms {
 public:
  QuadraticForms(int num_wds, int dim);

  int num_wds() const { return num_wds_; }
  int dim() const { return dim_; }

  const CVector& a(int k, int j) const { return a_[index(k, j)]; }
  Complex d(int k, int j) const { return d_[index(k, j)]; }
  /// Noise seen by detector k: sigma^2 ||w_k||^2 + sigma_ICI^2.
  double noise(int k) const { return noise_[k]; }

  CMatrix c(int k, int j) const;
  CVector u(int k, int j) const;
  /// [[C, u], [u^H, 0]] of order dim + 1.
  CMatrix lifted(int k, int j) const;

  /// |a_kj^H v + d_kj|^2.
  double power(const CVector& v, int k, int j) const;
  double sinr(const CVector& v, int k) const;

  void set(int k, int j, CVector a, Complex d);
  void set_noise(int k, double n) { noise_[k] = n; }

 private:
  int index(int k, int j) const { return k * num_wds_ + j; }
  int num_wds_;
  int dim_;
  std::vector<CVector> a_;
  std::vector<Complex> d_;
  std::vector<double> noise_;
};

QuadraticForms build_forms(const ChannelSet& channels, const MudMatrix& w,
                           const ScenarioConfig& cfg);

/// Edge latencies of every WD for reflection vector v (unit modulus).
std::vector<double> edge_latencies(const CVector& v, const QuadraticForms& forms,
                                   const ComputePlan& plan, const ScenarioConfig& cfg);
double max_edge_latency(const CVector& v, const QuadraticForms& forms, const ComputePlan& plan,
                        const ScenarioConfig& cfg);

/// F_k = alpha_k(t) (sum_{j != k} |a_kj^H v + d_kj|^2 + n_k) - |a_kk^H v + d_kk|^2.
double f_value(const CVector& v, const QuadraticForms& forms, double t, const ComputePlan& plan,
               const ScenarioConfig& cfg, int k);
/// F_k with the concave part replaced by its tangent at v_prev (a majorizer of F_k).
double f_upper(const CVector& v, const CVector& v_prev, const QuadraticForms& forms, double t,
               const ComputePlan& plan, const ScenarioConfig& cfg, int k);
/// Gradient of f_upper in the real parametrization [Re v; Im v].
Eigen::VectorXd f_upper_gradient(const CVector& v, const CVector& v_prev,
                                 const QuadraticForms& forms, double t, const ComputePlan& plan,
                                 const ScenarioConfig& cfg, int k);

// ---------------------------------------------------------------------------------------------
// Semidefinite relaxation

struct SdrProbe {
  double t = 0.0;
  conic::Status status = conic::Status::NumericalFailure;
  bool feasible = false;
  double margin = 0.0;          // optimal worst scaled constraint value
  double min_eigenvalue = 0.0;  // of the recovered V
  double max_diag_error = 0.0;  // max |V_nn - 1|
  double min_residual = 0.0;    // min_k of the scaled SINR constraint at V
  CMatrix v_lifted;             // empty unless feasible
};

/// Relaxed feasibility at target t; V recovered from the dual of the LMI and renormalized
/// to a unit diagonal.
SdrProbe sdr_feasible(double t, const QuadraticForms& forms, const ComputePlan& plan,
                      const ScenarioConfig& cfg);

/// Best of num_draws Gaussian candidates drawn with covariance V (plus the principal
/// eigenvector); the rank-one case returns the phases of V's factor without sampling.
CVector randomize(const CMatrix& v_lifted, const QuadraticForms& forms, const ComputePlan& plan,
                  const ScenarioConfig& cfg, int num_draws, std::mt19937_64& rng);

struct SdrTrace {
  double t_incumbent = 0.0;
  double t_lo = 0.0;          // largest target proven relaxed-infeasible (or the bracket floor)
  double t_hi = 0.0;          // smallest relaxed-feasible target found
  double t_recomputed = 0.0;  // max edge latency of the randomized v
  bool improved = false;
  std::vector<SdrProbe> probes;
};

struct ReflectResult {
  PhaseVector theta;
  double t = 0.0;  // max edge latency at the returned theta
  bool improved = false;
  int solver_failures = 0;
};

ReflectResult optimize_reflect_sdr(const ChannelSet& channels, const MudMatrix& w,
                                   const ComputePlan& plan, const ScenarioConfig& cfg,
                                   const PhaseVector& incumbent, std::mt19937_64& rng,
                                   SdrTrace* trace = nullptr);

// ---------------------------------------------------------------------------------------------
// Successive convex approximation

struct ScaStep {
  CVector v;                 // accepted (or previous) unit-modulus vector
  double z = 0.0;            // optimal value of the convex surrogate
  conic::Status status = conic::Status::NumericalFailure;
  bool accepted = false;
  double step = 0.0;         // backtracking factor of the accepted point
  double before = 0.0;       // max edge latency at v_prev
  double after = 0.0;        // max edge latency at v
};

/// One surrogate solve at target t with |v_n| <= 1, projection to unit modulus and a strict
/// decrease test on the max edge latency (with backtracking towards v_prev).
ScaStep sca_step(const CVector& v_prev, const QuadraticForms& forms, double t,
                 const ComputePlan& plan, const ScenarioConfig& cfg);

/// Repeated SCA steps at fixed detectors, t re-evaluated after each accepted step.
ReflectResult optimize_reflect_sca(const ChannelSet& channels, const MudMatrix& w,
                                   const ComputePlan& plan, const ScenarioConfig& cfg,
                                   const PhaseVector& incumbent,
                                   std::vector<ScaStep>* steps = nullptr);

}  // namespace irsmec
