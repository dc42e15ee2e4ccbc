#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace emt::feedback {

/// Target trajectory E(t): a constant, or a table interpolated linearly and
/// held flat outside its range.
struct TargetPath {
  double constant = 1.0;
  std::vector<double> times;
  std::vector<double> values;

  [[nodiscard]] double operator()(double t) const;
  void validate() const;
};

struct FeedbackParams {
  double gamma0 = 1.0;
  double theta_meta = 0.0;
  double phi_gain = 1.0;
  double noise_sd = 0.0;
  TargetPath e_target;
  double o0 = 0.0;
  double a0 = 0.0;
  double dt = 1e-3;
  std::size_t horizon = 1000;
  std::uint64_t seed = 0;
  // Replaces the linear map phi(A) = phi_gain * A when set.
  std::function<double(double)> phi;

  void validate() const;
};

struct FeedbackState {
  double t = 0.0;
  double o_val = 0.0;
  double a_sig = 0.0;
  double gamma = 0.0;
  double eps_err = 0.0;
};

/// RK4 on dA/dt = gamma * (E - O), dO/dt = phi(A) with gamma frozen over a
/// step; additive noise noise_sd * sqrt(dt) * N(0,1) on O after each step;
/// then gamma <- max(0, gamma + theta * (eps_{k+1}^2 - eps_k^2)).
/// Returns horizon + 1 states including the initial one.
[[nodiscard]] std::vector<FeedbackState> simulate_loop(const FeedbackParams& params);

struct LoopDiagnostics {
  double energy_drift = 0.0;
  double max_abs_eps = 0.0;  // over the tail half of the trajectory
  bool settled = false;
};

[[nodiscard]] LoopDiagnostics loop_diagnostics(std::span<const FeedbackState> traj, double settle_threshold = 1e-3);

}  // namespace emt::feedback
