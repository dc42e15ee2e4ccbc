#include "emt/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emt/errors.hpp"
#include "emt/rng.hpp"

namespace emt::feedback {

double TargetPath::operator()(double t) const {
  if (times.empty()) return constant;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

void TargetPath::validate() const {
  if (times.size() != values.size()) throw InputError("target table times and values differ in length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InputError("target table times must be strictly increasing");
  }
}

void FeedbackParams::validate() const {
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (noise_sd < 0.0) throw DomainError("noise_sd must be >= 0");
  if (gamma0 < 0.0) throw DomainError("gamma0 must be >= 0");
  e_target.validate();
}

std::vector<FeedbackState> simulate_loop(const FeedbackParams& params) {
  params.validate();
  std::function<double(double)> phi = params.phi;
  if (!phi) phi = [gain = params.phi_gain](double a) { return gain * a; };
  Rng rng(derive_stream(params.seed, 0));
  const double dt = params.dt;
  const double noise_scale = params.noise_sd * std::sqrt(dt);

  std::vector<FeedbackState> traj;
  traj.reserve(params.horizon + 1);

  FeedbackState s;
  s.o_val = params.o0;
  s.a_sig = params.a0;
  s.gamma = params.gamma0;
  s.eps_err = params.e_target(0.0) - s.o_val;
  traj.push_back(s);

  for (std::size_t k = 0; k < params.horizon; ++k) {
    const double t = s.t;
    const double g = s.gamma;
    auto da = [&](double tt, double o) { return g * (params.e_target(tt) - o); };

    const double ka1 = da(t, s.o_val);
    const double ko1 = phi(s.a_sig);
    const double ka2 = da(t + 0.5 * dt, s.o_val + 0.5 * dt * ko1);
    const double ko2 = phi(s.a_sig + 0.5 * dt * ka1);
    const double ka3 = da(t + 0.5 * dt, s.o_val + 0.5 * dt * ko2);
    const double ko3 = phi(s.a_sig + 0.5 * dt * ka2);
    const double ka4 = da(t + dt, s.o_val + dt * ko3);
    const double ko4 = phi(s.a_sig + dt * ka3);

    FeedbackState next;
    // Multiplying the step index avoids accumulated drift in t.
    next.t = static_cast<double>(k + 1) * dt;
    next.a_sig = s.a_sig + dt / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    next.o_val = s.o_val + dt / 6.0 * (ko1 + 2.0 * ko2 + 2.0 * ko3 + ko4);
    if (noise_scale > 0.0) next.o_val += noise_scale * rng.normal();
    next.eps_err = params.e_target(next.t) - next.o_val;
    next.gamma = std::max(0.0, s.gamma + params.theta_meta * (next.eps_err * next.eps_err - s.eps_err * s.eps_err));

    if (!std::isfinite(next.a_sig) || !std::isfinite(next.o_val) || !std::isfinite(next.gamma)) {
      throw NumericError("feedback loop diverged at step " + std::to_string(k + 1));
    }
    traj.push_back(next);
    s = next;
  }
  return traj;
}

LoopDiagnostics loop_diagnostics(std::span<const FeedbackState> traj, double settle_threshold) {
  if (traj.empty()) throw InputError("empty trajectory");
  const double e0 = traj.front().eps_err * traj.front().eps_err + traj.front().a_sig * traj.front().a_sig;

  LoopDiagnostics d;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj[i];
    d.energy_drift = std::max(d.energy_drift, std::abs(s.eps_err * s.eps_err + s.a_sig * s.a_sig - e0));
    if (i >= traj.size() / 2) d.max_abs_eps = std::max(d.max_abs_eps, std::abs(s.eps_err));
  }
  d.settled = d.max_abs_eps < settle_threshold;
  return d;
}

}  // namespace emt::feedback
