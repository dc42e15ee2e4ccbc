#include <doctest.h>

#include <cmath>
#include <numbers>

#include "emt/errors.hpp"
#include "emt/feedback.hpp"

using namespace emt::feedback;

namespace {

FeedbackParams harmonic(double dt, std::size_t steps) {
  FeedbackParams p;
  p.gamma0 = 1.0;
  p.theta_meta = 0.0;
  p.phi_gain = 1.0;
  p.e_target.constant = 1.0;
  p.dt = dt;
  p.horizon = steps;
  return p;
}

}  // namespace

TEST_CASE("simulate_loop: harmonic closed form") {
  const double dt = 1e-3;
  const auto traj = simulate_loop(harmonic(dt, 6284));
  REQUIRE(traj.size() == 6285);
  double worst = 0.0;
  for (const auto& s : traj) {
    worst = std::max(worst, std::abs(s.o_val - (1.0 - std::cos(s.t))));
    worst = std::max(worst, std::abs(s.a_sig - std::sin(s.t)));
  }
  // RK4 global error is O(dt^4); 1e-9 leaves a wide margin.
  CHECK(worst < 1e-9);
  const auto& at_pi = traj[static_cast<std::size_t>(std::lround(std::numbers::pi / dt))];
  CHECK(std::abs(at_pi.o_val - 2.0) < 1e-6);
  CHECK(loop_diagnostics(traj).energy_drift < 1e-6);
}

TEST_CASE("simulate_loop: zero sensitivity decouples the loop") {
  auto p = harmonic(0.01, 500);
  p.gamma0 = 0.0;
  p.o0 = 0.5;
  p.a0 = 0.3;
  const auto traj = simulate_loop(p);
  for (const auto& s : traj) {
    CHECK(s.a_sig == 0.3);
    CHECK(s.o_val == doctest::Approx(0.5 + 0.3 * s.t).epsilon(1e-12));
  }
}

TEST_CASE("simulate_loop: zero error is a fixed point") {
  auto p = harmonic(0.01, 1000);
  p.o0 = 1.0;
  const auto traj = simulate_loop(p);
  for (const auto& s : traj) {
    CHECK(s.eps_err == 0.0);
    CHECK(s.a_sig == 0.0);
  }
  const auto d = loop_diagnostics(traj);
  CHECK(d.settled);
  CHECK(d.max_abs_eps == 0.0);
}

TEST_CASE("simulate_loop: meta-learning never drives gamma negative") {
  auto p = harmonic(0.01, 3000);
  p.theta_meta = 2.0;
  p.noise_sd = 0.05;
  p.seed = 4;
  for (const auto& s : simulate_loop(p)) CHECK(s.gamma >= 0.0);
}

TEST_CASE("simulate_loop: noisy runs are reproducible and seed-dependent") {
  auto p = harmonic(0.01, 200);
  p.noise_sd = 0.1;
  p.seed = 1;
  const auto a = simulate_loop(p);
  const auto b = simulate_loop(p);
  p.seed = 2;
  const auto c = simulate_loop(p);
  CHECK(a.back().o_val == b.back().o_val);
  CHECK(a.back().o_val != c.back().o_val);
}

TEST_CASE("simulate_loop: divergence reports the step") {
  auto p = harmonic(0.1, 5000);
  p.phi = [](double a) { return std::exp(a * a); };
  try {
    (void)simulate_loop(p);
    FAIL("expected NumericError");
  } catch (const emt::NumericError& e) {
    CHECK(std::string(e.what()).find("diverged at step") != std::string::npos);
  }
}

TEST_CASE("loop_diagnostics: aggressive meta-learning does not settle") {
  auto p = harmonic(0.01, 4000);
  p.theta_meta = 5.0;
  const auto traj = simulate_loop(p);
  CHECK_FALSE(loop_diagnostics(traj, 1e-3).settled);
}

TEST_CASE("TargetPath interpolation") {
  TargetPath path;
  path.times = {0.0, 1.0, 3.0};
  path.values = {0.0, 2.0, 2.0};
  CHECK(path(-1.0) == 0.0);
  CHECK(path(0.5) == 1.0);
  CHECK(path(2.0) == 2.0);
  CHECK(path(10.0) == 2.0);
  path.values = {0.0, 1.0};
  CHECK_THROWS(path.validate());
  TargetPath flat;
  flat.constant = 3.5;
  CHECK(flat(100.0) == 3.5);
}
