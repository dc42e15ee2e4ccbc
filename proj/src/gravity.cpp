#include "emt/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "emt/errors.hpp"
#include "emt/growth.hpp"

namespace emt::gravity {

void NeedsState::validate() const {
  if (d_mat.rows() != n_vec.size() || d_mat.cols() != p_vec.size()) {
    throw InputError("distance matrix must be needs x sectors");
  }
  if (n_vec.size() == 0 || p_vec.size() == 0) throw InputError("needs and sectors must be non-empty");
  if ((n_vec.array() < 0.0).any()) throw DomainError("need intensities must be >= 0");
  if ((p_vec.array() < 0.0).any()) throw DomainError("sector potentials must be >= 0");
  if (g_resp < 0.0 || alpha_g < 0.0 || beta_g < 0.0) throw DomainError("g_resp and elasticities must be >= 0");
  if (!(d_mat.array() > 0.0).all()) throw NumericError("singular flow: every distance D_ij must be > 0");
}

double NeedsState::need_distance(std::size_t i) const {
  return d_mat.row(static_cast<Eigen::Index>(i)).minCoeff();
}

double need_gravity(double n_i, double d_i, double alpha_g, double beta_g) {
  if (!(d_i > 0.0)) throw NumericError("singular gravity: distance must be > 0");
  return std::pow(n_i, alpha_g) / std::pow(d_i, beta_g);
}

double gravity_field(const NeedsState& state) {
  state.validate();
  double total = 0.0;
  for (std::size_t i = 0; i < state.needs(); ++i) {
    total += need_gravity(state.n_vec[static_cast<Eigen::Index>(i)], state.need_distance(i), state.alpha_g,
                          state.beta_g);
  }
  return total;
}

Eigen::MatrixXd need_sector_flow(const NeedsState& state) {
  state.validate();
  const Eigen::MatrixXd bilinear = state.n_vec * state.p_vec.transpose();
  return state.g_resp * bilinear.cwiseQuotient(state.d_mat.cwiseAbs2());
}

double potential_energy(std::span<const double> n_vec) {
  return std::accumulate(n_vec.begin(), n_vec.end(), 0.0, [](double acc, double n) { return acc + n * n; });
}

double potential_energy(const Eigen::VectorXd& n_vec) { return n_vec.squaredNorm(); }

AllocationPlan aligned_plan(const NeedsState& state) {
  const Eigen::VectorXd rows = need_sector_flow(state).rowwise().sum();
  AllocationPlan plan;
  plan.mode = PlanMode::aligned;
  const double total = rows.sum();
  if (total > 0.0) {
    plan.shares = rows / total;
  } else {
    plan.shares = Eigen::VectorXd::Constant(rows.size(), 1.0 / static_cast<double>(rows.size()));
  }
  return plan;
}

double coverage_operator(std::span<const bool> satisfied, std::span<const double> weights) {
  if (satisfied.size() != weights.size()) throw InputError("mask and weights must have the same length");
  double total = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw DomainError("coverage weights must be >= 0");
    total += weights[i];
    if (satisfied[i]) covered += weights[i];
  }
  if (!(total > 0.0)) throw DomainError("coverage weights must not all be zero");
  return covered / total;
}

namespace {

double coverage_of(const Eigen::VectorXd& needs, std::span<const double> weights, double tol) {
  // std::vector<bool> is not contiguous, so it cannot back a span<const bool>.
  const auto n = static_cast<std::size_t>(needs.size());
  auto flags = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) flags[i] = needs[static_cast<Eigen::Index>(i)] <= tol;
  return coverage_operator(std::span<const bool>(flags.get(), n), weights);
}

void decay(Eigen::VectorXd& needs, const Eigen::VectorXd& allocation, double kappa) {
  needs = (needs - kappa * allocation).cwiseMax(0.0);
}

}  // namespace

FlywheelResult flywheel_compare(const NeedsState& state0, const ProductionInputs& production,
                                const FlywheelOptions& options) {
  state0.validate();
  if (options.horizon < 1) throw DomainError("horizon must be >= 1");
  if (!(options.kappa >= 0.0)) throw DomainError("kappa must be >= 0");

  const auto n = static_cast<Eigen::Index>(state0.needs());
  Eigen::VectorXd blind_shares(n);
  if (options.blind_shares.empty()) {
    blind_shares.setConstant(1.0 / static_cast<double>(n));
  } else {
    if (options.blind_shares.size() != state0.needs()) throw InputError("blind_shares length must equal needs");
    blind_shares = Eigen::Map<const Eigen::VectorXd>(options.blind_shares.data(), n);
    if ((blind_shares.array() < 0.0).any() || std::abs(blind_shares.sum() - 1.0) > 1e-9) {
      throw DomainError("blind_shares must be >= 0 and sum to 1");
    }
  }

  std::vector<double> weights = options.coverage_weights;
  if (weights.empty()) weights.assign(state0.n_vec.data(), state0.n_vec.data() + n);
  if (weights.size() != state0.needs()) throw InputError("coverage_weights length must equal needs");

  const double y = growth::cobb_douglas(production.a, production.k, production.l, production.alpha);

  FlywheelResult result;
  NeedsState blind = state0;
  NeedsState aligned = state0;
  auto record = [&] {
    result.u_blind.push_back(potential_energy(blind.n_vec));
    result.u_aligned.push_back(potential_energy(aligned.n_vec));
    result.coverage_blind.push_back(coverage_of(blind.n_vec, weights, options.satisfied_tol));
    result.coverage_aligned.push_back(coverage_of(aligned.n_vec, weights, options.satisfied_tol));
    result.output.push_back(y);
  };

  record();
  for (std::size_t t = 0; t < options.horizon; ++t) {
    const Eigen::VectorXd aligned_shares = aligned_plan(aligned).shares;
    decay(blind.n_vec, y * blind_shares, options.kappa);
    decay(aligned.n_vec, y * aligned_shares, options.kappa);
    record();
  }
  return result;
}

}  // namespace emt::gravity
