#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace emt::gravity {

struct NeedsState {
  Eigen::VectorXd n_vec;  // need intensities, length n
  Eigen::MatrixXd d_mat;  // need-to-sector distances, n x m, all > 0
  Eigen::VectorXd p_vec;  // sector potentials, length m
  double g_resp = 1.0;
  double alpha_g = 1.0;
  double beta_g = 1.0;

  [[nodiscard]] std::size_t needs() const noexcept { return static_cast<std::size_t>(n_vec.size()); }
  [[nodiscard]] std::size_t sectors() const noexcept { return static_cast<std::size_t>(p_vec.size()); }

  /// Dimensions, signs and strictly positive distances. Throws InputError
  /// for shape problems and NumericError for a non-positive distance.
  void validate() const;
  /// Per-need distance used by the scalar field: nearest sector.
  [[nodiscard]] double need_distance(std::size_t i) const;
};

enum class PlanMode { blind, aligned };

struct AllocationPlan {
  Eigen::VectorXd shares;
  PlanMode mode = PlanMode::blind;
};

struct ProductionInputs {
  double a = 1.0;
  double k = 1.0;
  double l = 1.0;
  double alpha = 0.33;
};

struct FlywheelResult {
  std::vector<double> u_blind;    // U(t) for t = 0..horizon
  std::vector<double> u_aligned;
  std::vector<double> coverage_blind;
  std::vector<double> coverage_aligned;
  std::vector<double> output;     // Y(t) per step, index 0 is the initial level
};

struct FlywheelOptions {
  std::size_t horizon = 10;
  double kappa = 0.1;
  // Blind allocation shares. Empty means uniform 1/n.
  std::vector<double> blind_shares;
  // Need importance weights for coverage. Empty means the initial intensities.
  std::vector<double> coverage_weights;
  // A need counts as satisfied once its intensity is at or below this level.
  double satisfied_tol = 1e-12;
};

[[nodiscard]] double need_gravity(double n_i, double d_i, double alpha_g, double beta_g);
[[nodiscard]] double gravity_field(const NeedsState& state);
[[nodiscard]] Eigen::MatrixXd need_sector_flow(const NeedsState& state);
[[nodiscard]] double potential_energy(std::span<const double> n_vec);
[[nodiscard]] double potential_energy(const Eigen::VectorXd& n_vec);

/// Shares proportional to the row sums of the flow matrix; falls back to
/// uniform when every row sum is zero.
[[nodiscard]] AllocationPlan aligned_plan(const NeedsState& state);

[[nodiscard]] FlywheelResult flywheel_compare(const NeedsState& state0, const ProductionInputs& production,
                                              const FlywheelOptions& options);

[[nodiscard]] double coverage_operator(std::span<const bool> satisfied, std::span<const double> weights);

}  // namespace emt::gravity
