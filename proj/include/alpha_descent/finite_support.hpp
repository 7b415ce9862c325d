#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "alpha_descent/model.hpp"

namespace alpha_descent {

/// A problem whose reference measure nu sits on S atoms, so every integral
/// against nu is an exact finite sum. Used as the oracle for the descents.
///
/// Each kernel row is a density with respect to nu:
///   sum_s nu_s * K(j, s) = 1   for every component j,
/// which keeps (alpha-1) b_j + 1 strictly positive for every alpha.
///
/// The problem also exposes a Monte Carlo analogue: atom s is encoded as the
/// one-dimensional point (s), component j as (j), and the analogue kernel
/// draws atom s from component j with probability nu_s * K(j, s). Running the
/// sampling estimators on the analogue targets exactly the quantities that the
/// exact routines compute.
class FiniteSupportProblem {
 public:
  static constexpr double kRowTolerance = 1e-12;

  /// Throws std::invalid_argument on non-positive entries, size mismatches or
  /// a kernel row violating the nu-normalisation.
  FiniteSupportProblem(Eigen::VectorXd nu_weights, Eigen::VectorXd p_values,
                       Eigen::MatrixXd kernel_matrix);
  FiniteSupportProblem(std::vector<Point> support, Eigen::VectorXd nu_weights,
                       Eigen::VectorXd p_values, Eigen::MatrixXd kernel_matrix);

  /// Rescales each row of a positive matrix so that it integrates to one.
  static FiniteSupportProblem with_normalised_kernel(Eigen::VectorXd nu_weights,
                                                     Eigen::VectorXd p_values,
                                                     const Eigen::MatrixXd& raw_kernel);

  std::size_t num_components() const { return static_cast<std::size_t>(kernel_.rows()); }
  std::size_t num_atoms() const { return static_cast<std::size_t>(kernel_.cols()); }

  const std::vector<Point>& support() const { return support_; }
  const Eigen::VectorXd& nu_weights() const { return nu_; }
  const Eigen::VectorXd& p_values() const { return p_; }
  const Eigen::MatrixXd& kernel_matrix() const { return kernel_; }

  /// mu_lambda k(y_s) for every atom.
  Eigen::VectorXd mixture_values(const SimplexWeights& weights) const;

  /// sum_s nu_s p_s.
  double target_mass() const { return nu_.dot(p_); }

  /// Same problem with p replaced by c * p.
  FiniteSupportProblem with_scaled_target(double c) const;

  /// Same kernel and nu with p replaced.
  FiniteSupportProblem with_target(Eigen::VectorXd p_values) const;

  std::shared_ptr<const KernelDensity> atom_kernel() const;
  ParticleSet atom_particles() const;
  Target atom_target() const;
  static Point atom_point(std::size_t index);

 private:
  std::vector<Point> support_;
  Eigen::VectorXd nu_;
  Eigen::VectorXd p_;
  Eigen::MatrixXd kernel_;
};

}  // namespace alpha_descent
