#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alpha_descent/divergence.hpp"
#include "alpha_descent/finite_support.hpp"
#include "alpha_descent/model.hpp"

namespace alpha_descent {

enum class GradientMode { kExact, kMonteCarlo };

/// The objective's gradient b_j = int k(theta_j, y) f'_alpha(mu k(y)/p(y)) nu(dy)
/// at each component, either exact or estimated.
struct GradVector {
  Eigen::VectorXd values;
  GradientMode mode = GradientMode::kExact;
  /// Number of samples behind a Monte Carlo estimate; zero when exact.
  std::size_t sample_count = 0;
  double alpha = 0.0;
  /// log((alpha-1) b_j + 1) formed directly in log domain, when the estimator
  /// guarantees that base is positive. Far in the tails the base can be
  /// smaller than the rounding error of 1 + (alpha-1) b_j, and the steps then
  /// use this vector instead of b. Empty for alpha = 1 and for the literal
  /// Monte Carlo form.
  std::optional<Eigen::VectorXd> log_base;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t j) const { return values[static_cast<Eigen::Index>(j)]; }

  /// sum_j lambda_j b_j, the gradient averaged under the mixing weights.
  double weighted_mean(const SimplexWeights& weights) const;
};

/// b_j = sum_s nu_s K(j, s) f'_alpha(mu_lambda k(y_s) / p_s), with log_base
/// set for alpha != 1.
GradVector b_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                   double alpha);

/// M independent draws from mu_lambda k: a component j ~ lambda, then y ~ k(theta_j, .).
std::vector<Point> sample_mixture(const MixtureState& state, std::size_t count, Rng& rng);

/// How the Monte Carlo gradient is formed from the samples.
///
/// kLiteral is the importance estimate below, term by term. Its translated
/// base (alpha-1) b_j + 1 equals 1 - (1/M) sum_m w_jm + (1/M) sum_m w_jm u_m^(alpha-1)
/// with w_jm = k(theta_j, Y_m) / mu_lambda k(Y_m) and u_m = mu_lambda k(Y_m) / p(Y_m),
/// so it can be negative whenever a component receives more than its share
/// of samples.
///
/// kKernelIdentity replaces the sample mean of w_jm by its expectation, one:
///   b_j = ((1/M) sum_m w_jm u_m^(alpha-1) - 1) / (alpha-1).
/// It is unbiased as well, keeps (alpha-1) b_j + 1 > 0 like the exact gradient,
/// and satisfies the same identity sum_j lambda_j b_j = (1/M) sum_m f'_alpha(u_m).
/// Undefined at alpha = 1.
enum class EstimatorForm { kLiteral, kKernelIdentity };

std::string_view to_string(EstimatorForm form);
/// Accepts "literal" and "kernel_identity"; throws std::invalid_argument otherwise.
EstimatorForm parse_estimator_form(std::string_view name);

/// Importance estimate from samples of mu_lambda k:
///   b_j = (1/M) sum_m k(theta_j, Y_m) / mu_lambda k(Y_m) * f'_alpha(mu_lambda k(Y_m) / p(Y_m)).
/// All ratios are formed as log differences. One sample set serves every
/// component, so the errors are correlated across j. Zero-weight components
/// still receive an estimate.
GradVector b_monte_carlo(const MixtureState& state, const Target& target,
                         std::span<const Point> samples, double alpha,
                         EstimatorForm form = EstimatorForm::kLiteral);

/// Same estimator from precomputed log k(theta_j, Y_m) (J x M) and log p(Y_m).
GradVector b_monte_carlo_from_logs(const SimplexWeights& weights, const Eigen::MatrixXd& log_kernel,
                                   const Eigen::VectorXd& log_target, double alpha,
                                   EstimatorForm form = EstimatorForm::kLiteral);

}  // namespace alpha_descent
