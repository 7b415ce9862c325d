#pragma once

#include <span>

#include "alpha_descent/finite_support.hpp"
#include "alpha_descent/model.hpp"

namespace alpha_descent {

/// Hyperparameters shared by the descent operators.
struct AlphaParams {
  double alpha = 0.5;
  double eta = 1.0;
  double kappa = 0.0;
  /// Shift of the step-size interval used by the renyi rate bound. It cancels
  /// in the normalisation and never moves weights.
  double kappa_prime = 0.0;

  /// alpha != 1 with (alpha-1) kappa >= 0, and 0 < eta <= 1: the regime in
  /// which every power step decreases the objective.
  bool power_valid() const;
  /// alpha != 1 and (alpha-1) kappa > 0: the regime of the O(1/N) rate.
  bool renyi_valid() const;
};

/// The convex generator f_alpha on (0, inf):
///   alpha = 0: u - 1 - log u
///   alpha = 1: 1 - u + u log u
///   otherwise: (u^alpha - 1 - alpha (u - 1)) / (alpha (alpha - 1))
/// The branches are selected by exact comparison. Throws std::domain_error
/// for u <= 0.
double f_alpha(double u, double alpha);

/// Derivative of f_alpha, (u^(alpha-1) - 1)/(alpha - 1) away from the two
/// special branches.
double f_alpha_prime(double u, double alpha);

/// f_alpha_prime(exp(log_u), alpha) without leaving log domain for the power.
double f_alpha_prime_from_log(double log_u, double alpha);

/// Psi_alpha(lambda) = sum_s nu_s p_s f_alpha(mu_lambda k(y_s) / p_s).
double psi_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights, double alpha);

/// Renyi-transformed objective
///   log(sum_s nu_s (mu_lambda k(y_s))^alpha p_s^(1-alpha) + (alpha-1) kappa) / (alpha (alpha-1)).
/// Throws std::invalid_argument for alpha in {0, 1} and std::domain_error when
/// the log argument is not positive.
double psi_ar_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                    const AlphaParams& params);

/// Exact Variational Renyi bound
///   log(sum_s nu_s (mu_lambda k(y_s))^alpha p_s^(1-alpha)) / (1 - alpha),
/// accumulated in log domain.
double vr_bound_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                      double alpha);

/// Monte Carlo Variational Renyi bound from samples of mu_lambda k:
///   (logsumexp_m((1-alpha)(log p(Y_m) - log mu_lambda k(Y_m))) - log M) / (1 - alpha).
/// Throws std::invalid_argument for alpha == 1 or an empty sample set.
double vr_bound_estimate(std::span<const Point> samples, const MixtureState& state,
                         const Target& target, double alpha);

/// Same estimate from precomputed log p(Y_m) and log mu_lambda k(Y_m).
double vr_bound_from_logs(const Eigen::VectorXd& log_target, const Eigen::VectorXd& log_mixture,
                          double alpha);

/// The alpha -> 1 limit of the bound: the mean of log p - log mu_lambda k.
double elbo_from_logs(const Eigen::VectorXd& log_target, const Eigen::VectorXd& log_mixture);

}  // namespace alpha_descent
