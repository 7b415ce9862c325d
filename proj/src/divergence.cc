#include "alpha_descent/divergence.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace alpha_descent {

bool AlphaParams::power_valid() const {
  return alpha != 1.0 && (alpha - 1.0) * kappa >= 0.0 && eta > 0.0 && eta <= 1.0;
}

bool AlphaParams::renyi_valid() const { return alpha != 1.0 && (alpha - 1.0) * kappa > 0.0; }

double f_alpha(double u, double alpha) {
  if (!(u > 0.0)) throw std::domain_error(fmt::format("f_alpha needs u > 0, got {}", u));
  const double log_u = std::log(u);
  if (alpha == 0.0) return u - 1.0 - log_u;
  if (alpha == 1.0) return 1.0 - u + u * log_u;
  // u^alpha - 1 through expm1 keeps precision when alpha*log(u) is small.
  return (std::expm1(alpha * log_u) - alpha * (u - 1.0)) / (alpha * (alpha - 1.0));
}

double f_alpha_prime(double u, double alpha) {
  if (!(u > 0.0)) throw std::domain_error(fmt::format("f_alpha_prime needs u > 0, got {}", u));
  return f_alpha_prime_from_log(std::log(u), alpha);
}

double f_alpha_prime_from_log(double log_u, double alpha) {
  if (alpha == 0.0) return -std::expm1(-log_u);
  if (alpha == 1.0) return log_u;
  return std::expm1((alpha - 1.0) * log_u) / (alpha - 1.0);
}

double psi_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights, double alpha) {
  const Eigen::VectorXd mixture = problem.mixture_values(weights);
  const Eigen::VectorXd& nu = problem.nu_weights();
  const Eigen::VectorXd& p = problem.p_values();
  double total = 0.0;
  for (Eigen::Index s = 0; s < mixture.size(); ++s) {
    total += nu[s] * p[s] * f_alpha(mixture[s] / p[s], alpha);
  }
  return total;
}

double psi_ar_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                    const AlphaParams& params) {
  const double alpha = params.alpha;
  if (alpha == 0.0 || alpha == 1.0) {
    throw std::invalid_argument("the Renyi objective is undefined for alpha in {0, 1}");
  }
  const Eigen::VectorXd mixture = problem.mixture_values(weights);
  const Eigen::VectorXd& nu = problem.nu_weights();
  const Eigen::VectorXd& p = problem.p_values();
  double integral = 0.0;
  for (Eigen::Index s = 0; s < mixture.size(); ++s) {
    integral += nu[s] * std::pow(mixture[s], alpha) * std::pow(p[s], 1.0 - alpha);
  }
  const double argument = integral + (alpha - 1.0) * params.kappa;
  if (!(argument > 0.0)) {
    throw std::domain_error(
        fmt::format("Renyi objective log argument is {} (must be positive)", argument));
  }
  return std::log(argument) / (alpha * (alpha - 1.0));
}

double vr_bound_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                      double alpha) {
  if (alpha == 1.0) throw std::invalid_argument("the VR bound is undefined at alpha = 1");
  const Eigen::VectorXd mixture = problem.mixture_values(weights);
  Eigen::VectorXd terms(mixture.size());
  for (Eigen::Index s = 0; s < mixture.size(); ++s) {
    terms[s] = std::log(problem.nu_weights()[s]) + alpha * std::log(mixture[s]) +
               (1.0 - alpha) * std::log(problem.p_values()[s]);
  }
  return log_sum_exp(terms) / (1.0 - alpha);
}

double vr_bound_from_logs(const Eigen::VectorXd& log_target, const Eigen::VectorXd& log_mixture,
                          double alpha) {
  if (alpha == 1.0) throw std::invalid_argument("the VR bound is undefined at alpha = 1");
  if (log_target.size() == 0 || log_target.size() != log_mixture.size()) {
    throw std::invalid_argument("VR bound needs a nonempty, matching set of log values");
  }
  const Eigen::VectorXd terms = (1.0 - alpha) * (log_target - log_mixture);
  return (log_sum_exp(terms) - std::log(static_cast<double>(terms.size()))) / (1.0 - alpha);
}

double elbo_from_logs(const Eigen::VectorXd& log_target, const Eigen::VectorXd& log_mixture) {
  if (log_target.size() == 0 || log_target.size() != log_mixture.size()) {
    throw std::invalid_argument("ELBO needs a nonempty, matching set of log values");
  }
  return (log_target - log_mixture).mean();
}

double vr_bound_estimate(std::span<const Point> samples, const MixtureState& state,
                         const Target& target, double alpha) {
  if (samples.empty()) throw std::invalid_argument("VR bound estimate needs at least one sample");
  if (alpha == 1.0) throw std::invalid_argument("the VR bound is undefined at alpha = 1");
  const Eigen::VectorXd log_mixture = log_mixture_values(state.weights, log_kernel_matrix(state, samples));
  Eigen::VectorXd log_target(log_mixture.size());
  for (std::size_t m = 0; m < samples.size(); ++m) {
    log_target[static_cast<Eigen::Index>(m)] = target.log_density(samples[m]);
  }
  return vr_bound_from_logs(log_target, log_mixture, alpha);
}

}  // namespace alpha_descent
