#include "alpha_descent/gradient.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace alpha_descent {

double GradVector::weighted_mean(const SimplexWeights& weights) const {
  if (weights.size() != size()) {
    throw std::invalid_argument(fmt::format("{} weights for a gradient of size {}", weights.size(),
                                            size()));
  }
  return weights.values().dot(values);
}

GradVector b_exact(const FiniteSupportProblem& problem, const SimplexWeights& weights,
                   double alpha) {
  const Eigen::VectorXd mixture = problem.mixture_values(weights);
  const Eigen::VectorXd& p = problem.p_values();
  Eigen::VectorXd integrand(mixture.size());
  for (Eigen::Index s = 0; s < mixture.size(); ++s) {
    integrand[s] = problem.nu_weights()[s] * f_alpha_prime(mixture[s] / p[s], alpha);
  }
  GradVector b{problem.kernel_matrix() * integrand, GradientMode::kExact, 0, alpha, std::nullopt};
  if (alpha != 1.0) {
    // (alpha-1) b_j + 1 = sum_s nu_s K(j, s) (mu k(y_s) / p_s)^(alpha-1).
    Eigen::VectorXd log_terms(mixture.size());
    Eigen::VectorXd log_base(b.values.size());
    for (Eigen::Index j = 0; j < log_base.size(); ++j) {
      for (Eigen::Index s = 0; s < mixture.size(); ++s) {
        log_terms[s] = std::log(problem.nu_weights()[s] * problem.kernel_matrix()(j, s)) +
                       (alpha - 1.0) * (std::log(mixture[s]) - std::log(p[s]));
      }
      log_base[j] = log_sum_exp(log_terms);
    }
    b.log_base = std::move(log_base);
  }
  return b;
}

std::vector<Point> sample_mixture(const MixtureState& state, std::size_t count, Rng& rng) {
  const Eigen::VectorXd& w = state.weights.values();
  std::discrete_distribution<std::size_t> pick(w.data(), w.data() + w.size());
  std::vector<Point> samples;
  samples.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    samples.push_back(state.kernel->sample(state.particles[pick(rng)], rng));
  }
  return samples;
}

std::string_view to_string(EstimatorForm form) {
  return form == EstimatorForm::kLiteral ? "literal" : "kernel_identity";
}

EstimatorForm parse_estimator_form(std::string_view name) {
  if (name == "literal") return EstimatorForm::kLiteral;
  if (name == "kernel_identity") return EstimatorForm::kKernelIdentity;
  throw std::invalid_argument(
      fmt::format("unknown gradient estimator '{}' (expected literal or kernel_identity)", name));
}

GradVector b_monte_carlo_from_logs(const SimplexWeights& weights, const Eigen::MatrixXd& log_kernel,
                                   const Eigen::VectorXd& log_target, double alpha,
                                   EstimatorForm form) {
  const Eigen::Index M = log_kernel.cols();
  if (M == 0) throw std::invalid_argument("Monte Carlo gradient needs at least one sample");
  if (log_target.size() != M) {
    throw std::invalid_argument("one log target value per sample required");
  }
  const Eigen::VectorXd log_mixture = log_mixture_values(weights, log_kernel);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(log_kernel.rows());
  if (form == EstimatorForm::kKernelIdentity) {
    if (alpha == 1.0) throw std::invalid_argument("the kernel identity estimator needs alpha != 1");
    const Eigen::VectorXd log_tilt = (alpha - 1.0) * (log_mixture - log_target);
    Eigen::VectorXd terms(M);
    Eigen::VectorXd log_base(values.size());
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      terms = log_kernel.row(j).transpose() - log_mixture + log_tilt;
      log_base[j] = log_sum_exp(terms) - std::log(static_cast<double>(M));
      values[j] = std::expm1(log_base[j]) / (alpha - 1.0);
    }
    GradVector b{std::move(values), GradientMode::kMonteCarlo, static_cast<std::size_t>(M), alpha,
                 std::nullopt};
    b.log_base = std::move(log_base);
    return b;
  }
  for (Eigen::Index m = 0; m < M; ++m) {
    const double slope = f_alpha_prime_from_log(log_mixture[m] - log_target[m], alpha);
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      values[j] += std::exp(log_kernel(j, m) - log_mixture[m]) * slope;
    }
  }
  values /= static_cast<double>(M);
  return GradVector{std::move(values), GradientMode::kMonteCarlo, static_cast<std::size_t>(M),
                    alpha, std::nullopt};
}

GradVector b_monte_carlo(const MixtureState& state, const Target& target,
                         std::span<const Point> samples, double alpha, EstimatorForm form) {
  if (samples.empty()) throw std::invalid_argument("Monte Carlo gradient needs at least one sample");
  Eigen::VectorXd log_target(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t m = 0; m < samples.size(); ++m) {
    log_target[static_cast<Eigen::Index>(m)] = target.log_density(samples[m]);
  }
  return b_monte_carlo_from_logs(state.weights, log_kernel_matrix(state, samples), log_target,
                                 alpha, form);
}

}  // namespace alpha_descent
