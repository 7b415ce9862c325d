#include "alpha_descent/descent.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace alpha_descent {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_sizes(const SimplexWeights& weights, const GradVector& b) {
  if (weights.size() != b.size()) {
    throw std::invalid_argument(fmt::format("step with {} weights but a gradient of size {}",
                                            weights.size(), b.size()));
  }
}

// lambda'_j proportional to lambda_j exp(log_gamma_j); zero weights stay zero.
StepResult normalise(const SimplexWeights& weights, const Eigen::VectorXd& log_gamma,
                     StepDiagnostics diagnostics) {
  Eigen::VectorXd log_w(log_gamma.size());
  for (Eigen::Index j = 0; j < log_w.size(); ++j) {
    const double w = weights[static_cast<std::size_t>(j)];
    log_w[j] = w > 0.0 ? std::log(w) + log_gamma[j] : kNegInf;
  }
  diagnostics.log_normaliser = log_sum_exp(log_w);
  return StepResult{SimplexWeights::from_log_weights(log_w), std::move(diagnostics)};
}

double log_add_exp(double a, double b) {
  const double high = std::max(a, b);
  if (high == kNegInf) return kNegInf;
  return high + std::log1p(std::exp(std::min(a, b) - high));
}

// log((alpha-1)(b_j + kappa) + 1) from the gradient's log-domain base, or
// nothing when the gradient carries none. Needs (alpha-1) kappa >= 0.
std::optional<Eigen::VectorXd> log_translated_base(const GradVector& b, const AlphaParams& params) {
  if (!b.log_base || b.log_base->size() != b.values.size() || b.alpha != params.alpha) return {};
  const double shift = (params.alpha - 1.0) * params.kappa;
  if (shift == 0.0) return *b.log_base;
  Eigen::VectorXd out(b.log_base->size());
  const double log_shift = std::log(shift);
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = log_add_exp((*b.log_base)[j], log_shift);
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point origin) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - origin).count();
}

TraceStatus status_of(const std::exception& error) {
  return dynamic_cast<const GuardViolation*>(&error) != nullptr ? TraceStatus::kGuardViolation
                                                                : TraceStatus::kNumericalFailure;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPower:
      return "power";
    case Algorithm::kEmd:
      return "emd";
    case Algorithm::kKl:
      return "kl";
    case Algorithm::kRenyi:
      return "renyi";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "power") return Algorithm::kPower;
  if (name == "emd") return Algorithm::kEmd;
  if (name == "kl") return Algorithm::kKl;
  if (name == "renyi") return Algorithm::kRenyi;
  throw std::invalid_argument(
      fmt::format("unknown algorithm '{}' (expected power, emd, kl or renyi)", name));
}

double gradient_alpha(Algorithm algorithm, const AlphaParams& params) {
  return algorithm == Algorithm::kKl ? 1.0 : params.alpha;
}

double gamma_power(double v, const AlphaParams& params) {
  if (params.alpha == 1.0) throw std::invalid_argument("the power transform needs alpha != 1");
  const double base = (params.alpha - 1.0) * v + 1.0;
  if (!(base > 0.0)) {
    throw GuardViolation(fmt::format("power transform base (alpha-1)v+1 = {} at v = {}", base, v),
                         GuardViolation::kNoComponent, v);
  }
  return std::exp(params.eta / (1.0 - params.alpha) * std::log(base));
}

StepResult power_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params) {
  check_sizes(weights, b);
  if (!params.power_valid()) {
    throw std::invalid_argument(fmt::format(
        "power step needs alpha != 1, (alpha-1) kappa >= 0 and 0 < eta <= 1 (alpha={}, kappa={}, "
        "eta={})",
        params.alpha, params.kappa, params.eta));
  }
  StepDiagnostics diagnostics;
  diagnostics.gamma_inputs = b.values.array() + params.kappa;
  const double exponent = params.eta / (1.0 - params.alpha);
  const std::optional<Eigen::VectorXd> log_base = log_translated_base(b, params);
  Eigen::VectorXd log_gamma(b.values.size());
  for (Eigen::Index j = 0; j < log_gamma.size(); ++j) {
    const double base = log_base ? std::exp((*log_base)[j])
                                 : (params.alpha - 1.0) * diagnostics.gamma_inputs[j] + 1.0;
    const bool positive = log_base ? (*log_base)[j] > kNegInf : base > 0.0;
    if (weights[static_cast<std::size_t>(j)] > 0.0) {
      if (!positive) {
        throw GuardViolation(
            fmt::format("power step guard violated at component {}: (alpha-1)(b+kappa)+1 = {}", j,
                        base),
            static_cast<std::size_t>(j), base);
      }
      diagnostics.guard_min = std::min(diagnostics.guard_min, base);
    }
    if (!positive) {
      log_gamma[j] = kNegInf;
    } else {
      log_gamma[j] = exponent * (log_base ? (*log_base)[j] : std::log(base));
    }
  }
  return normalise(weights, log_gamma, std::move(diagnostics));
}

StepResult emd_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params) {
  check_sizes(weights, b);
  if (!(params.eta > 0.0)) throw std::invalid_argument("emd step needs eta > 0");
  StepDiagnostics diagnostics;
  diagnostics.gamma_inputs = b.values.array() + params.kappa;
  const Eigen::VectorXd log_gamma = -params.eta * diagnostics.gamma_inputs;
  return normalise(weights, log_gamma, std::move(diagnostics));
}

StepResult kl_step(const SimplexWeights& weights, const GradVector& b1, double eta) {
  if (b1.alpha != 1.0) {
    throw std::invalid_argument(
        fmt::format("kl step needs a gradient evaluated at alpha = 1, got alpha = {}", b1.alpha));
  }
  return emd_step(weights, b1, AlphaParams{1.0, eta, 0.0, 0.0});
}

StepResult renyi_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params,
                      bool unweighted_mu_b) {
  check_sizes(weights, b);
  const double alpha = params.alpha;
  if (alpha == 1.0 || !(params.eta > 0.0) || (alpha - 1.0) * params.kappa < 0.0) {
    throw std::invalid_argument(fmt::format(
        "renyi step needs alpha != 1, eta > 0 and (alpha-1) kappa >= 0 (alpha={}, kappa={}, eta={})",
        alpha, params.kappa, params.eta));
  }
  // With a log-domain base, D and every (b_j + 1/(alpha-1)) / D are formed as
  // ratios of exponentials; the constant -1/((alpha-1) D) that separates
  // b_j / D from them cancels in the normalisation.
  const std::optional<Eigen::VectorXd> log_base =
      unweighted_mu_b ? std::nullopt : log_translated_base(b, AlphaParams{alpha, params.eta, 0.0, 0.0});
  if (log_base) {
    Eigen::VectorXd log_terms(log_base->size());
    for (Eigen::Index j = 0; j < log_terms.size(); ++j) {
      const double w = weights[static_cast<std::size_t>(j)];
      log_terms[j] = w > 0.0 ? std::log(w) + (*log_base)[j] : kNegInf;
    }
    const double log_mix = log_sum_exp(log_terms);
    const double shift = (alpha - 1.0) * params.kappa;
    const double log_d = shift == 0.0 ? log_mix : log_add_exp(log_mix, std::log(shift));
    if (!(log_d > kNegInf)) {
      throw GuardViolation("renyi step denominator (alpha-1)(mu(b)+kappa)+1 underflows to zero",
                           GuardViolation::kNoComponent, 0.0);
    }
    StepDiagnostics diagnostics;
    diagnostics.renyi_denominator = std::exp(log_d);
    diagnostics.gamma_inputs.resize(log_base->size());
    Eigen::VectorXd log_gamma(log_base->size());
    diagnostics.guard_min = 1.0 - params.eta * std::exp(log_mix - log_d);
    for (Eigen::Index j = 0; j < log_gamma.size(); ++j) {
      const double scaled = std::exp((*log_base)[j] - log_d);  // (alpha-1)(V_j - kappa')
      diagnostics.gamma_inputs[j] = (scaled - std::exp(-log_d)) / (alpha - 1.0) + params.kappa_prime;
      log_gamma[j] = -params.eta * (scaled / (alpha - 1.0) + params.kappa_prime);
      if (weights[static_cast<std::size_t>(j)] > 0.0) {
        diagnostics.guard_min = std::min(diagnostics.guard_min, 1.0 - params.eta * scaled);
      }
    }
    return normalise(weights, log_gamma, std::move(diagnostics));
  }

  const double mu_b = unweighted_mu_b ? b.values.sum() : b.weighted_mean(weights);
  const double denominator = (alpha - 1.0) * (mu_b + params.kappa) + 1.0;
  if (!(denominator > 0.0)) {
    throw GuardViolation(
        fmt::format("renyi step denominator (alpha-1)(mu(b)+kappa)+1 = {} is not positive",
                    denominator),
        GuardViolation::kNoComponent, denominator);
  }
  StepDiagnostics diagnostics;
  diagnostics.renyi_denominator = denominator;
  diagnostics.gamma_inputs = b.values.array() / denominator + params.kappa_prime;

  // Step-size condition on the realised V = (b + 1/(alpha-1))/D + kappa'.
  const auto b_check = [&](double b_value) {
    const double v = (b_value + 1.0 / (alpha - 1.0)) / denominator + params.kappa_prime;
    return 1.0 - params.eta * (alpha - 1.0) * (v - params.kappa_prime);
  };
  diagnostics.guard_min = b_check(mu_b);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) diagnostics.guard_min = std::min(diagnostics.guard_min, b_check(b[j]));
  }
  const Eigen::VectorXd log_gamma = -params.eta * diagnostics.gamma_inputs;
  return normalise(weights, log_gamma, std::move(diagnostics));
}

StepResult apply_step(Algorithm algorithm, const SimplexWeights& weights, const GradVector& b,
                      const AlphaParams& params, bool renyi_unweighted_mu_b) {
  switch (algorithm) {
    case Algorithm::kPower:
      return power_step(weights, b, params);
    case Algorithm::kEmd:
      return emd_step(weights, b, params);
    case Algorithm::kKl:
      return kl_step(weights, b, params.eta);
    case Algorithm::kRenyi:
      return renyi_step(weights, b, params, renyi_unweighted_mu_b);
  }
  throw std::invalid_argument("unknown algorithm");
}

RateConstants rate_constants_uniform_start(double b_infty, const AlphaParams& params,
                                           std::size_t num_components) {
  if (!params.renyi_valid()) {
    throw std::invalid_argument("rate constants need alpha != 1 and (alpha-1) kappa > 0");
  }
  if (!(b_infty >= 0.0) || !std::isfinite(b_infty)) {
    throw std::invalid_argument("b_infty must be finite and nonnegative");
  }
  if (num_components == 0) throw std::invalid_argument("rate constants need J >= 1");
  const double eta = params.eta;
  const double abs_kappa = std::abs(params.kappa);
  const double slack = 1.0 - eta * b_infty / abs_kappa;
  if (!(slack > 0.0)) {
    throw std::invalid_argument(
        fmt::format("rate constants need 1 - eta b_infty / |kappa| > 0, got {}", slack));
  }
  const double half_width = b_infty / ((params.alpha - 1.0) * params.kappa);
  const double kappa_prime = -3.0 * half_width;
  const double log_j = std::log(static_cast<double>(num_components));

  RateConstants c;
  c.b_infty = b_infty;
  c.L1 = std::abs(params.alpha - 1.0) * (b_infty + abs_kappa) / eta;
  c.L = eta * eta * std::exp(eta * half_width - eta * kappa_prime);
  c.L2 = std::exp(eta * half_width + eta * kappa_prime);
  c.L3 = slack * eta * std::exp(-eta * half_width - eta * kappa_prime);
  c.kl_bound = log_j;
  c.delta1_bound = std::sqrt(2.0 * log_j) * b_infty;
  return c;
}

double rate_bound(const RateConstants& constants, std::size_t num_steps, const AlphaParams& params,
                  std::size_t num_components) {
  if (num_steps == 0 || num_components == 0) {
    throw std::invalid_argument("rate bound needs N >= 1 and J >= 1");
  }
  if (!params.renyi_valid()) {
    throw std::invalid_argument("rate bound needs alpha != 1 and (alpha-1) kappa > 0");
  }
  if (!(1.0 - params.eta * constants.b_infty / std::abs(params.kappa) > 0.0)) {
    throw std::invalid_argument("rate bound needs 1 - eta b_infty / |kappa| > 0");
  }
  if (!(constants.L3 > 0.0)) throw std::invalid_argument("rate bound needs L3 > 0");
  const double penalty = constants.L * constants.L2 /
                         (constants.L3 * (params.alpha - 1.0) * params.kappa) *
                         constants.delta1_bound;
  return constants.L1 / static_cast<double>(num_steps) * (constants.kl_bound + penalty);
}

std::string_view to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::kCompleted:
      return "completed";
    case TraceStatus::kFixedPoint:
      return "fixed_point";
    case TraceStatus::kGuardViolation:
      return "guard_violation";
    case TraceStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

DescentTrace run_descent(const FiniteSupportProblem& problem, const SimplexWeights& initial,
                         const AlphaParams& params, Algorithm algorithm, std::size_t num_steps,
                         const DescentOptions& options) {
  const auto origin = options.clock_origin.value_or(std::chrono::steady_clock::now());
  const double objective_alpha = gradient_alpha(algorithm, params);

  const auto make_record = [&](std::size_t n, const SimplexWeights& weights, double guard) {
    DescentRecord record{options.phase, n, weights};
    record.psi_exact = psi_exact(problem, weights, objective_alpha);
    if (params.alpha != 1.0) {
      record.vr_bound = vr_bound_exact(problem, weights, params.alpha);
    } else {
      const Eigen::VectorXd mixture = problem.mixture_values(weights);
      record.vr_bound = (problem.nu_weights().array() * mixture.array() *
                         (problem.p_values().array().log() - mixture.array().log()))
                            .sum();
    }
    record.guard_min = guard;
    record.elapsed_ms = elapsed_ms(origin);
    return record;
  };

  DescentTrace trace;
  if (options.record_initial) {
    trace.records.push_back(make_record(0, initial, std::numeric_limits<double>::quiet_NaN()));
  }
  SimplexWeights current = initial;
  for (std::size_t n = 1; n <= num_steps; ++n) {
    try {
      const GradVector b = b_exact(problem, current, objective_alpha);
      StepResult step = apply_step(algorithm, current, b, params, options.renyi_unweighted_mu_b);
      const double moved = step.weights.l1_distance(current);
      current = std::move(step.weights);
      trace.records.push_back(make_record(n, current, step.diagnostics.guard_min));
      if (options.early_stop && moved <= options.fixed_point_tolerance) {
        trace.status = TraceStatus::kFixedPoint;
        trace.message = fmt::format("fixed point reached after {} steps", n);
        break;
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& error) {
      trace.status = status_of(error);
      trace.message = fmt::format("step {} failed: {}", n, error.what());
      std::string message = trace.message;
      throw DescentError(message, n, std::move(trace), status_of(error));
    }
  }
  for (const DescentRecord& r : trace.records) {
    if (!std::isfinite(r.vr_bound)) trace.non_finite_bound = true;
  }
  return trace;
}

DescentTrace run_descent(const MixtureState& initial, const Target& target,
                         const AlphaParams& params, Algorithm algorithm, std::size_t num_steps,
                         const MonteCarloEstimator& estimator, const DescentOptions& options) {
  if (estimator.rng == nullptr) throw std::invalid_argument("Monte Carlo descent needs an RNG");
  if (estimator.sample_count == 0) throw std::invalid_argument("Monte Carlo descent needs M >= 1");
  Rng& rng = *estimator.rng;
  const auto origin = options.clock_origin.value_or(std::chrono::steady_clock::now());
  const double grad_alpha = gradient_alpha(algorithm, params);

  // Everything the estimators need from one batch of samples.
  struct Batch {
    Eigen::MatrixXd log_kernel;
    Eigen::VectorXd log_mixture;
    Eigen::VectorXd log_target;
  };
  const auto draw = [&](const MixtureState& state) {
    const std::vector<Point> samples = sample_mixture(state, estimator.sample_count, rng);
    Batch batch;
    batch.log_kernel = log_kernel_matrix(state, samples);
    batch.log_mixture = log_mixture_values(state.weights, batch.log_kernel);
    batch.log_target.resize(batch.log_mixture.size());
    for (std::size_t m = 0; m < samples.size(); ++m) {
      batch.log_target[static_cast<Eigen::Index>(m)] = target.log_density(samples[m]);
    }
    return batch;
  };
  const auto bound_of = [&](const Batch& batch) {
    return params.alpha == 1.0 ? elbo_from_logs(batch.log_target, batch.log_mixture)
                               : vr_bound_from_logs(batch.log_target, batch.log_mixture, params.alpha);
  };

  DescentTrace trace;
  const auto push = [&](std::size_t n, const SimplexWeights& weights, double bound, double guard) {
    DescentRecord record{options.phase, n, weights};
    record.vr_bound = bound;
    record.guard_min = guard;
    record.elapsed_ms = elapsed_ms(origin);
    if (!std::isfinite(bound)) trace.non_finite_bound = true;
    trace.records.push_back(std::move(record));
  };

  MixtureState state = initial;
  std::optional<Batch> pending;
  if (estimator.reuse_monitor_samples) pending = draw(state);
  if (options.record_initial) {
    const double bound = pending ? bound_of(*pending) : bound_of(draw(state));
    push(0, state.weights, bound, std::numeric_limits<double>::quiet_NaN());
  }

  for (std::size_t n = 1; n <= num_steps; ++n) {
    try {
      const Batch gradient_batch = pending ? std::move(*pending) : draw(state);
      pending.reset();
      const GradVector b = b_monte_carlo_from_logs(state.weights, gradient_batch.log_kernel,
                                                   gradient_batch.log_target, grad_alpha,
                                                   estimator.form);
      StepResult step = apply_step(algorithm, state.weights, b, params, options.renyi_unweighted_mu_b);
      const double moved = step.weights.l1_distance(state.weights);
      state = state.with_weights(std::move(step.weights));

      Batch monitor = draw(state);
      const double bound = bound_of(monitor);
      if (estimator.reuse_monitor_samples) pending = std::move(monitor);
      push(n, state.weights, bound, step.diagnostics.guard_min);

      if (options.early_stop && moved <= options.fixed_point_tolerance) {
        trace.status = TraceStatus::kFixedPoint;
        trace.message = fmt::format("fixed point reached after {} steps", n);
        break;
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& error) {
      trace.status = status_of(error);
      trace.message = fmt::format("step {} failed: {}", n, error.what());
      std::string message = trace.message;
      throw DescentError(message, n, std::move(trace), status_of(error));
    }
  }
  return trace;
}

}  // namespace alpha_descent
