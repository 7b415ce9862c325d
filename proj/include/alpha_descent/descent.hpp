#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "alpha_descent/divergence.hpp"
#include "alpha_descent/errors.hpp"
#include "alpha_descent/finite_support.hpp"
#include "alpha_descent/gradient.hpp"
#include "alpha_descent/model.hpp"

namespace alpha_descent {

enum class Algorithm { kPower, kEmd, kKl, kRenyi };

std::string_view to_string(Algorithm algorithm);
/// Accepts "power", "emd", "kl" and "renyi"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);

/// The alpha at which an algorithm evaluates its gradient (1 for kl).
double gradient_alpha(Algorithm algorithm, const AlphaParams& params);

/// Evidence that a step stayed inside the domain of its transform.
struct StepDiagnostics {
  /// Argument handed to the transform for each component: b_j + kappa for
  /// power and emd, b_j for kl, b_j / D + kappa' for renyi.
  Eigen::VectorXd gamma_inputs;
  /// log sum_l lambda_l Gamma(gamma_inputs_l).
  double log_normaliser = 0.0;
  /// Power: min over live components of (alpha-1)(b_j+kappa)+1 (must be > 0).
  /// Renyi: min of 1 - eta (alpha-1)(V - kappa') over live components and the
  /// mixture average. The step-size condition of the rate bound asks for
  /// this to stay nonnegative; it is recorded, not enforced.
  /// Emd and kl have no guard and record +inf.
  double guard_min = std::numeric_limits<double>::infinity();
  /// Renyi only: D = (alpha-1)(mu(b) + kappa) + 1.
  double renyi_denominator = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> objective_after;
};

struct StepResult {
  SimplexWeights weights;
  StepDiagnostics diagnostics;
};

/// Gamma(v) = ((alpha-1) v + 1)^(eta/(1-alpha)), evaluated as an exponential
/// of a logarithm. Throws GuardViolation if the base is not positive.
double gamma_power(double v, const AlphaParams& params);

/// lambda'_j proportional to lambda_j Gamma(b_j + kappa).
/// Requires params.power_valid() (std::invalid_argument otherwise); throws
/// GuardViolation naming the first live component whose base is not positive
/// and NormaliserUnderflow if no mass survives.
StepResult power_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params);

/// Entropic mirror descent on Psi_alpha: lambda'_j proportional to
/// lambda_j exp(-eta (b_j + kappa)).
StepResult emd_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params);

/// The alpha -> 1 limit of the power step: lambda'_j proportional to
/// lambda_j exp(-eta b1_j), where b1 must be evaluated with alpha = 1.
StepResult kl_step(const SimplexWeights& weights, const GradVector& b1, double eta);

/// Renyi descent: lambda'_j proportional to lambda_j exp(-eta (b_j / D + kappa')),
/// D = (alpha-1)(mu(b) + kappa) + 1, mu(b) = sum_j lambda_j b_j. kappa' cancels
/// in the normalisation. With `unweighted_mu_b`, mu(b) = sum_j b_j instead.
/// Throws GuardViolation if D <= 0.
StepResult renyi_step(const SimplexWeights& weights, const GradVector& b, const AlphaParams& params,
                      bool unweighted_mu_b = false);

/// Dispatches to the step operator of `algorithm`.
StepResult apply_step(Algorithm algorithm, const SimplexWeights& weights, const GradVector& b,
                      const AlphaParams& params, bool renyi_unweighted_mu_b = false);

/// Constants of the O(1/N) bound for the Renyi descent.
struct RateConstants {
  double b_infty = 0.0;  ///< sup |b_j + 1/(alpha-1)|
  double L1 = 0.0;
  double L = 0.0;
  double L2 = 0.0;
  double L3 = 0.0;
  double kl_bound = 0.0;      ///< bound on KL(mu* || mu_1)
  double delta1_bound = 0.0;  ///< bound on Psi(mu_1) - Psi(mu*)
};

/// Constants for a uniform start over J components, with the step-size
/// interval centred so that kappa' = -3 b_infty / ((alpha-1) kappa).
/// Requires params.renyi_valid() and 1 - eta b_infty / |kappa| > 0.
RateConstants rate_constants_uniform_start(double b_infty, const AlphaParams& params,
                                           std::size_t num_components);

/// Upper bound on Psi(mu_N) - Psi(mu*):
///   L1 / N * (kl_bound + L L2 / (L3 (alpha-1) kappa) * delta1_bound).
/// Throws std::invalid_argument when the bound is inapplicable.
double rate_bound(const RateConstants& constants, std::size_t num_steps, const AlphaParams& params,
                  std::size_t num_components);

enum class TraceStatus { kCompleted, kFixedPoint, kGuardViolation, kNumericalFailure };

std::string_view to_string(TraceStatus status);

struct DescentRecord {
  std::size_t t = 1;
  std::size_t n = 0;
  SimplexWeights weights;
  double vr_bound = std::numeric_limits<double>::quiet_NaN();
  double psi_exact = std::numeric_limits<double>::quiet_NaN();
  double guard_min = std::numeric_limits<double>::quiet_NaN();
  double elapsed_ms = 0.0;
};

struct DescentTrace {
  std::vector<DescentRecord> records;
  TraceStatus status = TraceStatus::kCompleted;
  std::string message;
  /// Set when any recorded bound is NaN or infinite.
  bool non_finite_bound = false;

  const SimplexWeights& final_weights() const { return records.back().weights; }
};

/// A step failure inside run_descent, with the failing iteration and the
/// trace recorded up to it.
class DescentError : public std::runtime_error {
 public:
  DescentError(const std::string& what, std::size_t iteration, DescentTrace partial, TraceStatus status)
      : std::runtime_error(what), iteration_(iteration), partial_(std::move(partial)), status_(status) {}

  std::size_t iteration() const { return iteration_; }
  const DescentTrace& partial_trace() const { return partial_; }
  TraceStatus status() const { return status_; }

 private:
  std::size_t iteration_;
  DescentTrace partial_;
  TraceStatus status_;
};

struct DescentOptions {
  /// Stop once a step moves the weights by at most `fixed_point_tolerance` in l1.
  bool early_stop = false;
  double fixed_point_tolerance = 1e-12;
  bool renyi_unweighted_mu_b = false;
  /// Emit the n = 0 record before the first step.
  bool record_initial = true;
  /// Outer index written into every record.
  std::size_t phase = 1;
  /// Origin for elapsed_ms; defaults to the start of the call.
  std::optional<std::chrono::steady_clock::time_point> clock_origin;
};

struct MonteCarloEstimator {
  std::size_t sample_count = 100;
  Rng* rng = nullptr;
  /// Compute each record's bound from the batch that also feeds the next
  /// gradient, instead of a separate batch.
  bool reuse_monitor_samples = false;
  EstimatorForm form = EstimatorForm::kLiteral;
};

/// N exact steps on a finite-support problem. Records Psi at the algorithm's
/// objective alpha (1 for kl) and the exact VR bound at params.alpha.
DescentTrace run_descent(const FiniteSupportProblem& problem, const SimplexWeights& initial,
                         const AlphaParams& params, Algorithm algorithm, std::size_t num_steps,
                         const DescentOptions& options = {});

/// N Monte Carlo steps on a continuous target. Records a Monte Carlo VR bound
/// at params.alpha (its alpha -> 1 limit when params.alpha == 1) after every step.
DescentTrace run_descent(const MixtureState& initial, const Target& target,
                         const AlphaParams& params, Algorithm algorithm, std::size_t num_steps,
                         const MonteCarloEstimator& estimator, const DescentOptions& options = {});

}  // namespace alpha_descent
