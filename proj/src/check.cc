#include "alpha_descent/check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "alpha_descent/descent.hpp"
#include "alpha_descent/divergence.hpp"
#include "alpha_descent/fixtures.hpp"
#include "alpha_descent/gradient.hpp"

namespace alpha_descent {
namespace {

constexpr double kMonotoneTolerance = 1e-10;

bool on_simplex(const SimplexWeights& w) {
  return (w.values().array() >= 0.0).all() && std::abs(w.values().sum() - 1.0) <= 1e-12;
}

// Zero weights must stay zero. A positive weight must stay positive unless its
// exact new value lies below the smallest subnormal double.
bool same_support(const SimplexWeights& before, const StepResult& step,
                  const Eigen::VectorXd& log_gamma) {
  constexpr double kLogSmallest = -744.0;
  for (std::size_t j = 0; j < before.size(); ++j) {
    const double after = step.weights[j];
    if (before[j] == 0.0) {
      if (after != 0.0) return false;
      continue;
    }
    const auto jj = static_cast<Eigen::Index>(j);
    const double log_exact = std::log(before[j]) + log_gamma[jj] - step.diagnostics.log_normaliser;
    if (after == 0.0 && log_exact > kLogSmallest) return false;
  }
  return true;
}

Eigen::VectorXd power_log_gamma(const StepResult& step, const AlphaParams& params) {
  return (params.eta / (1.0 - params.alpha)) *
         ((params.alpha - 1.0) * step.diagnostics.gamma_inputs.array() + 1.0).log().matrix();
}

Eigen::VectorXd exponential_log_gamma(const StepResult& step, double eta) {
  return -eta * step.diagnostics.gamma_inputs;
}

bool not_increased(double before, double after) {
  return after <= before + kMonotoneTolerance * std::max(1.0, std::abs(before));
}

/// Tallies one invariant across every problem and reports the first failure.
class Invariant {
 public:
  explicit Invariant(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::function<std::string()>& detail) {
    ++cases_;
    if (!ok && first_failure_.empty()) first_failure_ = detail();
    if (!ok) ++failures_;
  }

  bool report(std::ostream& out) const {
    if (failures_ == 0) {
      out << fmt::format("PASS {} ({} cases)\n", name_, cases_);
    } else {
      out << fmt::format("FAIL {} ({} of {} cases): {}\n", name_, failures_, cases_, first_failure_);
    }
    return failures_ == 0;
  }

 private:
  std::string name_;
  std::size_t cases_ = 0;
  std::size_t failures_ = 0;
  std::string first_failure_;
};

}  // namespace

bool run_invariant_checks(std::uint64_t seed, std::size_t count, std::ostream& out) {
  Invariant simplex("steps stay on the simplex");
  Invariant support("steps preserve the support of the weights");
  Invariant power_monotone("power descent never increases psi");
  Invariant renyi_monotone("renyi descent never increases psi when its guard holds");
  Invariant scale("kappa = 0 steps are invariant to scaling p");
  Invariant cancel("kappa' cancels in the renyi step");
  Invariant positive("(alpha-1) b + 1 stays positive");
  Invariant fixed("an exact fit is a fixed point");

  const std::vector<double> alphas{-0.5, 0.0, 0.5, 0.99, 2.0};
  const std::vector<double> etas{0.1, 0.5, 1.0};
  Rng rng = make_stream(seed, 0);

  for (std::size_t i = 0; i < count; ++i) {
    const FiniteSupportProblem problem = random_problem(rng);
    const FiniteSupportProblem doubled = problem.with_scaled_target(2.0);
    const SimplexWeights weights = random_weights(problem.num_components(), rng, i % 2 == 1);
    const auto where = [&](double alpha, double eta) {
      return fmt::format("problem {} alpha {} eta {}", i, alpha, eta);
    };

    for (const double alpha : alphas) {
      const GradVector b = b_exact(problem, weights, alpha);
      if (alpha != 1.0) {
        const Eigen::ArrayXd base = (alpha - 1.0) * b.values.array() + 1.0;
        positive.expect((base > 0.0).all(), [&] { return where(alpha, 0.0); });
      }
      const double psi_before = psi_exact(problem, weights, alpha);

      for (const double eta : etas) {
        const AlphaParams power_params{alpha, eta, 0.0, 0.0};
        const StepResult power = power_step(weights, b, power_params);
        simplex.expect(on_simplex(power.weights), [&] { return "power " + where(alpha, eta); });
        support.expect(same_support(weights, power, power_log_gamma(power, power_params)), [&] { return "power " + where(alpha, eta); });
        if (alpha < 1.0) {
          const double psi_after = psi_exact(problem, power.weights, alpha);
          power_monotone.expect(not_increased(psi_before, psi_after), [&] {
            return fmt::format("{}: {} -> {}", where(alpha, eta), psi_before, psi_after);
          });
        }
        const StepResult power2 = power_step(weights, b_exact(doubled, weights, alpha), power_params);
        scale.expect(power.weights.l1_distance(power2.weights) <= 1e-10,
                     [&] { return "power " + where(alpha, eta); });

        const StepResult emd = emd_step(weights, b, power_params);
        simplex.expect(on_simplex(emd.weights), [&] { return "emd " + where(alpha, eta); });
        support.expect(same_support(weights, emd, exponential_log_gamma(emd, eta)), [&] { return "emd " + where(alpha, eta); });

        const double kappa = alpha < 1.0 ? -1.0 : 1.0;
        const AlphaParams renyi_params{alpha, eta, kappa, 0.0};
        const StepResult renyi = renyi_step(weights, b, renyi_params);
        simplex.expect(on_simplex(renyi.weights), [&] { return "renyi " + where(alpha, eta); });
        support.expect(same_support(weights, renyi, exponential_log_gamma(renyi, eta)), [&] { return "renyi " + where(alpha, eta); });
        if (renyi.diagnostics.guard_min >= 0.0) {
          const double psi_after = psi_exact(problem, renyi.weights, alpha);
          renyi_monotone.expect(not_increased(psi_before, psi_after), [&] {
            return fmt::format("{}: {} -> {}", where(alpha, eta), psi_before, psi_after);
          });
        }
        const StepResult shifted = renyi_step(weights, b, AlphaParams{alpha, eta, kappa, 3.0});
        cancel.expect(renyi.weights.l1_distance(shifted.weights) <= 1e-12,
                      [&] { return where(alpha, eta); });

        const AlphaParams renyi_zero{alpha, eta, 0.0, 0.0};
        const StepResult renyi1 = renyi_step(weights, b, renyi_zero);
        const StepResult renyi2 = renyi_step(weights, b_exact(doubled, weights, alpha), renyi_zero);
        scale.expect(renyi1.weights.l1_distance(renyi2.weights) <= 1e-10,
                     [&] { return "renyi " + where(alpha, eta); });
      }
    }

    const double c = i % 3 == 0 ? 1.0 : 0.5 + static_cast<double>(i % 5);
    const SimplexWeights optimum = random_weights(problem.num_components(), rng);
    const FiniteSupportProblem scaled = problem.with_target(c * problem.mixture_values(optimum));
    for (const double alpha : {-0.5, 0.5, 2.0}) {
      const AlphaParams params{alpha, 0.5, 0.0, 0.0};
      const GradVector b = b_exact(scaled, optimum, alpha);
      const StepResult power = power_step(optimum, b, params);
      fixed.expect(power.weights.l1_distance(optimum) < 1e-12,
                   [&] { return fmt::format("problem {} alpha {} power", i, alpha); });
      const StepResult renyi = renyi_step(optimum, b, params);
      fixed.expect(renyi.weights.l1_distance(optimum) < 1e-12,
                   [&] { return fmt::format("problem {} alpha {} renyi", i, alpha); });
    }
  }

  bool ok = true;
  for (const Invariant* invariant :
       {&simplex, &support, &power_monotone, &renyi_monotone, &scale, &cancel, &positive, &fixed}) {
    ok = invariant->report(out) && ok;
  }
  return ok;
}

}  // namespace alpha_descent
