// Acceptance run: one PASS or FAIL line per criterion, exit status 1 if any
// criterion fails. Every descent here runs on a single thread.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "alpha_descent/config.hpp"
#include "alpha_descent/descent.hpp"
#include "alpha_descent/divergence.hpp"
#include "alpha_descent/experiment.hpp"
#include "alpha_descent/fixtures.hpp"
#include "alpha_descent/gradient.hpp"
#include "alpha_descent/trace_io.hpp"
#include "oracles.hpp"

namespace ad = alpha_descent;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const Outcome& outcome, Clock::time_point start) {
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s %d %s: %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL", number, name.c_str(),
              outcome.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

void info(const std::string& line) {
  std::printf("INFO %s\n", line.c_str());
  std::fflush(stdout);
}

ad::AlphaParams params(double alpha, double eta, double kappa = 0.0, double kappa_prime = 0.0) {
  return ad::AlphaParams{alpha, eta, kappa, kappa_prime};
}

bool nonincreasing(const ad::DescentTrace& trace, double tolerance, double* worst) {
  bool ok = true;
  for (std::size_t n = 1; n < trace.records.size(); ++n) {
    const double before = trace.records[n - 1].psi_exact;
    const double rise = (trace.records[n].psi_exact - before) / std::max(std::abs(before), 1e-300);
    *worst = std::max(*worst, rise);
    if (rise > tolerance) ok = false;
  }
  return ok;
}

/// Grid resolution giving at most about `budget` simplex points for J components.
std::size_t grid_resolution(std::size_t components, double budget) {
  std::size_t r = 1;
  const auto points = [&](std::size_t res) {
    double c = 1.0;
    for (std::size_t i = 1; i < components; ++i) c *= static_cast<double>(res + i) / static_cast<double>(i);
    return c;
  };
  while (points(r + 1) <= budget) ++r;
  return r;
}

/// sup |b_j + 1/(alpha-1)| over the simplex grid and its vertices.
double b_infinity(const ad::FiniteSupportProblem& problem, double alpha) {
  const std::size_t j = problem.num_components();
  double best = 0.0;
  const auto visit = [&](const Eigen::VectorXd& lambda) {
    const Eigen::VectorXd b = oracle::b(problem, lambda, alpha);
    for (Eigen::Index i = 0; i < b.size(); ++i) best = std::max(best, std::abs(b[i] + 1.0 / (alpha - 1.0)));
  };
  oracle::simplex_grid(j, grid_resolution(j, 3000), visit);
  for (std::size_t v = 0; v < j; ++v) {
    Eigen::VectorXd vertex = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(j));
    vertex[static_cast<Eigen::Index>(v)] = 1.0;
    visit(vertex);
  }
  return best;
}

/// min of psi over a simplex grid and a long exact power descent.
double psi_star(const ad::FiniteSupportProblem& problem, double alpha) {
  const std::size_t j = problem.num_components();
  double best = oracle::grid_minimum(problem, alpha, grid_resolution(j, 3000)).value;
  const auto trace = ad::run_descent(problem, ad::SimplexWeights::uniform(j), params(alpha, 1.0),
                                     ad::Algorithm::kPower, 3000);
  for (const auto& r : trace.records) best = std::min(best, r.psi_exact);
  return best;
}

Outcome power_monotonicity() {
  ad::Rng rng(1001);
  std::size_t runs = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const auto problem = ad::random_problem(rng);
    const auto start = ad::SimplexWeights::uniform(problem.num_components());
    for (double alpha : {-0.5, 0.0, 0.5, 0.99}) {
      for (double eta : {0.1, 0.5, 1.0}) {
        const auto trace = ad::run_descent(problem, start, params(alpha, eta), ad::Algorithm::kPower, 50);
        ++runs;
        if (!nonincreasing(trace, 1e-10, &worst)) ++bad;
      }
    }
  }
  return {bad == 0, fmt::format("{} runs of 50 steps, {} with a rise above 1e-10 relative, largest relative "
                                "change {:.3g}",
                                runs, bad, worst)};
}

Outcome renyi_monotonicity_and_rate() {
  ad::Rng rng(1002);
  std::size_t runs = 0, rises = 0, guard_breaks = 0, rate_breaks = 0;
  double worst = -std::numeric_limits<double>::infinity();
  double tightest = 0.0;  // largest observed gap / bound
  for (int i = 0; i < 200; ++i) {
    const auto problem = ad::random_problem(rng);
    const std::size_t j = problem.num_components();
    const auto start = ad::SimplexWeights::uniform(j);
    for (double alpha : {-0.5, 0.0, 0.5, 2.0}) {
      const double b_inf = b_infinity(problem, alpha);
      const double floor = psi_star(problem, alpha);
      for (double eta : {0.1, 0.5, 1.0}) {
        // |kappa| = 2 eta b_inf leaves 1 - eta b_inf / |kappa| = 1/2.
        const double kappa = (alpha < 1.0 ? -2.0 : 2.0) * eta * b_inf;
        const double kappa_prime = -3.0 * b_inf / ((alpha - 1.0) * kappa);
        const auto p = params(alpha, eta, kappa, kappa_prime);
        const auto trace = ad::run_descent(problem, start, p, ad::Algorithm::kRenyi, 99);
        ++runs;
        if (!nonincreasing(trace, 1e-10, &worst)) ++rises;
        for (std::size_t n = 1; n < trace.records.size(); ++n) {
          if (trace.records[n].guard_min < 0.0) {
            ++guard_breaks;
            break;
          }
        }
        const auto constants = ad::rate_constants_uniform_start(b_inf, p, j);
        for (std::size_t n = 1; n <= 100; ++n) {
          // The initial measure is the first iterate, so iterate N is the record after N-1 steps.
          const double gap = trace.records[n - 1].psi_exact - floor;
          const double bound = ad::rate_bound(constants, n, p, j);
          if (bound > 0.0) tightest = std::max(tightest, gap / bound);
          if (gap > bound) ++rate_breaks;
        }
      }
    }
  }
  return {rises == 0 && guard_breaks == 0 && rate_breaks == 0,
          fmt::format("{} runs: {} with a rise above 1e-10 relative (largest {:.3g}), {} with a guard "
                      "below 0, {} (N, run) pairs above the rate bound, largest gap/bound {:.3g}",
                      runs, rises, worst, guard_breaks, rate_breaks, tightest)};
}

Outcome convergence_to_optimum() {
  ad::Rng rng(1003);
  std::size_t runs = 0, off = 0, not_fixed = 0;
  double worst_gap = 0.0, worst_move = 0.0;
  std::size_t longest = 0;
  for (int i = 0; i < 5; ++i) {
    const auto problem = ad::well_specified_problem(3, 6, 2.0, rng);
    for (double alpha : {-0.5, 0.0, 0.5}) {
      ad::DescentOptions options;
      options.early_stop = true;
      options.fixed_point_tolerance = 1e-13;
      const auto trace = ad::run_descent(problem, ad::SimplexWeights::uniform(3), params(alpha, 1.0),
                                         ad::Algorithm::kPower, 200000, options);
      ++runs;
      longest = std::max(longest, trace.records.size() - 1);
      const auto& final_weights = trace.final_weights();
      const double psi = trace.records.back().psi_exact;
      const double grid = oracle::grid_minimum(problem, alpha, 1000).value;
      worst_gap = std::max(worst_gap, std::abs(psi - grid));
      if (std::abs(psi - grid) > 1e-3) ++off;
      const auto again = ad::power_step(final_weights, ad::b_exact(problem, final_weights, alpha), params(alpha, 1.0));
      const double moved = again.weights.l1_distance(final_weights);
      worst_move = std::max(worst_move, moved);
      if (trace.status != ad::TraceStatus::kFixedPoint || !(moved < 1e-12)) ++not_fixed;
    }
  }
  return {off == 0 && not_fixed == 0,
          fmt::format("{} runs (longest {} steps): largest |psi - grid minimum| {:.3g} (tolerance 1e-3), "
                      "largest move of a further step {:.3g} (tolerance 1e-12)",
                      runs, longest, worst_gap, worst_move)};
}

Outcome first_order_agreement() {
  ad::Rng rng(1004);
  std::size_t fixtures = 0, outside = 0;
  double low = std::numeric_limits<double>::infinity(), high = 0.0, sum = 0.0;
  std::size_t ratios = 0;
  for (int i = 0; i < 50; ++i) {
    const auto problem = ad::random_problem(rng);
    const auto w = ad::random_weights(problem.num_components(), rng);
    const double alpha = 0.5;
    const auto b = ad::b_exact(problem, w, alpha);
    const auto gap = [&](double eta) {
      const auto p = params(alpha, eta);
      return ad::power_step(w, b, p).weights.l1_distance(ad::renyi_step(w, b, p).weights);
    };
    ++fixtures;
    const double g1 = gap(1e-2), g2 = gap(5e-3), g3 = gap(2.5e-3);
    bool ok = true;
    for (double ratio : {g1 / g2, g2 / g3}) {
      low = std::min(low, ratio);
      high = std::max(high, ratio);
      sum += ratio;
      ++ratios;
      if (!(ratio >= 3.0 && ratio <= 5.0)) ok = false;
    }
    if (!ok) ++outside;
  }
  return {outside == 0, fmt::format("{} fixtures, {} with a halving ratio outside [3, 5]; ratios span "
                                    "[{:.4f}, {:.4f}], mean {:.4f}",
                                    fixtures, outside, low, high, sum / static_cast<double>(ratios))};
}

Outcome alpha_one_limit() {
  ad::Rng rng(1005);
  std::size_t fixtures = 0, outside = 0;
  double low = std::numeric_limits<double>::infinity(), high = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto problem = ad::random_problem(rng);
    const auto w = ad::random_weights(problem.num_components(), rng);
    const double eta = 0.5;
    const auto kl = ad::kl_step(w, ad::b_exact(problem, w, 1.0), eta);
    ++fixtures;
    bool ok = true;
    for (double sign : {-1.0, 1.0}) {
      const auto gap = [&](double delta) {
        const double alpha = 1.0 + sign * delta;
        return ad::power_step(w, ad::b_exact(problem, w, alpha), params(alpha, eta)).weights.l1_distance(kl.weights);
      };
      const double g1 = gap(1e-2), g2 = gap(5e-3), g3 = gap(2.5e-3);
      for (double ratio : {g1 / g2, g2 / g3}) {
        low = std::min(low, ratio);
        high = std::max(high, ratio);
        if (!(ratio >= 1.7 && ratio <= 2.3)) ok = false;
      }
    }
    if (!ok) ++outside;
  }
  return {outside == 0, fmt::format("{} fixtures, both sides of 1, {} with a ratio outside [1.7, 2.3]; "
                                    "ratios span [{:.4f}, {:.4f}]",
                                    fixtures, outside, low, high)};
}

Outcome scale_invariance() {
  ad::Rng rng(1006);
  double worst = 0.0;
  std::size_t runs = 0;
  for (int i = 0; i < 50; ++i) {
    const auto problem = ad::random_problem(rng);
    const auto doubled = problem.with_scaled_target(2.0);
    const auto start = ad::random_weights(problem.num_components(), rng);
    for (auto algorithm : {ad::Algorithm::kPower, ad::Algorithm::kRenyi}) {
      for (double alpha : {-0.5, 0.5, 2.0}) {
        const auto p = params(alpha, 0.5);
        const auto a = ad::run_descent(problem, start, p, algorithm, 50);
        const auto b = ad::run_descent(doubled, start, p, algorithm, 50);
        ++runs;
        for (std::size_t n = 0; n < a.records.size(); ++n) {
          worst = std::max(worst, (a.records[n].weights.values() - b.records[n].weights.values())
                                      .lpNorm<Eigen::Infinity>());
        }
      }
    }
  }
  return {worst <= 1e-10, fmt::format("{} paired runs of 50 steps, largest weight difference {:.3g} "
                                      "(tolerance 1e-10)",
                                      runs, worst)};
}

Outcome estimator_unbiasedness() {
  ad::Rng rng(1007);
  ad::FixtureShape shape;
  shape.max_atoms = 10;
  shape.max_components = 5;
  std::size_t checks = 0, outside = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto problem = ad::random_problem(rng, shape);
    const auto w = ad::random_weights(problem.num_components(), rng);
    const ad::MixtureState state(w, problem.atom_particles(), problem.atom_kernel());
    const auto target = problem.atom_target();
    for (double alpha : {0.5, 2.0}) {
      const auto exact = ad::b_exact(problem, w, alpha).values;
      const auto j = exact.size();
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(j), squares = Eigen::VectorXd::Zero(j);
      const int batches = 200;
      for (int r = 0; r < batches; ++r) {
        const auto samples = ad::sample_mixture(state, 1000, rng);
        const auto b = ad::b_monte_carlo(state, target, samples, alpha).values;
        sum += b;
        squares += b.cwiseProduct(b);
      }
      const Eigen::VectorXd mean = sum / batches;
      for (Eigen::Index k = 0; k < j; ++k) {
        const double var = (squares[k] / batches - mean[k] * mean[k]) * batches / (batches - 1.0);
        const double se = std::sqrt(std::max(var, 0.0) / batches);
        const double z = std::abs(mean[k] - exact[k]) / se;
        worst = std::max(worst, z);
        ++checks;
        if (!(z <= 4.0)) ++outside;
      }
    }
  }
  return {outside == 0, fmt::format("{} components over 10 fixtures and alpha in {{0.5, 2}}: {} beyond 4 "
                                    "standard errors, largest |z| {:.2f}",
                                    checks, outside, worst)};
}

Outcome vr_identity() {
  ad::Rng rng(1008);
  double worst = 0.0;
  std::size_t checks = 0;
  for (int i = 0; i < 200; ++i) {
    const auto problem = ad::random_problem(rng);
    const auto w = ad::random_weights(problem.num_components(), rng);
    for (double alpha : {0.5, 2.0}) {
      const double lhs = ad::psi_ar_exact(problem, w, params(alpha, 1.0));
      const double rhs = -ad::vr_bound_exact(problem, w, alpha) / alpha;
      worst = std::max(worst, std::abs(lhs - rhs));
      ++checks;
    }
  }
  return {worst <= 1e-12, fmt::format("{} evaluations, largest difference {:.3g} (tolerance 1e-12)", checks, worst)};
}

struct FinalStats {
  double first_mean = 0.0;
  double final_mean = 0.0;
  double final_std = 0.0;
  std::size_t failed = 0;
};

FinalStats desk_run(const std::string& algorithm, std::size_t m, ad::EstimatorForm form) {
  nlohmann::json j{{"algorithm", algorithm}, {"alpha", 0.5}, {"eta0", 0.3}, {"kappa", 0.0},
                   {"j", 20},                {"m", m},       {"n", 20},     {"t", 10},
                   {"d", 16},                {"replicates", 20}, {"seed", 2024},
                   {"gradient_estimator", ad::to_string(form)}};
  const auto config = ad::config_from_json(j);
  const auto traces = ad::run_experiment(config, 1);
  FinalStats stats;
  for (const auto& t : traces) stats.failed += t.status != ad::TraceStatus::kCompleted;
  stats.first_mean = stats.final_mean = std::numeric_limits<double>::quiet_NaN();
  for (const auto& point : ad::summarise(traces)) {
    if (point.t == 1 && point.n == 20) stats.first_mean = point.vr_mean;
    if (point.t == 10 && point.n == 20) {
      stats.final_mean = point.vr_mean;
      stats.final_std = point.vr_std;
    }
  }
  return stats;
}

Outcome desk_reproduction() {
  bool pass = true;
  std::string detail;
  FinalStats power_1000, renyi_1000;
  for (std::size_t m : {100u, 1000u}) {
    const auto power = desk_run("power", m, ad::EstimatorForm::kKernelIdentity);
    const auto renyi = desk_run("renyi", m, ad::EstimatorForm::kKernelIdentity);
    const auto emd = desk_run("emd", m, ad::EstimatorForm::kKernelIdentity);
    const bool improves = power.final_mean > power.first_mean && renyi.final_mean > renyi.first_mean;
    const bool emd_below = emd.final_mean < power.final_mean;
    pass = pass && improves && emd_below && power.failed == 0 && renyi.failed == 0;
    detail += fmt::format("M={}: power {:.3f} -> {:.3f} (sd {:.3f}), renyi {:.3f} -> {:.3f} (sd {:.3f}), "
                          "emd final {:.3f}; ",
                          m, power.first_mean, power.final_mean, power.final_std, renyi.first_mean,
                          renyi.final_mean, renyi.final_std, emd.final_mean);
    if (m == 1000) {
      power_1000 = power;
      renyi_1000 = renyi;
    }
  }
  const double pooled = std::sqrt((power_1000.final_std * power_1000.final_std +
                                   renyi_1000.final_std * renyi_1000.final_std) / 2.0);
  const double difference = std::abs(power_1000.final_mean - renyi_1000.final_mean);
  pass = pass && difference <= pooled;
  detail += fmt::format("M=1000 power vs renyi |difference| {:.3f}, pooled sd {:.3f}", difference, pooled);

  for (std::size_t m : {100u, 1000u}) {
    const auto power = desk_run("power", m, ad::EstimatorForm::kLiteral);
    const auto renyi = desk_run("renyi", m, ad::EstimatorForm::kLiteral);
    info(fmt::format("desk run with the literal gradient estimator, M={}: {}/20 power and {}/20 renyi "
                     "replicates stopped on a failed step",
                     m, power.failed, renyi.failed));
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const auto run = [](int number, const std::string& name, Outcome (*criterion)()) {
    const auto start = Clock::now();
    report(number, name, criterion(), start);
  };
  run(1, "power descent monotonicity", power_monotonicity);
  run(2, "renyi descent monotonicity and rate bound", renyi_monotonicity_and_rate);
  run(3, "convergence to the simplex optimum", convergence_to_optimum);
  run(4, "first-order agreement of power and renyi steps in eta", first_order_agreement);
  run(5, "alpha to 1 limit of the power step", alpha_one_limit);
  run(6, "scale invariance of power and renyi trajectories", scale_invariance);
  run(7, "Monte Carlo gradient unbiasedness", estimator_unbiasedness);
  run(8, "VR bound identity", vr_identity);
  run(9, "desk-scale mixture experiment", desk_reproduction);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
