#include "alpha_descent/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "alpha_descent/explore.hpp"

namespace alpha_descent {
namespace {

ParticleSet initial_particles(const ExperimentConfig& config, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(config.q0_scale));
  std::vector<Point> particles;
  particles.reserve(config.num_components);
  for (std::size_t j = 0; j < config.num_components; ++j) {
    Point theta(static_cast<Eigen::Index>(config.dimension));
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = normal(rng);
    particles.push_back(std::move(theta));
  }
  return ParticleSet(std::move(particles), 1);
}

void append(DescentTrace& into, DescentTrace&& from) {
  for (auto& record : from.records) into.records.push_back(std::move(record));
  into.non_finite_bound = into.non_finite_bound || from.non_finite_bound;
}

}  // namespace

DescentTrace run_replicate(const ExperimentConfig& config, std::size_t replicate) {
  if (config.sample_sizes.size() != 1) {
    throw std::invalid_argument(
        fmt::format("run_replicate needs exactly one sample size, got {}", config.sample_sizes.size()));
  }
  const auto origin = std::chrono::steady_clock::now();
  Rng rng = make_stream(config.seed, replicate);
  const Target target = config.target.build(config.dimension).as_target();
  const AlphaParams params = config.params();
  auto kernel = std::make_shared<const GaussianKernel>(config.bandwidth(), config.dimension);

  MixtureState state(SimplexWeights::uniform(config.num_components), initial_particles(config, rng),
                     kernel);
  const EstimatorForm form = gradient_alpha(config.algorithm, params) == 1.0
                                 ? EstimatorForm::kLiteral
                                 : config.gradient_estimator;
  MonteCarloEstimator estimator{config.sample_sizes.front(), &rng, config.reuse_monitor_samples, form};

  DescentTrace trace;
  for (std::size_t t = 1; t <= config.num_phases; ++t) {
    DescentOptions options;
    options.renyi_unweighted_mu_b = config.renyi_unweighted_mu_b;
    options.record_initial = t == 1;
    options.phase = t;
    options.clock_origin = origin;
    state = state.with_weights(SimplexWeights::uniform(config.num_components));
    try {
      DescentTrace phase = run_descent(state, target, params, config.algorithm, config.num_steps,
                                       estimator, options);
      if (!phase.records.empty()) state = state.with_weights(phase.final_weights());
      append(trace, std::move(phase));
    } catch (const DescentError& error) {
      DescentTrace partial = error.partial_trace();
      append(trace, std::move(partial));
      trace.status = error.status();
      trace.message = fmt::format("phase {}: {}", t, error.what());
      return trace;
    }

    try {
      ParticleSet next = config.exploration == Exploration::kResample
                             ? explore_resample(state, rng)
                             : explore_mean_update(state, target, estimator.sample_count,
                                                   config.alpha, rng);
      state = state.with_particles(std::move(next));
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& error) {
      trace.status = TraceStatus::kNumericalFailure;
      trace.message = fmt::format("phase {} exploration failed: {}", t, error.what());
      return trace;
    }
  }
  return trace;
}

std::vector<DescentTrace> run_experiment(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  std::vector<DescentTrace> traces(config.replicates);
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(config.replicates, 1));
  if (workers == 1) {
    for (std::size_t r = 0; r < config.replicates; ++r) traces[r] = run_replicate(config, r);
    return traces;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t r = next++; r < config.replicates; r = next++) {
      try {
        traces[r] = run_replicate(config, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return traces;
}

}  // namespace alpha_descent
