#include "alpha_descent/explore.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "alpha_descent/errors.hpp"
#include "alpha_descent/gradient.hpp"

namespace alpha_descent {

ParticleSet explore_resample(const MixtureState& state, Rng& rng) {
  return ParticleSet(sample_mixture(state, state.size(), rng), state.particles.generation() + 1);
}

ParticleSet explore_mean_update_from_samples(const MixtureState& state, const Target& target,
                                             std::span<const Point> samples, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(fmt::format("mean update needs alpha in [0, 1), got {}", alpha));
  }
  if (samples.empty()) throw std::invalid_argument("mean update needs at least one sample");

  const Eigen::MatrixXd log_k = log_kernel_matrix(state, samples);
  const Eigen::VectorXd log_mix = log_mixture_values(state.weights, log_k);
  Eigen::VectorXd log_ratio(log_mix.size());
  for (std::size_t m = 0; m < samples.size(); ++m) {
    const auto mm = static_cast<Eigen::Index>(m);
    log_ratio[mm] = (alpha - 1.0) * (log_mix[mm] - target.log_density(samples[m]));
  }

  std::vector<Point> means;
  means.reserve(state.size());
  Eigen::VectorXd log_g(log_mix.size());
  for (Eigen::Index j = 0; j < log_k.rows(); ++j) {
    log_g = log_k.row(j).transpose() - log_mix + log_ratio;
    const double log_total = log_sum_exp(log_g);
    if (!std::isfinite(log_total)) {
      throw NormaliserUnderflow(
          fmt::format("mean update weights for component {} are degenerate (log sum {})", j,
                      log_total));
    }
    Point mean = Point::Zero(samples.front().size());
    for (std::size_t m = 0; m < samples.size(); ++m) {
      mean += std::exp(log_g[static_cast<Eigen::Index>(m)] - log_total) * samples[m];
    }
    means.push_back(std::move(mean));
  }
  return ParticleSet(std::move(means), state.particles.generation() + 1);
}

ParticleSet explore_mean_update(const MixtureState& state, const Target& target,
                                std::size_t sample_count, double alpha, Rng& rng) {
  if (sample_count == 0) throw std::invalid_argument("mean update needs M >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(fmt::format("mean update needs alpha in [0, 1), got {}", alpha));
  }
  const std::vector<Point> samples = sample_mixture(state, sample_count, rng);
  return explore_mean_update_from_samples(state, target, samples, alpha);
}

}  // namespace alpha_descent
