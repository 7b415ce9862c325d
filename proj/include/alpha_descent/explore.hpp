#pragma once

#include <cstddef>

#include "alpha_descent/model.hpp"

namespace alpha_descent {

/// Draws J new particles i.i.d. from mu_lambda k. The weights are untouched;
/// the returned set has its generation incremented.
ParticleSet explore_resample(const MixtureState& state, Rng& rng);

/// Moves every particle to a weighted mean of M fresh samples Y' ~ mu_lambda k,
///   theta_j <- sum_m g_j(Y'_m) Y'_m / sum_m g_j(Y'_m),
///   g_j(y) = k(theta_j, y) / mu_lambda k(y) * (mu_lambda k(y) / p(y))^(alpha-1),
/// with the g_j computed in log domain and self-normalised per component.
/// Requires alpha in [0, 1) and M >= 1 (std::invalid_argument otherwise);
/// throws NormaliserUnderflow naming j when every g_j(Y'_m) vanishes.
ParticleSet explore_mean_update(const MixtureState& state, const Target& target,
                                std::size_t sample_count, double alpha, Rng& rng);

/// Same update from an explicit sample set; exposed for testing.
ParticleSet explore_mean_update_from_samples(const MixtureState& state, const Target& target,
                                             std::span<const Point> samples, double alpha);

}  // namespace alpha_descent
