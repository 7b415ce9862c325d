#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace alpha_descent {

/// A point in R^d. Component parameters and samples share this type.
using Point = Eigen::VectorXd;

/// Pseudo-random stream. Every consumer takes it by exclusive reference.
using Rng = std::mt19937_64;

/// Builds the stream for replicate `stream` of an experiment seeded with `seed`.
/// Distinct (seed, stream) pairs give independent, reproducible generators.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// log(sum(exp(x))) with max-subtraction. Returns -inf for an empty range or
/// when every entry is -inf; propagates NaN.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace alpha_descent
