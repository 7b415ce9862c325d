#include "alpha_descent/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace alpha_descent {
namespace {

double log_uniform(Rng& rng, double decades) {
  std::uniform_real_distribution<double> u(-decades, decades);
  return std::pow(10.0, u(rng));
}

Eigen::VectorXd positive_vector(std::size_t size, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = log_uniform(rng, 1.0);
  return v;
}

}  // namespace

FiniteSupportProblem random_problem(Rng& rng, const FixtureShape& shape) {
  if (shape.min_components == 0 || shape.min_components > shape.max_components ||
      shape.min_atoms > shape.max_atoms || shape.max_atoms < shape.min_components) {
    throw std::invalid_argument("inconsistent fixture shape");
  }
  std::uniform_int_distribution<std::size_t> components(shape.min_components, shape.max_components);
  const std::size_t j = components(rng);
  std::uniform_int_distribution<std::size_t> atoms(std::max(shape.min_atoms, j), shape.max_atoms);
  const std::size_t s = atoms(rng);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s));
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    for (Eigen::Index c = 0; c < raw.cols(); ++c) raw(r, c) = log_uniform(rng, 1.0);
  }
  return FiniteSupportProblem::with_normalised_kernel(positive_vector(s, rng), positive_vector(s, rng), raw);
}

FiniteSupportProblem independent_problem(std::size_t num_components, std::size_t num_atoms, Rng& rng) {
  if (num_components == 0 || num_atoms < num_components) {
    throw std::invalid_argument("independent_problem needs 1 <= J <= S");
  }
  std::uniform_real_distribution<double> background(0.01, 0.1);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(num_components), static_cast<Eigen::Index>(num_atoms));
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    for (Eigen::Index c = 0; c < raw.cols(); ++c) raw(r, c) = background(rng);
    raw(r, r) += 1.0;
  }
  return FiniteSupportProblem::with_normalised_kernel(positive_vector(num_atoms, rng),
                                                      positive_vector(num_atoms, rng), raw);
}

FiniteSupportProblem well_specified_problem(std::size_t num_components, std::size_t num_atoms,
                                            double c, Rng& rng) {
  const FiniteSupportProblem base = independent_problem(num_components, num_atoms, rng);
  const SimplexWeights lambda = random_weights(num_components, rng);
  return base.with_target(c * base.mixture_values(lambda));
}

SimplexWeights random_weights(std::size_t count, Rng& rng, bool allow_zeros) {
  if (count == 0) throw std::invalid_argument("random_weights needs count >= 1");
  std::exponential_distribution<double> exponential(1.0);
  std::bernoulli_distribution zero(0.3);
  Eigen::VectorXd v(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = allow_zeros && zero(rng) ? 0.0 : exponential(rng) + 1e-3;
  }
  if (v.sum() == 0.0) {
    std::uniform_int_distribution<Eigen::Index> pick(0, v.size() - 1);
    v[pick(rng)] = 1.0;
  }
  return SimplexWeights::normalised(v);
}

}  // namespace alpha_descent
