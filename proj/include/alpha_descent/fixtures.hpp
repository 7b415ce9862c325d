#pragma once

#include <cstddef>

#include "alpha_descent/finite_support.hpp"
#include "alpha_descent/model.hpp"
#include "alpha_descent/numerics.hpp"

namespace alpha_descent {

/// Size ranges for random finite-support problems.
struct FixtureShape {
  std::size_t min_atoms = 2;
  std::size_t max_atoms = 20;
  std::size_t min_components = 2;
  std::size_t max_components = 8;
};

/// Every entry drawn log-uniformly over two decades, with the kernel rows
/// then normalised against nu. S >= J is enforced.
FiniteSupportProblem random_problem(Rng& rng, const FixtureShape& shape = {});

/// J components over S >= J atoms whose kernel rows are linearly independent
/// by construction: row j puts a dominant mass on atom j on top of a small
/// positive background.
FiniteSupportProblem independent_problem(std::size_t num_components, std::size_t num_atoms, Rng& rng);

/// Problem with p = c * mu_lambda k for a random lambda, so that the optimum
/// is attained on the simplex.
FiniteSupportProblem well_specified_problem(std::size_t num_components, std::size_t num_atoms,
                                            double c, Rng& rng);

/// A random point of the simplex; with `allow_zeros` some entries (never all)
/// are exactly zero.
SimplexWeights random_weights(std::size_t count, Rng& rng, bool allow_zeros = false);

}  // namespace alpha_descent
