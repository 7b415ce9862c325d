#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>

namespace alpha_descent {

/// Runs the exact-oracle invariant suite on `count` random finite-support
/// problems drawn from `seed`: simplex and support preservation, monotone
/// descent, scale invariance, kappa' cancellation, positivity of
/// (alpha-1) b + 1 and fixed points at the optimum. Writes one line per
/// invariant to `out` and returns true when all hold.
bool run_invariant_checks(std::uint64_t seed, std::size_t count, std::ostream& out);

}  // namespace alpha_descent
