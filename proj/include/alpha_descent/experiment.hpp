#pragma once

#include <cstddef>
#include <vector>

#include "alpha_descent/config.hpp"
#include "alpha_descent/descent.hpp"

namespace alpha_descent {

/// One replicate of the exploitation-exploration loop. The particles start
/// i.i.d. from N(0, q0_scale I_d); every phase resets the weights to uniform,
/// runs N Monte Carlo descent steps and then moves the particles with the
/// configured exploration step. Uses the stream make_stream(seed, replicate).
///
/// A failed step ends the trace with its status instead of throwing.
/// Requires a single sample size (see ExperimentConfig::expand_sample_sizes).
DescentTrace run_replicate(const ExperimentConfig& config, std::size_t replicate);

/// Every replicate of `config`, in replicate order. Replicates run on up to
/// `threads` worker threads; the result does not depend on `threads`.
std::vector<DescentTrace> run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

}  // namespace alpha_descent
