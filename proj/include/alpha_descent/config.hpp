#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpha_descent/descent.hpp"
#include "alpha_descent/divergence.hpp"
#include "alpha_descent/model.hpp"

namespace alpha_descent {

enum class Exploration { kResample, kMeanUpdate };

std::string_view to_string(Exploration exploration);
Exploration parse_exploration(std::string_view name);

/// Configuration problems, always naming the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& problem)
      : std::runtime_error("config field '" + field + "': " + problem), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Target p. Without explicit means it is c * (N(-s 1_d, I) + N(s 1_d, I)) / 2.
struct TargetSpec {
  double separation = 2.0;
  double scale = 2.0;
  std::vector<std::vector<double>> means;
  std::vector<double> weights;

  GaussianMixtureTarget build(std::size_t dimension) const;
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kPower;
  double alpha = 0.5;
  double eta0 = 0.3;
  double kappa = 0.0;
  double kappa_prime = 0.0;
  std::size_t num_components = 100;      // j
  std::vector<std::size_t> sample_sizes;  // m; one run per entry
  std::size_t num_steps = 20;            // n, descent steps per phase
  std::size_t num_phases = 10;           // t
  std::size_t dimension = 16;            // d
  std::size_t replicates = 100;
  TargetSpec target;
  double q0_scale = 5.0;  // covariance q0_scale * I_d of the initial particles
  double c_h = 1.0;
  std::uint64_t seed = 0;
  Exploration exploration = Exploration::kResample;
  bool renyi_unweighted_mu_b = false;
  bool reuse_monitor_samples = false;
  /// The literal estimator drives (alpha-1) b + 1 negative on sparse batches,
  /// which the strict step guards refuse, so the kernel identity form is the
  /// default. Gradients taken at alpha = 1 always use the literal form.
  EstimatorForm gradient_estimator = EstimatorForm::kKernelIdentity;

  /// eta0 / sqrt(N), or eta0 when N = 0.
  double eta() const;
  AlphaParams params() const;
  double bandwidth() const { return bandwidth_rule(num_components, dimension, c_h); }

  /// Throws ConfigError on the first invalid field.
  void validate() const;

  /// One config per entry of sample_sizes.
  std::vector<ExperimentConfig> expand_sample_sizes() const;
};

/// Parses and validates a config. Unknown keys are errors.
ExperimentConfig config_from_json(const nlohmann::json& json);
ExperimentConfig parse_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace alpha_descent
