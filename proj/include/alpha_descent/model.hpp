#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "alpha_descent/numerics.hpp"

namespace alpha_descent {

/// Mixture weights: a point on the probability simplex of dimension J.
///
/// Entries are nonnegative and sum to one within 1e-12. Zero entries are
/// allowed; they mark components that multiplicative updates can never revive.
class SimplexWeights {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates `values` as-is; throws std::invalid_argument off the simplex.
  explicit SimplexWeights(Eigen::VectorXd values);

  static SimplexWeights uniform(std::size_t count);

  /// Divides a nonnegative vector with positive finite sum by that sum.
  static SimplexWeights normalised(const Eigen::VectorXd& unnormalised);

  /// Normalises exp(log_weights) with max-subtraction. Entries equal to -inf
  /// become exact zeros. Throws NormaliserUnderflow if every entry is -inf or
  /// any entry is NaN or +inf.
  static SimplexWeights from_log_weights(const Eigen::VectorXd& log_weights);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }
  const Eigen::VectorXd& values() const { return values_; }

  double l1_distance(const SimplexWeights& other) const;

 private:
  Eigen::VectorXd values_;
};

/// The J component parameters theta_1..theta_J, all in R^d.
class ParticleSet {
 public:
  /// Throws std::invalid_argument on an empty set, mixed dimensions or
  /// non-finite coordinates.
  explicit ParticleSet(std::vector<Point> particles, std::size_t generation = 0);

  std::size_t size() const { return particles_.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(particles_.front().size()); }
  std::size_t generation() const { return generation_; }
  const Point& operator[](std::size_t j) const { return particles_[j]; }
  const std::vector<Point>& particles() const { return particles_; }

 private:
  std::vector<Point> particles_;
  std::size_t generation_;
};

/// Markov transition kernel with a density k(theta, .) with respect to the
/// reference measure. Implementations must be immutable and thread-safe.
class KernelDensity {
 public:
  virtual ~KernelDensity() = default;

  virtual double log_density(const Point& theta, const Point& y) const = 0;
  virtual Point sample(const Point& theta, Rng& rng) const = 0;
  virtual std::size_t dimension() const = 0;
};

/// log N(y; theta, h^2 I_d). Throws std::invalid_argument if the dimensions of
/// theta and y differ or h <= 0.
double gaussian_kernel_logpdf(const Point& theta, const Point& y, double bandwidth);

/// Isotropic Gaussian kernel k_h(theta, y) = N(y; theta, h^2 I_d).
class GaussianKernel final : public KernelDensity {
 public:
  GaussianKernel(double bandwidth, std::size_t dimension);

  double log_density(const Point& theta, const Point& y) const override;
  Point sample(const Point& theta, Rng& rng) const override;
  std::size_t dimension() const override { return dimension_; }
  double bandwidth() const { return bandwidth_; }

 private:
  double bandwidth_;
  std::size_t dimension_;
  double log_normaliser_;
};

/// h = c_h * J^(-1/(4+d)).
double bandwidth_rule(std::size_t num_components, std::size_t dimension, double c_h = 1.0);

/// log sum_j lambda_j k(theta_j, y), skipping components with zero weight.
double mixture_logpdf(const SimplexWeights& weights, const ParticleSet& particles,
                      const KernelDensity& kernel, const Point& y);

/// The mixture mu_lambda k = sum_j lambda_j k(theta_j, .) being optimised.
struct MixtureState {
  /// Throws std::invalid_argument if sizes disagree or the kernel is null or
  /// of the wrong dimension.
  MixtureState(SimplexWeights weights, ParticleSet particles,
               std::shared_ptr<const KernelDensity> kernel);

  std::size_t size() const { return weights.size(); }
  MixtureState with_weights(SimplexWeights new_weights) const;
  MixtureState with_particles(ParticleSet new_particles) const;

  SimplexWeights weights;
  ParticleSet particles;
  std::shared_ptr<const KernelDensity> kernel;
};

double mixture_logpdf(const MixtureState& state, const Point& y);

/// log k(theta_j, y_m) as a J x M matrix.
Eigen::MatrixXd log_kernel_matrix(const MixtureState& state, std::span<const Point> samples);

/// log mu_lambda k(y_m) for every column of a log-kernel matrix.
Eigen::VectorXd log_mixture_values(const SimplexWeights& weights,
                                   const Eigen::MatrixXd& log_kernel);

/// An unnormalised positive target density p, evaluated in log domain.
class Target {
 public:
  using LogDensityFn = std::function<double(const Point&)>;

  explicit Target(LogDensityFn log_density, std::optional<double> normalisation_hint = {});

  double log_density(const Point& y) const { return log_density_(y); }

  /// Total mass of p when known; only used by tests.
  std::optional<double> normalisation_hint() const { return normalisation_hint_; }

  /// The target c * p.
  Target scaled(double c) const;

 private:
  LogDensityFn log_density_;
  std::optional<double> normalisation_hint_;
};

/// p(y) = c * sum_i w_i N(y; m_i, I_d).
class GaussianMixtureTarget {
 public:
  GaussianMixtureTarget(std::vector<Point> means, Eigen::VectorXd weights, double scale);

  /// Two equally weighted modes at -s*1_d and +s*1_d.
  static GaussianMixtureTarget bimodal(std::size_t dimension, double separation, double scale);

  double log_density(const Point& y) const;
  std::size_t dimension() const { return static_cast<std::size_t>(means_.front().size()); }
  double scale() const { return scale_; }
  const std::vector<Point>& means() const { return means_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  Target as_target() const;

 private:
  std::vector<Point> means_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_weights_;
  double scale_;
  double log_scale_;
};

}  // namespace alpha_descent
