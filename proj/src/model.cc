#include "alpha_descent/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

#include "alpha_descent/errors.hpp"

namespace alpha_descent {

SimplexWeights::SimplexWeights(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) {
    throw std::invalid_argument("simplex weights must have at least one entry");
  }
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]) || values_[j] < 0.0) {
      throw std::invalid_argument(
          fmt::format("simplex weight {} is {}, expected a finite nonnegative value", j, values_[j]));
    }
  }
  const double sum = values_.sum();
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument(fmt::format("simplex weights sum to {:.17g}, expected 1", sum));
  }
}

SimplexWeights SimplexWeights::uniform(std::size_t count) {
  if (count == 0) throw std::invalid_argument("uniform weights need at least one component");
  return SimplexWeights(
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), 1.0 / static_cast<double>(count)));
}

SimplexWeights SimplexWeights::normalised(const Eigen::VectorXd& unnormalised) {
  if (unnormalised.size() == 0 || (unnormalised.array() < 0.0).any() ||
      !unnormalised.allFinite()) {
    throw std::invalid_argument("cannot normalise: entries must be finite and nonnegative");
  }
  const double sum = unnormalised.sum();
  if (!(sum > 0.0)) throw std::invalid_argument("cannot normalise a vector with zero mass");
  return SimplexWeights(unnormalised / sum);
}

SimplexWeights SimplexWeights::from_log_weights(const Eigen::VectorXd& log_weights) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double max_value = kNegInf;
  for (Eigen::Index j = 0; j < log_weights.size(); ++j) {
    const double v = log_weights[j];
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw NormaliserUnderflow(fmt::format("log weight {} is {}", j, v));
    }
    max_value = std::max(max_value, v);
  }
  if (max_value == kNegInf) {
    throw NormaliserUnderflow("all log weights are -inf; no mass left to normalise");
  }
  // std::exp keeps exp(-inf) an exact zero; the vectorised array exp does not.
  Eigen::VectorXd w(log_weights.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = std::exp(log_weights[j] - max_value);
  return SimplexWeights(w / w.sum());
}

double SimplexWeights::l1_distance(const SimplexWeights& other) const {
  if (other.size() != size()) throw std::invalid_argument("l1 distance between different sizes");
  return (values_ - other.values_).lpNorm<1>();
}

ParticleSet::ParticleSet(std::vector<Point> particles, std::size_t generation)
    : particles_(std::move(particles)), generation_(generation) {
  if (particles_.empty()) throw std::invalid_argument("particle set must not be empty");
  const Eigen::Index d = particles_.front().size();
  if (d == 0) throw std::invalid_argument("particles must have positive dimension");
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    if (particles_[j].size() != d) {
      throw std::invalid_argument(fmt::format("particle {} has dimension {}, expected {}", j,
                                              particles_[j].size(), d));
    }
    if (!particles_[j].allFinite()) {
      throw std::invalid_argument(fmt::format("particle {} has non-finite coordinates", j));
    }
  }
}

double gaussian_kernel_logpdf(const Point& theta, const Point& y, double bandwidth) {
  if (theta.size() != y.size()) {
    throw std::invalid_argument(
        fmt::format("kernel dimension mismatch: theta has {}, y has {}", theta.size(), y.size()));
  }
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const double h2 = bandwidth * bandwidth;
  const double d = static_cast<double>(y.size());
  return -(y - theta).squaredNorm() / (2.0 * h2) - 0.5 * d * std::log(2.0 * std::numbers::pi * h2);
}

GaussianKernel::GaussianKernel(double bandwidth, std::size_t dimension)
    : bandwidth_(bandwidth), dimension_(dimension) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("bandwidth must be positive and finite");
  }
  if (dimension == 0) throw std::invalid_argument("kernel dimension must be positive");
  log_normaliser_ =
      0.5 * static_cast<double>(dimension) * std::log(2.0 * std::numbers::pi * bandwidth * bandwidth);
}

double GaussianKernel::log_density(const Point& theta, const Point& y) const {
  if (theta.size() != y.size() || static_cast<std::size_t>(y.size()) != dimension_) {
    throw std::invalid_argument(fmt::format("kernel of dimension {} evaluated at theta({}), y({})",
                                            dimension_, theta.size(), y.size()));
  }
  return -(y - theta).squaredNorm() / (2.0 * bandwidth_ * bandwidth_) - log_normaliser_;
}

Point GaussianKernel::sample(const Point& theta, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point y(theta.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = theta[i] + bandwidth_ * normal(rng);
  return y;
}

double bandwidth_rule(std::size_t num_components, std::size_t dimension, double c_h) {
  if (num_components == 0 || dimension == 0 || !(c_h > 0.0)) {
    throw std::invalid_argument("bandwidth rule needs J >= 1, d >= 1 and c_h > 0");
  }
  return c_h * std::pow(static_cast<double>(num_components),
                        -1.0 / (4.0 + static_cast<double>(dimension)));
}

double mixture_logpdf(const SimplexWeights& weights, const ParticleSet& particles,
                      const KernelDensity& kernel, const Point& y) {
  if (weights.size() != particles.size()) {
    throw std::invalid_argument(fmt::format("{} weights for {} particles", weights.size(),
                                            particles.size()));
  }
  // Scratch buffer sized to J; zero-weight components contribute -inf.
  Eigen::VectorXd terms(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t j = 0; j < weights.size(); ++j) {
    terms[static_cast<Eigen::Index>(j)] =
        weights[j] > 0.0 ? std::log(weights[j]) + kernel.log_density(particles[j], y)
                         : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms);
}

MixtureState::MixtureState(SimplexWeights weights_in, ParticleSet particles_in,
                           std::shared_ptr<const KernelDensity> kernel_in)
    : weights(std::move(weights_in)), particles(std::move(particles_in)), kernel(std::move(kernel_in)) {
  if (!kernel) throw std::invalid_argument("mixture state needs a kernel");
  if (weights.size() != particles.size()) {
    throw std::invalid_argument(fmt::format("mixture state has {} weights but {} particles",
                                            weights.size(), particles.size()));
  }
  if (particles.dimension() != kernel->dimension()) {
    throw std::invalid_argument(fmt::format("particles of dimension {} with a kernel of dimension {}",
                                            particles.dimension(), kernel->dimension()));
  }
}

MixtureState MixtureState::with_weights(SimplexWeights new_weights) const {
  return MixtureState(std::move(new_weights), particles, kernel);
}

MixtureState MixtureState::with_particles(ParticleSet new_particles) const {
  return MixtureState(weights, std::move(new_particles), kernel);
}

double mixture_logpdf(const MixtureState& state, const Point& y) {
  return mixture_logpdf(state.weights, state.particles, *state.kernel, y);
}

Eigen::MatrixXd log_kernel_matrix(const MixtureState& state, std::span<const Point> samples) {
  const auto J = static_cast<Eigen::Index>(state.size());
  const auto M = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd log_k(J, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index j = 0; j < J; ++j) {
      log_k(j, m) = state.kernel->log_density(state.particles[static_cast<std::size_t>(j)],
                                              samples[static_cast<std::size_t>(m)]);
    }
  }
  return log_k;
}

Eigen::VectorXd log_mixture_values(const SimplexWeights& weights,
                                   const Eigen::MatrixXd& log_kernel) {
  if (static_cast<std::size_t>(log_kernel.rows()) != weights.size()) {
    throw std::invalid_argument("log-kernel rows must match the number of weights");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd log_weights(log_kernel.rows());
  for (Eigen::Index j = 0; j < log_weights.size(); ++j) {
    const double w = weights[static_cast<std::size_t>(j)];
    log_weights[j] = w > 0.0 ? std::log(w) : kNegInf;
  }
  Eigen::VectorXd out(log_kernel.cols());
  Eigen::VectorXd terms(log_kernel.rows());
  for (Eigen::Index m = 0; m < log_kernel.cols(); ++m) {
    for (Eigen::Index j = 0; j < terms.size(); ++j) {
      terms[j] = log_weights[j] == kNegInf ? kNegInf : log_weights[j] + log_kernel(j, m);
    }
    out[m] = log_sum_exp(terms);
  }
  return out;
}

Target::Target(LogDensityFn log_density, std::optional<double> normalisation_hint)
    : log_density_(std::move(log_density)), normalisation_hint_(normalisation_hint) {
  if (!log_density_) throw std::invalid_argument("target needs a log density");
  if (normalisation_hint_ && !(*normalisation_hint_ > 0.0)) {
    throw std::invalid_argument("normalisation hint must be positive");
  }
}

Target Target::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("target scale must be positive");
  const double log_c = std::log(c);
  std::optional<double> hint;
  if (normalisation_hint_) hint = c * *normalisation_hint_;
  return Target([inner = log_density_, log_c](const Point& y) { return log_c + inner(y); }, hint);
}

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<Point> means, Eigen::VectorXd weights,
                                             double scale)
    : means_(std::move(means)), weights_(std::move(weights)), scale_(scale) {
  if (means_.empty()) throw std::invalid_argument("target mixture needs at least one mean");
  if (static_cast<std::size_t>(weights_.size()) != means_.size()) {
    throw std::invalid_argument("target mixture: one weight per mean required");
  }
  for (const Point& m : means_) {
    if (m.size() != means_.front().size() || m.size() == 0 || !m.allFinite()) {
      throw std::invalid_argument("target means must be finite and share one positive dimension");
    }
  }
  // Validates the simplex constraint.
  SimplexWeights{weights_};
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw std::invalid_argument("target scale c must be positive and finite");
  }
  log_weights_ = weights_.array().log().matrix();
  log_scale_ = std::log(scale_);
}

GaussianMixtureTarget GaussianMixtureTarget::bimodal(std::size_t dimension, double separation,
                                                     double scale) {
  const auto d = static_cast<Eigen::Index>(dimension);
  std::vector<Point> means{Point::Constant(d, -separation), Point::Constant(d, separation)};
  return GaussianMixtureTarget(std::move(means), Eigen::Vector2d(0.5, 0.5), scale);
}

double GaussianMixtureTarget::log_density(const Point& y) const {
  Eigen::VectorXd terms(static_cast<Eigen::Index>(means_.size()));
  for (std::size_t i = 0; i < means_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    terms[k] = log_weights_[k] + gaussian_kernel_logpdf(means_[i], y, 1.0);
  }
  return log_scale_ + log_sum_exp(terms);
}

Target GaussianMixtureTarget::as_target() const {
  return Target([self = *this](const Point& y) { return self.log_density(y); }, scale_);
}

}  // namespace alpha_descent
