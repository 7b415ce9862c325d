#include "alpha_descent/finite_support.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace alpha_descent {
namespace {

std::vector<Point> index_support(Eigen::Index count) {
  std::vector<Point> support;
  support.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index s = 0; s < count; ++s) {
    support.push_back(FiniteSupportProblem::atom_point(static_cast<std::size_t>(s)));
  }
  return support;
}

std::size_t decode_index(const Point& point, std::size_t limit, const char* what) {
  if (point.size() != 1) throw std::invalid_argument(fmt::format("{} point must be 1-d", what));
  const double v = point[0];
  const double rounded = std::round(v);
  if (!(rounded >= 0.0) || rounded != v || rounded >= static_cast<double>(limit)) {
    throw std::invalid_argument(fmt::format("{} point ({}) is not a valid index below {}", what, v,
                                            limit));
  }
  return static_cast<std::size_t>(rounded);
}

class AtomKernel final : public KernelDensity {
 public:
  AtomKernel(Eigen::MatrixXd log_kernel, Eigen::VectorXd nu)
      : log_kernel_(std::move(log_kernel)), rows_(static_cast<std::size_t>(log_kernel_.rows())) {
    const auto atoms = static_cast<std::size_t>(log_kernel_.cols());
    for (std::size_t j = 0; j < rows_; ++j) {
      std::vector<double> mass(atoms);
      for (std::size_t s = 0; s < atoms; ++s) {
        const auto jj = static_cast<Eigen::Index>(j);
        const auto ss = static_cast<Eigen::Index>(s);
        mass[s] = nu[ss] * std::exp(log_kernel_(jj, ss));
      }
      samplers_.emplace_back(mass.begin(), mass.end());
    }
  }

  double log_density(const Point& theta, const Point& y) const override {
    const std::size_t j = decode_index(theta, rows_, "component");
    const std::size_t s = decode_index(y, static_cast<std::size_t>(log_kernel_.cols()), "atom");
    return log_kernel_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s));
  }

  Point sample(const Point& theta, Rng& rng) const override {
    const std::size_t j = decode_index(theta, rows_, "component");
    // discrete_distribution::operator() is non-const; copy keeps this thread-safe.
    auto sampler = samplers_[j];
    return FiniteSupportProblem::atom_point(static_cast<std::size_t>(sampler(rng)));
  }

  std::size_t dimension() const override { return 1; }

 private:
  Eigen::MatrixXd log_kernel_;
  std::size_t rows_;
  std::vector<std::discrete_distribution<int>> samplers_;
};

}  // namespace

FiniteSupportProblem::FiniteSupportProblem(Eigen::VectorXd nu_weights, Eigen::VectorXd p_values,
                                           Eigen::MatrixXd kernel_matrix)
    : FiniteSupportProblem(index_support(nu_weights.size()), nu_weights, std::move(p_values),
                           std::move(kernel_matrix)) {}

FiniteSupportProblem::FiniteSupportProblem(std::vector<Point> support, Eigen::VectorXd nu_weights,
                                           Eigen::VectorXd p_values, Eigen::MatrixXd kernel_matrix)
    : support_(std::move(support)),
      nu_(std::move(nu_weights)),
      p_(std::move(p_values)),
      kernel_(std::move(kernel_matrix)) {
  const Eigen::Index atoms = nu_.size();
  if (atoms == 0 || kernel_.rows() == 0) {
    throw std::invalid_argument("finite support problem needs at least one atom and component");
  }
  if (p_.size() != atoms || kernel_.cols() != atoms ||
      static_cast<Eigen::Index>(support_.size()) != atoms) {
    throw std::invalid_argument(fmt::format(
        "finite support sizes disagree: {} support points, {} nu weights, {} p values, {} kernel "
        "columns",
        support_.size(), atoms, p_.size(), kernel_.cols()));
  }
  const auto check_positive = [](const auto& values, const char* name) {
    if (!values.allFinite() || (values.array() <= 0.0).any()) {
      throw std::invalid_argument(fmt::format("{} must be finite and strictly positive", name));
    }
  };
  check_positive(nu_, "nu weights");
  check_positive(p_, "p values");
  check_positive(kernel_, "kernel matrix entries");
  const Eigen::VectorXd row_mass = kernel_ * nu_;
  for (Eigen::Index j = 0; j < row_mass.size(); ++j) {
    if (std::abs(row_mass[j] - 1.0) > kRowTolerance) {
      throw std::invalid_argument(fmt::format(
          "kernel row {} integrates to {:.17g} against nu, expected 1", j, row_mass[j]));
    }
  }
}

FiniteSupportProblem FiniteSupportProblem::with_normalised_kernel(Eigen::VectorXd nu_weights,
                                                                  Eigen::VectorXd p_values,
                                                                  const Eigen::MatrixXd& raw_kernel) {
  if (raw_kernel.cols() != nu_weights.size()) {
    throw std::invalid_argument("kernel columns must match the number of atoms");
  }
  Eigen::MatrixXd kernel = raw_kernel;
  const Eigen::VectorXd row_mass = raw_kernel * nu_weights;
  for (Eigen::Index j = 0; j < kernel.rows(); ++j) kernel.row(j) /= row_mass[j];
  return FiniteSupportProblem(std::move(nu_weights), std::move(p_values), std::move(kernel));
}

Eigen::VectorXd FiniteSupportProblem::mixture_values(const SimplexWeights& weights) const {
  if (weights.size() != num_components()) {
    throw std::invalid_argument(fmt::format("{} weights for {} components", weights.size(),
                                            num_components()));
  }
  return kernel_.transpose() * weights.values();
}

FiniteSupportProblem FiniteSupportProblem::with_scaled_target(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("target scale must be positive");
  return with_target(c * p_);
}

FiniteSupportProblem FiniteSupportProblem::with_target(Eigen::VectorXd p_values) const {
  return FiniteSupportProblem(support_, nu_, std::move(p_values), kernel_);
}

std::shared_ptr<const KernelDensity> FiniteSupportProblem::atom_kernel() const {
  return std::make_shared<AtomKernel>(kernel_.array().log().matrix(), nu_);
}

ParticleSet FiniteSupportProblem::atom_particles() const {
  std::vector<Point> particles;
  for (std::size_t j = 0; j < num_components(); ++j) particles.push_back(atom_point(j));
  return ParticleSet(std::move(particles));
}

Target FiniteSupportProblem::atom_target() const {
  const Eigen::VectorXd log_p = p_.array().log().matrix();
  return Target(
      [log_p](const Point& y) {
        return log_p[static_cast<Eigen::Index>(
            decode_index(y, static_cast<std::size_t>(log_p.size()), "atom"))];
      },
      target_mass());
}

Point FiniteSupportProblem::atom_point(std::size_t index) {
  Point p(1);
  p[0] = static_cast<double>(index);
  return p;
}

}  // namespace alpha_descent
