#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "alpha_descent/errors.hpp"
#include "alpha_descent/finite_support.hpp"
#include "alpha_descent/fixtures.hpp"
#include "alpha_descent/model.hpp"
#include "oracles.hpp"

namespace ad = alpha_descent;

namespace {

ad::Point point(std::initializer_list<double> values) {
  ad::Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) p[i++] = v;
  return p;
}

ad::Point random_point(std::size_t d, ad::Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.5);
  ad::Point p(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = normal(rng);
  return p;
}

}  // namespace

TEST(GaussianKernelLogpdf, ZeroDistanceIsTheLogNormaliser) {
  EXPECT_NEAR(ad::gaussian_kernel_logpdf(point({0}), point({0}), 1.0), -0.5 * std::log(2 * std::numbers::pi),
              1e-15);
  EXPECT_NEAR(ad::gaussian_kernel_logpdf(point({0}), point({0}), 1.0), -0.9189385332, 1e-9);
}

TEST(GaussianKernelLogpdf, DistanceTwoInOneDimension) {
  EXPECT_NEAR(ad::gaussian_kernel_logpdf(point({0}), point({2}), 1.0), -2.0 - 0.5 * std::log(2 * std::numbers::pi),
              1e-15);
}

TEST(GaussianKernelLogpdf, SymmetricInItsArguments) {
  ad::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const ad::Point a = random_point(3, rng);
    const ad::Point b = random_point(3, rng);
    EXPECT_EQ(ad::gaussian_kernel_logpdf(a, b, 0.7), ad::gaussian_kernel_logpdf(b, a, 0.7));
  }
}

TEST(GaussianKernelLogpdf, MatchesDirectDensity) {
  ad::Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const ad::Point a = random_point(4, rng);
    const ad::Point b = random_point(4, rng);
    EXPECT_NEAR(std::exp(ad::gaussian_kernel_logpdf(a, b, 1.3)), oracle::gaussian_pdf(a, b, 1.3),
                1e-13 * oracle::gaussian_pdf(a, b, 1.3));
  }
}

TEST(GaussianKernelLogpdf, RejectsBadInput) {
  EXPECT_THROW(ad::gaussian_kernel_logpdf(point({0, 0}), point({0}), 1.0), std::invalid_argument);
  EXPECT_THROW(ad::gaussian_kernel_logpdf(point({0}), point({0}), 0.0), std::invalid_argument);
  EXPECT_THROW(ad::gaussian_kernel_logpdf(point({0}), point({0}), -1.0), std::invalid_argument);
}

TEST(GaussianKernel, IntegratesToOneInOneDimension) {
  const ad::GaussianKernel kernel(0.4, 1);
  const double step = 1e-3;
  double total = 0.0;
  for (double y = -6.0; y <= 8.0; y += step) {
    total += std::exp(kernel.log_density(point({1.0}), point({y}))) * step;
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(GaussianKernel, SamplesHaveTheKernelMeanAndSpread) {
  const ad::GaussianKernel kernel(0.5, 2);
  ad::Rng rng(3);
  const ad::Point theta = point({1.0, -2.0});
  const int count = 100000;
  ad::Point sum = ad::Point::Zero(2);
  double squares = 0.0;
  for (int i = 0; i < count; ++i) {
    const ad::Point y = kernel.sample(theta, rng);
    sum += y;
    squares += (y - theta).squaredNorm();
  }
  const double se = 0.5 / std::sqrt(count);
  EXPECT_LT((sum / count - theta).cwiseAbs().maxCoeff(), 4 * se);
  EXPECT_NEAR(squares / count / 2.0, 0.25, 0.01);
}

TEST(BandwidthRule, SingleComponentGivesTheConstant) {
  for (std::size_t d : {1u, 4u, 16u}) EXPECT_DOUBLE_EQ(ad::bandwidth_rule(1, d), 1.0);
}

TEST(BandwidthRule, HundredComponentsInDimensionSixteen) {
  EXPECT_NEAR(ad::bandwidth_rule(100, 16), std::pow(100.0, -1.0 / 20.0), 1e-15);
  EXPECT_NEAR(ad::bandwidth_rule(100, 16), 0.7943, 1e-4);
}

TEST(BandwidthRule, ProportionalToTheConstant) {
  EXPECT_DOUBLE_EQ(ad::bandwidth_rule(37, 5, 2.0), 2.0 * ad::bandwidth_rule(37, 5, 1.0));
}

TEST(BandwidthRule, RejectsInvalidArguments) {
  EXPECT_THROW(ad::bandwidth_rule(0, 3), std::invalid_argument);
  EXPECT_THROW(ad::bandwidth_rule(3, 0), std::invalid_argument);
  EXPECT_THROW(ad::bandwidth_rule(3, 3, 0.0), std::invalid_argument);
}

TEST(MixtureLogpdf, SingleComponentIsTheKernel) {
  const ad::GaussianKernel kernel(0.8, 2);
  const ad::ParticleSet particles({point({0.5, 1.0})});
  const ad::Point y = point({0.1, -0.3});
  EXPECT_NEAR(ad::mixture_logpdf(ad::SimplexWeights::uniform(1), particles, kernel, y),
              kernel.log_density(particles[0], y), 1e-15);
}

TEST(MixtureLogpdf, CoincidentComponentsCollapse) {
  const ad::GaussianKernel kernel(1.0, 1);
  const ad::ParticleSet particles({point({0.3}), point({0.3})});
  const ad::Point y = point({1.1});
  EXPECT_NEAR(ad::mixture_logpdf(ad::SimplexWeights::uniform(2), particles, kernel, y),
              kernel.log_density(particles[0], y), 1e-15);
}

TEST(MixtureLogpdf, TwoComponentHandSum) {
  const ad::GaussianKernel kernel(1.0, 1);
  const ad::ParticleSet particles({point({0}), point({2})});
  const ad::SimplexWeights w(Eigen::Vector2d(0.3, 0.7));
  const double expected = std::log(0.3 * oracle::gaussian_pdf(point({0}), point({0}), 1.0) +
                                   0.7 * oracle::gaussian_pdf(point({2}), point({0}), 1.0));
  EXPECT_NEAR(ad::mixture_logpdf(w, particles, kernel, point({0})), expected, 1e-15);
}

TEST(MixtureLogpdf, MatchesDirectSumOnRandomInputs) {
  ad::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t j = 1 + trial % 6;
    std::vector<ad::Point> thetas;
    for (std::size_t i = 0; i < j; ++i) thetas.push_back(random_point(3, rng));
    const ad::ParticleSet particles(thetas);
    const ad::SimplexWeights w = ad::random_weights(j, rng, true);
    const ad::GaussianKernel kernel(0.9, 3);
    const ad::Point y = random_point(3, rng);
    double direct = 0.0;
    for (std::size_t i = 0; i < j; ++i) direct += w[i] * oracle::gaussian_pdf(thetas[i], y, 0.9);
    EXPECT_NEAR(std::exp(ad::mixture_logpdf(w, particles, kernel, y)), direct, 1e-12 * direct);
  }
}

TEST(MixtureLogpdf, ZeroWeightComponentsAreIgnored) {
  const ad::GaussianKernel kernel(1.0, 1);
  const ad::ParticleSet particles({point({0}), point({50})});
  const ad::SimplexWeights w(Eigen::Vector2d(1.0, 0.0));
  EXPECT_EQ(ad::mixture_logpdf(w, particles, kernel, point({0.2})),
            kernel.log_density(particles[0], point({0.2})));
}

TEST(MixtureLogpdf, StableWhereLinearDensitiesUnderflow) {
  const ad::GaussianKernel kernel(0.1, 16);
  const ad::ParticleSet particles({ad::Point::Zero(16), ad::Point::Constant(16, 1.0)});
  const ad::Point y = ad::Point::Constant(16, 8.0);
  const double value = ad::mixture_logpdf(ad::SimplexWeights::uniform(2), particles, kernel, y);
  EXPECT_TRUE(std::isfinite(value));
  EXPECT_NEAR(value, std::log(0.5) + kernel.log_density(particles[1], y), 1e-9);
}

TEST(SimplexWeights, RejectsPointsOffTheSimplex) {
  EXPECT_THROW(ad::SimplexWeights(Eigen::Vector2d(0.5, 0.6)), std::invalid_argument);
  EXPECT_THROW(ad::SimplexWeights(Eigen::Vector2d(1.5, -0.5)), std::invalid_argument);
  EXPECT_THROW(ad::SimplexWeights(Eigen::VectorXd()), std::invalid_argument);
  EXPECT_THROW(ad::SimplexWeights(Eigen::Vector2d(0.0, 0.0)), std::invalid_argument);
  EXPECT_NO_THROW(ad::SimplexWeights(Eigen::Vector2d(1.0, 0.0)));
}

TEST(SimplexWeights, UniformAndNormalised) {
  const auto u = ad::SimplexWeights::uniform(4);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(u[j], 0.25);
  const auto n = ad::SimplexWeights::normalised(Eigen::Vector3d(1.0, 2.0, 1.0));
  EXPECT_DOUBLE_EQ(n[1], 0.5);
  EXPECT_THROW(ad::SimplexWeights::normalised(Eigen::Vector2d(1.0, -1.0)), std::invalid_argument);
}

TEST(SimplexWeights, FromLogWeightsKeepsExactZeros) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto w = ad::SimplexWeights::from_log_weights(Eigen::Vector3d(-inf, 0.0, std::log(3.0)));
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
  EXPECT_NEAR(w[2], 0.75, 1e-15);
}

TEST(SimplexWeights, FromLogWeightsSurvivesHugeOffsets) {
  const auto w = ad::SimplexWeights::from_log_weights(Eigen::Vector2d(-1e6, -1e6 + std::log(3.0)));
  EXPECT_NEAR(w[0], 0.25, 1e-9);  // log 3 is rounded at magnitude 1e6
}

TEST(SimplexWeights, FromLogWeightsRejectsDegenerateInput) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ad::SimplexWeights::from_log_weights(Eigen::Vector2d(-inf, -inf)), ad::NormaliserUnderflow);
  EXPECT_THROW(ad::SimplexWeights::from_log_weights(Eigen::Vector2d(nan, 0.0)), ad::NormaliserUnderflow);
  EXPECT_THROW(ad::SimplexWeights::from_log_weights(Eigen::Vector2d(inf, 0.0)), ad::NormaliserUnderflow);
}

TEST(ParticleSet, Validation) {
  EXPECT_THROW(ad::ParticleSet({}), std::invalid_argument);
  EXPECT_THROW(ad::ParticleSet({point({0}), point({0, 1})}), std::invalid_argument);
  EXPECT_THROW(ad::ParticleSet({point({std::numeric_limits<double>::quiet_NaN()})}),
               std::invalid_argument);
  const ad::ParticleSet ok({point({0, 1}), point({2, 3})}, 4);
  EXPECT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok.dimension(), 2u);
  EXPECT_EQ(ok.generation(), 4u);
}

TEST(MixtureState, RejectsMismatchedParts) {
  auto kernel = std::make_shared<const ad::GaussianKernel>(1.0, 1);
  const ad::ParticleSet particles({point({0}), point({1})});
  EXPECT_THROW(ad::MixtureState(ad::SimplexWeights::uniform(3), particles, kernel), std::invalid_argument);
  EXPECT_THROW(ad::MixtureState(ad::SimplexWeights::uniform(2), particles, nullptr), std::invalid_argument);
  auto wrong_dim = std::make_shared<const ad::GaussianKernel>(1.0, 2);
  EXPECT_THROW(ad::MixtureState(ad::SimplexWeights::uniform(2), particles, wrong_dim), std::invalid_argument);
}

TEST(LogKernelMatrix, MatchesPointwiseEvaluation) {
  ad::Rng rng(8);
  auto kernel = std::make_shared<const ad::GaussianKernel>(0.7, 2);
  const ad::ParticleSet particles({random_point(2, rng), random_point(2, rng), random_point(2, rng)});
  const ad::MixtureState state(ad::random_weights(3, rng), particles, kernel);
  std::vector<ad::Point> samples{random_point(2, rng), random_point(2, rng)};
  const Eigen::MatrixXd logk = ad::log_kernel_matrix(state, samples);
  ASSERT_EQ(logk.rows(), 3);
  ASSERT_EQ(logk.cols(), 2);
  const Eigen::VectorXd logmix = ad::log_mixture_values(state.weights, logk);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(logk(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)),
                kernel->log_density(particles[j], samples[m]));
    }
    EXPECT_NEAR(logmix[static_cast<Eigen::Index>(m)], ad::mixture_logpdf(state, samples[m]), 1e-14);
  }
}

TEST(GaussianMixtureTarget, ScaleAddsItsLogarithm) {
  ad::Rng rng(9);
  const auto p1 = ad::GaussianMixtureTarget::bimodal(5, 2.0, 1.0);
  const auto p2 = ad::GaussianMixtureTarget::bimodal(5, 2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const ad::Point y = random_point(5, rng);
    EXPECT_NEAR(p2.log_density(y), std::log(2.0) + p1.log_density(y), 1e-14);
  }
}

TEST(GaussianMixtureTarget, BimodalMatchesDirectDensity) {
  ad::Rng rng(10);
  const auto p = ad::GaussianMixtureTarget::bimodal(3, 2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const ad::Point y = random_point(3, rng);
    const double direct = 2.0 * (0.5 * oracle::gaussian_pdf(ad::Point::Constant(3, -2.0), y, 1.0) +
                                 0.5 * oracle::gaussian_pdf(ad::Point::Constant(3, 2.0), y, 1.0));
    EXPECT_NEAR(std::exp(p.log_density(y)), direct, 1e-13 * direct);
  }
}

TEST(GaussianMixtureTarget, PositiveFarFromTheModes) {
  const auto p = ad::GaussianMixtureTarget::bimodal(16, 2.0, 2.0);
  EXPECT_TRUE(std::isfinite(p.log_density(ad::Point::Constant(16, 40.0))));
  const ad::Target t = p.as_target();
  EXPECT_EQ(t.log_density(ad::Point::Zero(16)), p.log_density(ad::Point::Zero(16)));
}

TEST(GaussianMixtureTarget, RejectsInvalidDefinitions) {
  EXPECT_THROW(ad::GaussianMixtureTarget({point({0})}, Eigen::VectorXd::Ones(1), 0.0), std::invalid_argument);
  EXPECT_THROW(ad::GaussianMixtureTarget({point({0}), point({1})}, Eigen::VectorXd::Ones(1), 1.0),
               std::invalid_argument);
  EXPECT_THROW(ad::GaussianMixtureTarget({}, Eigen::VectorXd(), 1.0), std::invalid_argument);
}

TEST(Target, ScaledAddsItsLogarithm) {
  const ad::Target t([](const ad::Point& y) { return -y.squaredNorm(); });
  const ad::Target t3 = t.scaled(3.0);
  EXPECT_NEAR(t3.log_density(point({1.0})), std::log(3.0) - 1.0, 1e-15);
}

TEST(FiniteSupportProblem, RejectsUnnormalisedRows) {
  const Eigen::Vector2d nu(0.5, 0.5);
  const Eigen::Vector2d p(1.0, 1.0);
  Eigen::MatrixXd k(1, 2);
  k << 1.0, 1.1;
  EXPECT_THROW(ad::FiniteSupportProblem(nu, p, k), std::invalid_argument);
  k << 1.0, 1.0;
  EXPECT_NO_THROW(ad::FiniteSupportProblem(nu, p, k));
}

TEST(FiniteSupportProblem, RejectsNonPositiveEntries) {
  Eigen::MatrixXd k(1, 2);
  k << 2.0, 0.0;
  EXPECT_THROW(ad::FiniteSupportProblem(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1, 1), k),
               std::invalid_argument);
  k << 1.0, 1.0;
  EXPECT_THROW(ad::FiniteSupportProblem(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1, -1), k),
               std::invalid_argument);
  EXPECT_THROW(ad::FiniteSupportProblem(Eigen::Vector2d(1.5, -0.5), Eigen::Vector2d(1, 1), k),
               std::invalid_argument);
  EXPECT_THROW(ad::FiniteSupportProblem(Eigen::Vector3d(0.5, 0.25, 0.25), Eigen::Vector2d(1, 1), k),
               std::invalid_argument);
}

TEST(FiniteSupportProblem, NormalisedKernelRowsIntegrateToOne) {
  ad::Rng rng(14);
  for (int i = 0; i < 20; ++i) {
    const auto problem = ad::random_problem(rng);
    const Eigen::VectorXd mass = problem.kernel_matrix() * problem.nu_weights();
    for (Eigen::Index j = 0; j < mass.size(); ++j) EXPECT_NEAR(mass[j], 1.0, 1e-12);
  }
}

TEST(FiniteSupportProblem, MixtureValuesAndScaling) {
  ad::Rng rng(15);
  const auto problem = ad::random_problem(rng);
  const auto w = ad::random_weights(problem.num_components(), rng);
  const auto direct = oracle::mixture(problem, w.values());
  const Eigen::VectorXd values = problem.mixture_values(w);
  for (std::size_t s = 0; s < direct.size(); ++s) {
    EXPECT_NEAR(values[static_cast<Eigen::Index>(s)], direct[s], 1e-14 * direct[s]);
  }
  const auto scaled = problem.with_scaled_target(3.0);
  EXPECT_NEAR(scaled.target_mass(), 3.0 * problem.target_mass(), 1e-12);
  EXPECT_THROW(problem.with_scaled_target(0.0), std::invalid_argument);
}

TEST(FiniteSupportProblem, AtomAnalogueReproducesTheProblem) {
  ad::Rng rng(16);
  const auto problem = ad::random_problem(rng);
  const auto kernel = problem.atom_kernel();
  const auto particles = problem.atom_particles();
  const auto target = problem.atom_target();
  for (std::size_t j = 0; j < problem.num_components(); ++j) {
    for (std::size_t s = 0; s < problem.num_atoms(); ++s) {
      const auto jj = static_cast<Eigen::Index>(j);
      const auto ss = static_cast<Eigen::Index>(s);
      EXPECT_NEAR(std::exp(kernel->log_density(particles[j], ad::FiniteSupportProblem::atom_point(s))),
                  problem.kernel_matrix()(jj, ss), 1e-13 * problem.kernel_matrix()(jj, ss));
    }
  }
  for (std::size_t s = 0; s < problem.num_atoms(); ++s) {
    EXPECT_NEAR(target.log_density(ad::FiniteSupportProblem::atom_point(s)),
                std::log(problem.p_values()[static_cast<Eigen::Index>(s)]), 1e-15);
  }
  // Atom frequencies under component 0 follow nu_s K(0, s).
  const int count = 100000;
  std::vector<int> hits(problem.num_atoms(), 0);
  for (int i = 0; i < count; ++i) {
    const auto y = kernel->sample(particles[0], rng);
    ++hits[static_cast<std::size_t>(y[0])];
  }
  for (std::size_t s = 0; s < problem.num_atoms(); ++s) {
    const auto ss = static_cast<Eigen::Index>(s);
    const double prob = problem.nu_weights()[ss] * problem.kernel_matrix()(0, ss);
    const double se = std::sqrt(prob * (1 - prob) / count);
    EXPECT_NEAR(hits[s] / static_cast<double>(count), prob, 4 * se + 1e-12);
  }
}

TEST(FiniteSupportProblem, AtomKernelRejectsForeignPoints) {
  ad::Rng rng(17);
  const auto problem = ad::random_problem(rng);
  const auto kernel = problem.atom_kernel();
  EXPECT_THROW(kernel->log_density(point({0.5}), point({0})), std::invalid_argument);
  EXPECT_THROW(kernel->log_density(point({0}), point({1000})), std::invalid_argument);
}

TEST(IndependentProblem, KernelRowsHaveFullRank) {
  ad::Rng rng(18);
  for (int i = 0; i < 10; ++i) {
    const auto problem = ad::independent_problem(3, 6, rng);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(problem.kernel_matrix());
    EXPECT_EQ(lu.rank(), 3);
  }
}
