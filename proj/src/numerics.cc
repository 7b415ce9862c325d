#include "alpha_descent/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace alpha_descent {

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return Rng(seq);
}

double log_sum_exp(std::span<const double> values) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double max_value = kNegInf;
  for (const double v : values) {
    if (std::isnan(v)) return v;
    max_value = std::max(max_value, v);
  }
  if (max_value == kNegInf) return kNegInf;
  if (std::isinf(max_value)) return max_value;
  double sum = 0.0;
  for (const double v : values) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& values) {
  return log_sum_exp(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

}  // namespace alpha_descent
