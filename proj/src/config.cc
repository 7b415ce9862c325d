#include "alpha_descent/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace alpha_descent {
namespace {

using nlohmann::json;

const json* find(const json& object, const std::string& key) {
  const auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& prefix) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

double read_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::uint64_t read_unsigned(const json& value, const std::string& field) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    // Signed storage only means the value was not parsed from text.
    const auto v = value.get<std::int64_t>();
    if (v >= 0) return static_cast<std::uint64_t>(v);
    throw ConfigError(field, fmt::format("must be nonnegative, got {}", v));
  }
  throw ConfigError(field, "expected an integer");
}

std::size_t read_count(const json& value, const std::string& field, bool allow_zero) {
  const std::uint64_t v = read_unsigned(value, field);
  if (v == 0 && !allow_zero) throw ConfigError(field, "must be positive");
  return static_cast<std::size_t>(v);
}

bool read_bool(const json& value, const std::string& field) {
  if (!value.is_boolean()) throw ConfigError(field, "expected true or false");
  return value.get<bool>();
}

std::string read_string(const json& value, const std::string& field) {
  if (!value.is_string()) throw ConfigError(field, "expected a string");
  return value.get<std::string>();
}

const json& required(const json& object, const std::string& key) {
  const json* value = find(object, key);
  if (value == nullptr) throw ConfigError(key, "missing required field");
  return *value;
}

}  // namespace

std::string_view to_string(Exploration exploration) {
  return exploration == Exploration::kResample ? "resample" : "mean_update";
}

Exploration parse_exploration(std::string_view name) {
  if (name == "resample") return Exploration::kResample;
  if (name == "mean_update") return Exploration::kMeanUpdate;
  throw std::invalid_argument(
      fmt::format("unknown exploration '{}' (expected resample or mean_update)", name));
}

GaussianMixtureTarget TargetSpec::build(std::size_t dimension) const {
  if (means.empty()) return GaussianMixtureTarget::bimodal(dimension, separation, scale);
  std::vector<Point> points;
  for (const auto& m : means) points.push_back(Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size())));
  Eigen::VectorXd w;
  if (weights.empty()) {
    w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(means.size()),
                                  1.0 / static_cast<double>(means.size()));
  } else {
    w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  }
  return GaussianMixtureTarget(std::move(points), std::move(w), scale);
}

double ExperimentConfig::eta() const {
  return num_steps == 0 ? eta0 : eta0 / std::sqrt(static_cast<double>(num_steps));
}

AlphaParams ExperimentConfig::params() const { return AlphaParams{alpha, eta(), kappa, kappa_prime}; }

void ExperimentConfig::validate() const {
  if (!(eta0 > 0.0)) throw ConfigError("eta0", "must be positive");
  if (alpha == 1.0 && (algorithm == Algorithm::kPower || algorithm == Algorithm::kRenyi)) {
    throw ConfigError("alpha", fmt::format("alpha = 1 is not allowed with algorithm {}",
                                           to_string(algorithm)));
  }
  if (num_components == 0) throw ConfigError("j", "must be positive");
  if (sample_sizes.empty()) throw ConfigError("m", "needs at least one sample size");
  for (const std::size_t m : sample_sizes) {
    if (m == 0) throw ConfigError("m", "sample sizes must be positive");
  }
  if (num_phases == 0) throw ConfigError("t", "must be positive");
  if (dimension == 0) throw ConfigError("d", "must be positive");
  if (replicates == 0) throw ConfigError("replicates", "must be positive");
  if (!(q0_scale > 0.0)) throw ConfigError("q0.scale", "must be positive");
  if (!(c_h > 0.0)) throw ConfigError("c_h", "must be positive");
  if (!(target.scale > 0.0)) throw ConfigError("target.c", "must be positive");
  for (const auto& m : target.means) {
    if (m.size() != dimension) {
      throw ConfigError("target.means",
                        fmt::format("mean of dimension {} but d = {}", m.size(), dimension));
    }
  }
  if (!target.weights.empty() && target.weights.size() != target.means.size()) {
    throw ConfigError("target.weights", "needs one weight per mean");
  }
  try {
    target.build(dimension);
  } catch (const std::invalid_argument& error) {
    throw ConfigError("target", error.what());
  }
  const AlphaParams p = params();
  if (algorithm == Algorithm::kPower && !p.power_valid()) {
    throw ConfigError("kappa", fmt::format("power descent needs (alpha-1) kappa >= 0 and "
                                           "eta = eta0/sqrt(n) <= 1 (eta = {})",
                                           p.eta));
  }
  if (algorithm == Algorithm::kRenyi && (alpha - 1.0) * kappa < 0.0) {
    throw ConfigError("kappa", "renyi descent needs (alpha-1) kappa >= 0");
  }
  if (exploration == Exploration::kMeanUpdate && !(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("exploration", "mean_update needs alpha in [0, 1)");
  }
}

std::vector<ExperimentConfig> ExperimentConfig::expand_sample_sizes() const {
  std::vector<ExperimentConfig> out;
  for (const std::size_t m : sample_sizes) {
    ExperimentConfig single = *this;
    single.sample_sizes = {m};
    out.push_back(std::move(single));
  }
  return out;
}

ExperimentConfig config_from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(root,
                 {"algorithm", "alpha", "eta0", "kappa", "kappa_prime", "j", "m", "n", "t", "d",
                  "replicates", "target", "q0", "c_h", "seed", "exploration",
                  "renyi_unweighted_mu_b", "reuse_monitor_samples", "gradient_estimator"},
                 "");
  ExperimentConfig c;
  try {
    c.algorithm = parse_algorithm(read_string(required(root, "algorithm"), "algorithm"));
  } catch (const std::invalid_argument& error) {
    throw ConfigError("algorithm", error.what());
  }
  c.alpha = read_number(required(root, "alpha"), "alpha");
  c.eta0 = read_number(required(root, "eta0"), "eta0");
  if (const json* v = find(root, "kappa")) c.kappa = read_number(*v, "kappa");
  if (const json* v = find(root, "kappa_prime")) c.kappa_prime = read_number(*v, "kappa_prime");
  c.num_components = read_count(required(root, "j"), "j", false);

  const json& m = required(root, "m");
  if (m.is_array()) {
    if (m.empty()) throw ConfigError("m", "needs at least one sample size");
    for (const json& entry : m) c.sample_sizes.push_back(read_count(entry, "m", false));
  } else {
    c.sample_sizes = {read_count(m, "m", false)};
  }
  c.num_steps = read_count(required(root, "n"), "n", true);
  c.num_phases = read_count(required(root, "t"), "t", false);
  c.dimension = read_count(required(root, "d"), "d", false);
  c.replicates = read_count(required(root, "replicates"), "replicates", false);
  c.seed = read_unsigned(required(root, "seed"), "seed");

  if (const json* target = find(root, "target")) {
    if (!target->is_object()) throw ConfigError("target", "expected an object");
    reject_unknown(*target, {"s", "c", "means", "weights"}, "target.");
    if (const json* v = find(*target, "s")) c.target.separation = read_number(*v, "target.s");
    if (const json* v = find(*target, "c")) c.target.scale = read_number(*v, "target.c");
    if (const json* v = find(*target, "means")) {
      if (!v->is_array()) throw ConfigError("target.means", "expected a list of points");
      for (const json& mean : *v) {
        if (!mean.is_array()) throw ConfigError("target.means", "expected a list of points");
        std::vector<double> point;
        for (const json& x : mean) point.push_back(read_number(x, "target.means"));
        c.target.means.push_back(std::move(point));
      }
    }
    if (const json* v = find(*target, "weights")) {
      if (!v->is_array()) throw ConfigError("target.weights", "expected a list of numbers");
      for (const json& x : *v) c.target.weights.push_back(read_number(x, "target.weights"));
    }
  }
  if (const json* q0 = find(root, "q0")) {
    if (!q0->is_object()) throw ConfigError("q0", "expected an object");
    reject_unknown(*q0, {"scale"}, "q0.");
    if (const json* v = find(*q0, "scale")) c.q0_scale = read_number(*v, "q0.scale");
  }
  if (const json* v = find(root, "c_h")) c.c_h = read_number(*v, "c_h");
  if (const json* v = find(root, "exploration")) {
    try {
      c.exploration = parse_exploration(read_string(*v, "exploration"));
    } catch (const std::invalid_argument& error) {
      throw ConfigError("exploration", error.what());
    }
  }
  if (const json* v = find(root, "renyi_unweighted_mu_b")) {
    c.renyi_unweighted_mu_b = read_bool(*v, "renyi_unweighted_mu_b");
  }
  if (const json* v = find(root, "reuse_monitor_samples")) {
    c.reuse_monitor_samples = read_bool(*v, "reuse_monitor_samples");
  }
  if (const json* v = find(root, "gradient_estimator")) {
    try {
      c.gradient_estimator = parse_estimator_form(read_string(*v, "gradient_estimator"));
    } catch (const std::invalid_argument& error) {
      throw ConfigError("gradient_estimator", error.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  json root;
  try {
    root = json::parse(buffer.str());
  } catch (const json::parse_error& error) {
    throw ConfigError("<file>", fmt::format("{} is not valid JSON: {}", path.string(), error.what()));
  }
  return config_from_json(root);
}

json to_json(const ExperimentConfig& c) {
  json target = {{"s", c.target.separation}, {"c", c.target.scale}};
  if (!c.target.means.empty()) target["means"] = c.target.means;
  if (!c.target.weights.empty()) target["weights"] = c.target.weights;
  json m = c.sample_sizes.size() == 1 ? json(c.sample_sizes.front()) : json(c.sample_sizes);
  return json{{"algorithm", std::string(to_string(c.algorithm))},
              {"alpha", c.alpha},
              {"eta0", c.eta0},
              {"kappa", c.kappa},
              {"kappa_prime", c.kappa_prime},
              {"j", c.num_components},
              {"m", m},
              {"n", c.num_steps},
              {"t", c.num_phases},
              {"d", c.dimension},
              {"replicates", c.replicates},
              {"target", target},
              {"q0", {{"scale", c.q0_scale}}},
              {"c_h", c.c_h},
              {"seed", c.seed},
              {"exploration", std::string(to_string(c.exploration))},
              {"renyi_unweighted_mu_b", c.renyi_unweighted_mu_b},
              {"reuse_monitor_samples", c.reuse_monitor_samples},
              {"gradient_estimator", std::string(to_string(c.gradient_estimator))}};
}

}  // namespace alpha_descent
