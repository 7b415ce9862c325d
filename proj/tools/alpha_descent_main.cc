#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alpha_descent/check.hpp"
#include "alpha_descent/config.hpp"
#include "alpha_descent/experiment.hpp"
#include "alpha_descent/trace_io.hpp"

namespace {

using nlohmann::json;
namespace ad = alpha_descent;

/// Command-line values that replace the matching config keys when given.
struct Overrides {
  std::optional<std::string> algorithm;
  std::optional<double> alpha;
  std::optional<double> eta0;
  std::optional<double> kappa;
  std::optional<double> kappa_prime;
  std::optional<std::uint64_t> j;
  std::vector<std::uint64_t> m;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> t;
  std::optional<std::uint64_t> d;
  std::optional<std::uint64_t> replicates;
  std::optional<double> target_s;
  std::optional<double> target_c;
  std::optional<double> q0_scale;
  std::optional<double> c_h;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> exploration;
  std::optional<bool> renyi_unweighted_mu_b;
  std::optional<bool> reuse_monitor_samples;
  std::optional<std::string> gradient_estimator;

  void apply(json& root) const {
    const auto set = [&root](const char* key, const auto& value) {
      if (value) root[key] = *value;
    };
    set("algorithm", algorithm);
    set("alpha", alpha);
    set("eta0", eta0);
    set("kappa", kappa);
    set("kappa_prime", kappa_prime);
    set("j", j);
    if (!m.empty()) root["m"] = m;
    set("n", n);
    set("t", t);
    set("d", d);
    set("replicates", replicates);
    set("c_h", c_h);
    set("seed", seed);
    set("exploration", exploration);
    set("renyi_unweighted_mu_b", renyi_unweighted_mu_b);
    set("reuse_monitor_samples", reuse_monitor_samples);
    set("gradient_estimator", gradient_estimator);
    if (target_s) root["target"]["s"] = *target_s;
    if (target_c) root["target"]["c"] = *target_c;
    if (q0_scale) root["q0"]["scale"] = *q0_scale;
  }
};

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ad::ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& error) {
    throw ad::ConfigError("<file>", path.string() + " is not valid JSON: " + error.what());
  }
}

int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        const Overrides& overrides, std::size_t threads) {
  json root = load_json(config_path);
  if (root.is_object()) overrides.apply(root);
  const ad::ExperimentConfig config = ad::config_from_json(root);

  const auto runs = config.expand_sample_sizes();
  int failed_replicates = 0;
  for (const auto& single : runs) {
    const std::filesystem::path dir =
        runs.size() == 1 ? out_dir : out_dir / ("m_" + std::to_string(single.sample_sizes.front()));
    std::cerr << "running " << single.replicates << " replicates of " << ad::to_string(single.algorithm)
              << " with M = " << single.sample_sizes.front() << "\n";
    const auto traces = ad::run_experiment(single, threads);
    ad::write_trace(traces, single, dir);
    for (std::size_t r = 0; r < traces.size(); ++r) {
      if (traces[r].status != ad::TraceStatus::kCompleted) {
        ++failed_replicates;
        std::cerr << "replicate " << r << ": " << ad::to_string(traces[r].status) << ": "
                  << traces[r].message << "\n";
      }
    }
    const auto series = ad::summarise(traces);
    if (!series.empty()) {
      std::cerr << "final mean VR bound " << series.back().vr_mean << " (sd " << series.back().vr_std
                << ") written to " << dir.string() << "\n";
    }
  }
  if (failed_replicates > 0) std::cerr << failed_replicates << " replicate(s) stopped early\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixture-weight optimisation by alpha-divergence descent"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the exploitation-exploration experiment");
  std::string config_path;
  std::string out_dir = "out";
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  Overrides o;
  run_cmd->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--threads", threads, "Worker threads for replicates")->capture_default_str();
  run_cmd->add_option("--algorithm", o.algorithm, "power, renyi, emd or kl");
  run_cmd->add_option("--alpha", o.alpha);
  run_cmd->add_option("--eta0", o.eta0);
  run_cmd->add_option("--kappa", o.kappa);
  run_cmd->add_option("--kappa_prime", o.kappa_prime);
  run_cmd->add_option("--j", o.j, "Number of mixture components");
  run_cmd->add_option("--m", o.m, "Sample sizes, one run each");
  run_cmd->add_option("--n", o.n, "Descent steps per phase");
  run_cmd->add_option("--t", o.t, "Number of phases");
  run_cmd->add_option("--d", o.d, "Dimension");
  run_cmd->add_option("--replicates", o.replicates);
  run_cmd->add_option("--target_s", o.target_s, "Mode separation of the default target");
  run_cmd->add_option("--target_c", o.target_c, "Scale of the target");
  run_cmd->add_option("--q0_scale", o.q0_scale, "Covariance scale of the initial particles");
  run_cmd->add_option("--c_h", o.c_h, "Bandwidth constant");
  run_cmd->add_option("--seed", o.seed);
  run_cmd->add_option("--exploration", o.exploration, "resample or mean_update");
  run_cmd->add_option("--renyi_unweighted_mu_b", o.renyi_unweighted_mu_b);
  run_cmd->add_option("--reuse_monitor_samples", o.reuse_monitor_samples);
  run_cmd->add_option("--gradient_estimator", o.gradient_estimator, "literal or kernel_identity");

  auto* check_cmd = app.add_subcommand("check", "Run the exact-oracle invariant suite");
  std::uint64_t check_seed = 20240601;
  std::size_t check_count = 100;
  check_cmd->add_option("--seed", check_seed)->capture_default_str();
  check_cmd->add_option("--count", check_count, "Random problems to test")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return run(config_path, out_dir, o, threads);
    if (check_cmd->parsed()) return ad::run_invariant_checks(check_seed, check_count, std::cout) ? 0 : 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
  return 0;
}
