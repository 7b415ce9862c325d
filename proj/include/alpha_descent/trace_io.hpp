#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpha_descent/config.hpp"
#include "alpha_descent/descent.hpp"

namespace alpha_descent {

/// Header of every per-replicate CSV.
inline constexpr const char* kTraceCsvHeader = "t,n,vr_bound,psi_exact,guard_min,elapsed_ms";

/// One CSV row. Doubles are written in shortest round-trip form. Non-finite
/// values appear verbatim as nan or as a signed inf.
struct TraceRow {
  std::size_t t = 0;
  std::size_t n = 0;
  double vr_bound = 0.0;
  double psi_exact = 0.0;
  double guard_min = 0.0;
  double elapsed_ms = 0.0;
};

/// I/O and format failures, carrying the offending path.
class TraceIoError : public std::runtime_error {
 public:
  TraceIoError(const std::filesystem::path& path, const std::string& problem)
      : std::runtime_error(path.string() + ": " + problem), path_(path) {}

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::vector<TraceRow> trace_rows(const DescentTrace& trace);

std::string format_trace_csv(const DescentTrace& trace);
std::vector<TraceRow> parse_trace_csv(const std::string& text);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Cross-replicate statistics of the VR bound at one (t, n).
struct SeriesPoint {
  std::size_t t = 0;
  std::size_t n = 0;
  double vr_mean = 0.0;
  double vr_std = 0.0;  ///< sample standard deviation; 0 with fewer than two values
  std::size_t count = 0;
};

/// One entry per (t, n) reached by any replicate, ordered by (t, n). A
/// replicate that stopped early contributes only to the points it reached.
std::vector<SeriesPoint> summarise(const std::vector<DescentTrace>& traces);

nlohmann::json summary_json(const std::vector<DescentTrace>& traces, const ExperimentConfig& config);

/// Writes rep_<r>.csv for every replicate and summary.json into `out_dir`,
/// creating the directory if needed.
void write_trace(const std::vector<DescentTrace>& traces, const ExperimentConfig& config,
                 const std::filesystem::path& out_dir);

}  // namespace alpha_descent
