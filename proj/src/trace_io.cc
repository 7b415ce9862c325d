#include "alpha_descent/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

namespace alpha_descent {
namespace {

void append_double(std::string& out, double value) {
  if (std::isnan(value)) {
    out += "nan";
    return;
  }
  if (std::isinf(value)) {
    out += value > 0 ? "inf" : "-inf";
    return;
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.append(buffer, result.ptr);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::invalid_argument(
        fmt::format("line {}: cannot parse {} from '{}'", line, name, field));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) return fields;
    start = comma + 1;
  }
}

}  // namespace

std::vector<TraceRow> trace_rows(const DescentTrace& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    rows.push_back({r.t, r.n, r.vr_bound, r.psi_exact, r.guard_min, r.elapsed_ms});
  }
  return rows;
}

std::string format_trace_csv(const DescentTrace& trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (const auto& row : trace_rows(trace)) {
    out += std::to_string(row.t);
    out += ',';
    out += std::to_string(row.n);
    for (const double v : {row.vr_bound, row.psi_exact, row.guard_min, row.elapsed_ms}) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceCsvHeader) {
    throw std::invalid_argument(fmt::format("expected header '{}'", kTraceCsvHeader));
  }
  std::vector<TraceRow> rows;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 6) {
      throw std::invalid_argument(
          fmt::format("line {}: expected 6 fields, got {}", line_number, fields.size()));
    }
    TraceRow row;
    row.t = parse_field<std::size_t>(fields[0], line_number, "t");
    row.n = parse_field<std::size_t>(fields[1], line_number, "n");
    row.vr_bound = parse_field<double>(fields[2], line_number, "vr_bound");
    row.psi_exact = parse_field<double>(fields[3], line_number, "psi_exact");
    row.guard_min = parse_field<double>(fields[4], line_number, "guard_min");
    row.elapsed_ms = parse_field<double>(fields[5], line_number, "elapsed_ms");
    rows.push_back(row);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceIoError(path, "cannot open for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_trace_csv(buffer.str());
  } catch (const std::invalid_argument& error) {
    throw TraceIoError(path, error.what());
  }
}

std::vector<SeriesPoint> summarise(const std::vector<DescentTrace>& traces) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> values;
  for (const auto& trace : traces) {
    for (const auto& record : trace.records) values[{record.t, record.n}].push_back(record.vr_bound);
  }
  std::vector<SeriesPoint> series;
  for (const auto& [key, v] : values) {
    SeriesPoint point{key.first, key.second, 0.0, 0.0, v.size()};
    double sum = 0.0;
    for (const double x : v) sum += x;
    point.vr_mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
      double squares = 0.0;
      for (const double x : v) squares += (x - point.vr_mean) * (x - point.vr_mean);
      point.vr_std = std::sqrt(squares / static_cast<double>(v.size() - 1));
    }
    series.push_back(point);
  }
  return series;
}

nlohmann::json summary_json(const std::vector<DescentTrace>& traces, const ExperimentConfig& config) {
  nlohmann::json series = nlohmann::json::array();
  for (const auto& point : summarise(traces)) {
    series.push_back({{"t", point.t},
                      {"n", point.n},
                      {"vr_mean", point.vr_mean},
                      {"vr_std", point.vr_std},
                      {"count", point.count}});
  }
  nlohmann::json statuses = nlohmann::json::array();
  for (std::size_t r = 0; r < traces.size(); ++r) {
    statuses.push_back({{"replicate", r},
                        {"status", std::string(to_string(traces[r].status))},
                        {"message", traces[r].message},
                        {"non_finite_bound", traces[r].non_finite_bound}});
  }
  return {{"config", to_json(config)}, {"series", series}, {"statuses", statuses}};
}

void write_trace(const std::vector<DescentTrace>& traces, const ExperimentConfig& config,
                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw TraceIoError(out_dir, "cannot create directory: " + ec.message());

  const auto write_file = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw TraceIoError(path, "cannot open for writing");
    out << content;
    out.close();
    if (!out) throw TraceIoError(path, "write failed");
  };
  for (std::size_t r = 0; r < traces.size(); ++r) {
    write_file(out_dir / fmt::format("rep_{}.csv", r), format_trace_csv(traces[r]));
  }
  write_file(out_dir / "summary.json", summary_json(traces, config).dump(2) + "\n");
}

}  // namespace alpha_descent
