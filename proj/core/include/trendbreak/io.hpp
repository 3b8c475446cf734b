#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trendbreak/detect.hpp"
#include "trendbreak/eval.hpp"
#include "trendbreak/types.hpp"

namespace trendbreak::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, int line, const std::string& what)
      : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Profiles and event lists are delimited text with a key/value header;
// doubles are written with 17 significant digits, so read(write(x)) == x
// bit-exactly. Shapes, compensation vectors and detection results are JSON.

void write_profile(const std::filesystem::path& path, const FiberProfile& y,
                   char delim = ',');
FiberProfile read_profile(const std::filesystem::path& path, char delim = ',');

void write_events(const std::filesystem::path& path, const EventList& events,
                  int n, char delim = ',');
// returns the events and the profile length recorded in the header
std::pair<EventList, int> read_events(const std::filesystem::path& path,
                                      char delim = ',');

void write_cluster_shape(const std::filesystem::path& path, const ClusterShape& shape);
ClusterShape read_cluster_shape(const std::filesystem::path& path);

void write_compensation(const std::filesystem::path& path, const CompensationVector& comp);
CompensationVector read_compensation(const std::filesystem::path& path);

struct DetectionResult {
  SolverConfig solver;
  double min_magnitude = 0.05;
  std::string method = "raw";  // raw | compensated | ls-deconv
  EventList events;
  std::optional<ContingencyTable> table;  // present when truth was supplied
  std::optional<double> mcc;
  std::optional<double> timing_ms;  // only set with --timing; keeps files bit-stable
};

void write_result(const std::filesystem::path& path, const DetectionResult& result);
DetectionResult read_result(const std::filesystem::path& path);

void write_sweep_table(const std::filesystem::path& path, const SweepResult& sweep,
                       char delim = ',');

// one histogram column per (label, histogram) pair, rows = event counts
void write_histogram(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::map<int, int>>>& series,
                     char delim = ',');

// position, truth, raw and optionally compensated step values per row
void write_overlay(const std::filesystem::path& path, int n, const EventList& truth,
                   const SparseEstimate& raw, const SparseEstimate* compensated,
                   char delim = ',');

}  // namespace trendbreak::io
