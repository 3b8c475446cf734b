#include "trendbreak/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace trendbreak::io {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, const std::filesystem::path& path, int line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(path, line, "bad number '" + field + "'");
  if (!std::isfinite(v)) throw ParseError(path, line, "non-finite number");
  return v;
}

long parse_int(const std::string& field, const std::filesystem::path& path, int line) {
  long v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(path, line, "bad integer '" + field + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& field, const std::filesystem::path& path, int line) {
  std::uint64_t v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(path, line, "bad unsigned integer '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delim)) fields.push_back(field);
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

class LineReader {
 public:
  LineReader(const std::filesystem::path& path, char delim)
      : path_(path), delim_(delim), in_(path) {
    if (!in_) throw ParseError(path, 0, "cannot open file");
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fields = split(line, delim_);
    return true;
  }

  std::vector<std::string> require(const std::string& what) {
    std::vector<std::string> fields;
    if (!next(fields)) throw ParseError(path_, line_ + 1, "unexpected end of file, expected " + what);
    return fields;
  }

  int line() const { return line_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  char delim_;
  std::ifstream in_;
  int line_ = 0;
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void check_format(LineReader& reader, const std::vector<std::string>& fields,
                  const std::string& name, int version) {
  if (fields.size() < 3 || fields[0] != "format" || fields[1] != name)
    throw ParseError(reader.path(), reader.line(), "not a " + name + " file");
  if (parse_int(fields[2], reader.path(), reader.line()) != version)
    throw ParseError(reader.path(), reader.line(), "unsupported " + name + " version " + fields[2]);
}

json load_json(const std::filesystem::path& path, const std::string& format, int version) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (j.value("format", "") != format)
    throw ParseError(path, 0, "not a " + format + " file");
  if (j.value("format_version", -1) != version)
    throw ParseError(path, 0, "unsupported " + format + " version");
  return j;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

void write_profile(const std::filesystem::path& path, const FiberProfile& y, char delim) {
  validate_profile(y);
  auto out = open_out(path);
  const char d = delim;
  out << "format" << d << "otdr-profile" << d << 1 << '\n';
  out << "n" << d << y.n() << '\n';
  if (y.meta) {
    out << "seed" << d << y.meta->seed << '\n';
    out << "slope" << d << fmt(y.meta->slope) << '\n';
    if (y.meta->noise.kind == NoiseConfig::Kind::gaussian)
      out << "noise" << d << "gaussian" << d << fmt(y.meta->noise.sigma0) << d
          << fmt(y.meta->noise.growth) << '\n';
    else
      out << "noise" << d << "none" << '\n';
    if (!y.meta->source_id.empty()) out << "source" << d << y.meta->source_id << '\n';
  }
  out << "index" << d << "value" << '\n';
  for (int k = 1; k <= y.n(); ++k)
    out << k << d << fmt(y.samples[static_cast<std::size_t>(k - 1)]) << '\n';
}

FiberProfile read_profile(const std::filesystem::path& path, char delim) {
  LineReader reader(path, delim);
  auto fields = reader.require("format header");
  check_format(reader, fields, "otdr-profile", 1);

  FiberProfile y;
  ProfileMeta meta;
  bool has_meta = false;
  int n = -1;
  while (true) {
    fields = reader.require("header or column row");
    if (fields.empty()) throw ParseError(path, reader.line(), "blank line in header");
    const std::string& key = fields[0];
    if (key == "index") break;
    if (key == "n" && fields.size() == 2) {
      n = static_cast<int>(parse_int(fields[1], path, reader.line()));
    } else if (key == "seed" && fields.size() == 2) {
      meta.seed = parse_u64(fields[1], path, reader.line());
      has_meta = true;
    } else if (key == "slope" && fields.size() == 2) {
      meta.slope = parse_double(fields[1], path, reader.line());
      has_meta = true;
    } else if (key == "noise") {
      if (fields.size() == 2 && fields[1] == "none") {
        meta.noise = NoiseConfig{};
      } else if (fields.size() == 4 && fields[1] == "gaussian") {
        meta.noise.kind = NoiseConfig::Kind::gaussian;
        meta.noise.sigma0 = parse_double(fields[2], path, reader.line());
        meta.noise.growth = parse_double(fields[3], path, reader.line());
      } else {
        throw ParseError(path, reader.line(), "bad noise header");
      }
      has_meta = true;
    } else if (key == "source" && fields.size() == 2) {
      meta.source_id = fields[1];
      has_meta = true;
    } else {
      throw ParseError(path, reader.line(), "unknown header key '" + key + "'");
    }
  }
  if (n < 2) throw ParseError(path, reader.line(), "missing or bad n header");

  y.samples.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::vector<std::string> row;
    if (!reader.next(row))
      throw ParseError(path, reader.line() + 1,
                       "missing row for index " + std::to_string(k) + " of " + std::to_string(n));
    if (row.size() != 2) throw ParseError(path, reader.line(), "expected index and value");
    if (parse_int(row[0], path, reader.line()) != k)
      throw ParseError(path, reader.line(), "expected index " + std::to_string(k) + ", got " + row[0]);
    y.samples.push_back(parse_double(row[1], path, reader.line()));
  }
  std::vector<std::string> extra;
  if (reader.next(extra) && !(extra.size() == 1 && extra[0].empty()))
    throw ParseError(path, reader.line(), "trailing data after " + std::to_string(n) + " rows");
  if (has_meta) y.meta = meta;
  validate_profile(y);
  return y;
}

void write_events(const std::filesystem::path& path, const EventList& events, int n,
                  char delim) {
  validate_events(events, n);
  auto out = open_out(path);
  const char d = delim;
  out << "format" << d << "otdr-events" << d << 1 << '\n';
  out << "n" << d << n << '\n';
  out << "position" << d << "magnitude" << '\n';
  for (const Event& e : events) out << e.position << d << fmt(e.magnitude) << '\n';
}

std::pair<EventList, int> read_events(const std::filesystem::path& path, char delim) {
  LineReader reader(path, delim);
  auto fields = reader.require("format header");
  check_format(reader, fields, "otdr-events", 1);

  fields = reader.require("n header");
  if (fields.size() != 2 || fields[0] != "n")
    throw ParseError(path, reader.line(), "expected n header");
  const int n = static_cast<int>(parse_int(fields[1], path, reader.line()));

  fields = reader.require("column row");
  if (fields.size() != 2 || fields[0] != "position")
    throw ParseError(path, reader.line(), "expected position/magnitude columns");

  EventList events;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw ParseError(path, reader.line(), "expected position and magnitude");
    events.push_back(Event{static_cast<int>(parse_int(row[0], path, reader.line())),
                           parse_double(row[1], path, reader.line())});
  }
  try {
    validate_events(events, n);
  } catch (const std::domain_error& e) {
    throw ParseError(path, reader.line(), e.what());
  }
  return {events, n};
}

namespace {

json shape_to_json(const char* format, int alpha, int split_len,
                   const std::vector<double>& taps) {
  json j;
  j["format"] = format;
  j["format_version"] = 1;
  j["alpha"] = alpha;
  j["split_len"] = split_len;
  j["taps"] = taps;
  return j;
}

}  // namespace

void write_cluster_shape(const std::filesystem::path& path, const ClusterShape& shape) {
  json j = shape_to_json("otdr-cluster-shape", shape.alpha, shape.split_len, shape.taps);
  j["extraction"] = {{"n_profiles", shape.n_profiles},
                     {"seed", shape.seed},
                     {"half_width", shape.half_width_cfg}};
  dump_json(path, j);
}

ClusterShape read_cluster_shape(const std::filesystem::path& path) {
  const json j = load_json(path, "otdr-cluster-shape", 1);
  ClusterShape shape;
  try {
    shape.alpha = j.at("alpha").get<int>();
    shape.split_len = j.at("split_len").get<int>();
    shape.taps = j.at("taps").get<std::vector<double>>();
    const json& ex = j.at("extraction");
    shape.n_profiles = ex.at("n_profiles").get<int>();
    shape.seed = ex.at("seed").get<std::uint64_t>();
    shape.half_width_cfg = ex.at("half_width").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (shape.taps.empty() || shape.taps.size() % 2 == 0)
    throw ParseError(path, 0, "shape must have an odd tap count");
  if (shape.center() != 1.0) throw ParseError(path, 0, "shape center tap must be 1");
  return shape;
}

void write_compensation(const std::filesystem::path& path, const CompensationVector& comp) {
  dump_json(path, shape_to_json("otdr-compensation", comp.alpha, comp.split_len, comp.taps));
}

CompensationVector read_compensation(const std::filesystem::path& path) {
  const json j = load_json(path, "otdr-compensation", 1);
  CompensationVector comp;
  try {
    comp.alpha = j.at("alpha").get<int>();
    comp.split_len = j.at("split_len").get<int>();
    comp.taps = j.at("taps").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (comp.taps.empty() || comp.taps.size() % 2 == 0)
    throw ParseError(path, 0, "compensation vector must have an odd tap count");
  if (comp.taps[static_cast<std::size_t>(comp.half_width())] != 0.0)
    throw ParseError(path, 0, "compensation vector center tap must be 0");
  return comp;
}

void write_result(const std::filesystem::path& path, const DetectionResult& result) {
  json j;
  j["format"] = "otdr-result";
  j["format_version"] = 1;
  j["solver"] = {{"alpha", result.solver.alpha},
                 {"lambda", result.solver.lambda},
                 {"split_len", result.solver.split_len},
                 {"relaxation", result.solver.relaxation},
                 {"shrink_slope", result.solver.shrink_slope}};
  j["min_magnitude"] = result.min_magnitude;
  j["method"] = result.method;
  json events = json::array();
  for (const Event& e : result.events)
    events.push_back({{"position", e.position}, {"magnitude", e.magnitude}});
  j["events"] = events;
  if (result.table)
    j["contingency"] = {{"tp", result.table->tp},
                        {"fp", result.table->fp},
                        {"fn", result.table->fn},
                        {"tn", result.table->tn}};
  if (result.mcc) j["mcc"] = *result.mcc;
  j["timing_ms"] = result.timing_ms ? json(*result.timing_ms) : json(nullptr);
  dump_json(path, j);
}

DetectionResult read_result(const std::filesystem::path& path) {
  const json j = load_json(path, "otdr-result", 1);
  DetectionResult result;
  try {
    const json& solver = j.at("solver");
    result.solver.alpha = solver.at("alpha").get<int>();
    result.solver.lambda = solver.at("lambda").get<double>();
    result.solver.split_len = solver.at("split_len").get<int>();
    result.solver.relaxation = solver.at("relaxation").get<double>();
    result.solver.shrink_slope = solver.at("shrink_slope").get<bool>();
    result.min_magnitude = j.at("min_magnitude").get<double>();
    result.method = j.at("method").get<std::string>();
    for (const json& e : j.at("events"))
      result.events.push_back(
          Event{e.at("position").get<int>(), e.at("magnitude").get<double>()});
    if (j.contains("contingency")) {
      const json& t = j.at("contingency");
      result.table = ContingencyTable{t.at("tp").get<std::int64_t>(),
                                      t.at("fp").get<std::int64_t>(),
                                      t.at("fn").get<std::int64_t>(),
                                      t.at("tn").get<std::int64_t>()};
    }
    if (j.contains("mcc")) result.mcc = j.at("mcc").get<double>();
    if (j.contains("timing_ms") && !j.at("timing_ms").is_null())
      result.timing_ms = j.at("timing_ms").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return result;
}

void write_sweep_table(const std::filesystem::path& path, const SweepResult& sweep,
                       char delim) {
  if (sweep.points.empty()) throw std::domain_error("empty sweep");
  auto out = open_out(path);
  const char d = delim;
  bool any_comp = false;
  for (const auto& p : sweep.points) any_comp = any_comp || p.compensated.has_value();
  out << sweep.axis_name << d << "mcc_mean_raw" << d << "mcc_std_raw";
  if (any_comp) out << d << "mcc_mean_compensated" << d << "mcc_std_compensated";
  out << '\n';
  for (const auto& p : sweep.points) {
    out << fmt(p.axis_value) << d << fmt(p.raw.mean()) << d << fmt(p.raw.stddev());
    if (any_comp) {
      if (p.compensated)
        out << d << fmt(p.compensated->mean()) << d << fmt(p.compensated->stddev());
      else
        out << d << d;
    }
    out << '\n';
  }
}

void write_histogram(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::map<int, int>>>& series,
                     char delim) {
  if (series.empty()) throw std::domain_error("no histogram series");
  auto out = open_out(path);
  const char d = delim;
  out << "events";
  for (const auto& [label, hist] : series) out << d << label;
  out << '\n';
  std::map<int, int> keys;
  for (const auto& [label, hist] : series)
    for (const auto& [count, freq] : hist) keys[count] = 0;
  for (const auto& [count, unused] : keys) {
    out << count;
    for (const auto& [label, hist] : series) {
      const auto it = hist.find(count);
      out << d << (it == hist.end() ? 0 : it->second);
    }
    out << '\n';
  }
}

void write_overlay(const std::filesystem::path& path, int n, const EventList& truth,
                   const SparseEstimate& raw, const SparseEstimate* compensated,
                   char delim) {
  if (raw.n() != n || (compensated && compensated->n() != n))
    throw std::domain_error("overlay inputs disagree on n");
  validate_events(truth, n);
  auto out = open_out(path);
  const char d = delim;
  out << "position" << d << "truth" << d << "raw";
  if (compensated) out << d << "compensated";
  out << '\n';
  std::vector<double> truth_steps(static_cast<std::size_t>(n) + 1, 0.0);
  for (const Event& e : truth) truth_steps[static_cast<std::size_t>(e.position)] = e.magnitude;
  for (int i = 1; i <= n; ++i) {
    out << i << d << fmt(truth_steps[static_cast<std::size_t>(i)]) << d << fmt(raw.step(i));
    if (compensated) out << d << fmt(compensated->step(i));
    out << '\n';
  }
}

}  // namespace trendbreak::io
