#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "curepl/errors.hpp"
#include "curepl/sample.hpp"

// CSV ingestion and emission. Datasets use the header `x,time,status` with
// status one of `event`, `censored`, `cured`; lines starting with `#` are
// comments. Numbers are read and written with <charconv>, so neither side
// depends on the C locale.

namespace curepl {

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

/// Strict decimal parse of the whole field; rejects empty, partial and
/// non-finite input.
inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

/// Shortest round-trippable form limited to 12 significant digits.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, ptr);
  if (s == "-0") s = "0";
  return s;
}

inline bool parse_outcome(std::string_view token, Outcome& out) {
  token = trim(token);
  if (token == "event") {
    out = Outcome::kEvent;
  } else if (token == "censored") {
    out = Outcome::kCensoredUnknown;
  } else if (token == "cured") {
    out = Outcome::kCensoredCured;
  } else {
    return false;
  }
  return true;
}

struct RowDiagnostic {
  std::size_t line = 0;
  std::string reason;
};

struct DatasetFile {
  std::string path;
  std::vector<SurvivalRecord> records;
  std::vector<RowDiagnostic> diagnostics;  // rejected rows (lenient mode only)
};

enum class ParseMode {
  kStrict,   // first malformed row throws MalformedRow
  kLenient,  // malformed rows are skipped and listed in diagnostics
};

inline DatasetFile parse_dataset_stream(std::istream& in, std::string path,
                                        ParseMode mode = ParseMode::kStrict) {
  DatasetFile file;
  file.path = std::move(path);
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  auto reject = [&](std::string reason) {
    if (mode == ParseMode::kStrict) throw MalformedRow(line_no, reason);
    file.diagnostics.push_back({line_no, std::move(reason)});
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() != 3 || trim(fields[0]) != "x" || trim(fields[1]) != "time" ||
          trim(fields[2]) != "status") {
        throw MalformedRow(line_no, "expected header x,time,status");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      reject("expected 3 fields, found " + std::to_string(fields.size()));
      continue;
    }
    SurvivalRecord r;
    if (!parse_double(fields[0], r.x)) {
      reject("non-numeric covariate");
      continue;
    }
    if (!parse_double(fields[1], r.t)) {
      reject("non-numeric time");
      continue;
    }
    if (r.t < 0.0) {
      reject("negative time");
      continue;
    }
    if (!parse_outcome(fields[2], r.outcome)) {
      reject("status must be event, censored or cured");
      continue;
    }
    file.records.push_back(r);
  }
  if (file.records.empty()) throw EmptyFile(file.path);
  return file;
}

inline DatasetFile parse_dataset(const std::string& path, ParseMode mode = ParseMode::kStrict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  return parse_dataset_stream(in, path, mode);
}

inline void write_dataset(std::ostream& out, std::span<const SurvivalRecord> records) {
  out << "x,time,status\n";
  for (const auto& r : records) {
    out << format_number(r.x) << ',' << format_number(r.t) << ',' << to_string(r.outcome)
        << '\n';
  }
}

inline void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

/// `t,value` rows with the right-continuous evaluation of the curve.
inline void write_curve(std::ostream& out, const StepCurve& curve,
                        std::span<const double> grid) {
  out << "t,value\n";
  for (double t : grid) out << format_number(t) << ',' << format_number(curve(t)) << '\n';
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace detail

/// Writes the curve CSV to `path` and the metadata block to `path + ".meta"`.
inline void emit_curve(const StepCurve& curve, std::span<const double> grid,
                       const std::string& path, const Metadata& meta) {
  std::ostringstream csv;
  write_curve(csv, curve, grid);
  detail::write_file(path, csv.str());
  std::ostringstream side;
  write_metadata(side, meta);
  detail::write_file(path + ".meta", side.str());
}

/// CSV with leading `# key=value` metadata lines.
inline void write_table(std::ostream& out, const Metadata& meta, std::string_view header,
                        const std::vector<std::vector<std::string>>& rows) {
  write_metadata(out, meta);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

inline void emit_table(const std::string& path, const Metadata& meta, std::string_view header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  write_table(s, meta, header, rows);
  detail::write_file(path, s.str());
}

/// Flat `key=value` configuration; blank lines and `#` comments ignored.
inline std::vector<std::pair<std::string, std::string>> parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw MalformedRow(line_no, "config lines must be key=value");
    }
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

}  // namespace curepl
