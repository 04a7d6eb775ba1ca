#include "tailcop/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "tailcop/errors.hpp"

namespace tailcop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool split_pair(std::string_view line, char delim, std::string_view& a, std::string_view& b) {
  const auto pos = line.find(delim);
  if (pos == std::string_view::npos) return false;
  a = line.substr(0, pos);
  b = line.substr(pos + 1);
  // Extra columns are not part of the format.
  return b.find(delim) == std::string_view::npos;
}

}  // namespace

BivariateSample read_sample_csv(std::istream& in, const CsvOptions& options) {
  std::vector<double> first, second;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view a, b;
    if (!split_pair(line, options.delimiter, a, b)) {
      throw DataError(fmt::format("line {}: expected two columns", line_no));
    }
    double x = 0.0, y = 0.0;
    const bool ok = parse_double(a, x) && parse_double(b, y);
    if (header_pending || (!ok && first.empty() && line_no == 1)) {
      header_pending = false;
      continue;
    }
    if (!ok) throw DataError(fmt::format("line {}: fields are not numbers", line_no));
    first.push_back(x);
    second.push_back(y);
  }
  if (first.empty()) throw DataError("no observations");
  return BivariateSample(std::move(first), std::move(second), options.ties);
}

BivariateSample read_sample_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return read_sample_csv(in, options);
}

void write_sample_csv(const BivariateSample& sample, std::ostream& out) {
  out << "x1,x2\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g}\n", sample.column(1)[i], sample.column(2)[i]);
  }
}

void write_angular_csv(std::span<const double> phi, std::span<const double> values, std::ostream& out) {
  out << "phi,value\n";
  for (std::size_t j = 0; j < phi.size(); ++j) out << fmt::format("{:.17g},{:.17g}\n", phi[j], values[j]);
}

void write_point_csv(std::span<const Point> points, std::span<const double> values, std::ostream& out) {
  out << "x1,x2,value\n";
  for (std::size_t j = 0; j < points.size(); ++j) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", points[j].x1, points[j].x2, values[j]);
  }
}

}  // namespace tailcop
