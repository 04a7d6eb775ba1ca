#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tailcop/point.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

struct CsvOptions {
  char delimiter = ',';
  bool header = false;  // first row is a header; auto-detected when false
  TiePolicy ties = TiePolicy::Error;
};

// Two numeric columns per row. A first row whose fields do not parse as
// numbers is treated as a header. Throws DataError on malformed rows,
// non-finite values or (by default) ties.
BivariateSample read_sample_csv(std::istream& in, const CsvOptions& options = {});
BivariateSample read_sample_csv(const std::filesystem::path& path, const CsvOptions& options = {});

void write_sample_csv(const BivariateSample& sample, std::ostream& out);

// (phi, value) rows.
void write_angular_csv(std::span<const double> phi, std::span<const double> values, std::ostream& out);
// (x1, x2, value) rows.
void write_point_csv(std::span<const Point> points, std::span<const double> values, std::ostream& out);

}  // namespace tailcop
