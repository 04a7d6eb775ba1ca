#include "tailcop/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tailcop/errors.hpp"

namespace tailcop {

namespace {

void rank_column(const std::vector<double>& values, TiePolicy ties, int column,
                 std::vector<std::int32_t>& rank, std::vector<std::int32_t>& owner) {
  const std::size_t n = values.size();
  owner.resize(n);
  std::iota(owner.begin(), owner.end(), 0);
  std::stable_sort(owner.begin(), owner.end(),
                   [&](std::int32_t a, std::int32_t b) { return values[a] < values[b]; });
  rank.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && ties == TiePolicy::Error && values[owner[r]] == values[owner[r - 1]]) {
      throw DataError("tied values in column " + std::to_string(column) + " (observations " +
                      std::to_string(owner[r - 1] + 1) + " and " + std::to_string(owner[r] + 1) +
                      ")");
    }
    rank[owner[r]] = static_cast<std::int32_t>(r + 1);
  }
}

}  // namespace

BivariateSample::BivariateSample(std::vector<double> first, std::vector<double> second,
                                 TiePolicy ties)
    : first_(std::move(first)), second_(std::move(second)) {
  if (first_.size() != second_.size()) {
    throw DataError("columns have different lengths");
  }
  if (first_.size() > static_cast<std::size_t>(INT32_MAX)) {
    throw DataError("sample too large");
  }
  for (std::size_t i = 0; i < first_.size(); ++i) {
    if (!std::isfinite(first_[i]) || !std::isfinite(second_[i])) {
      throw DataError("non-finite value at observation " + std::to_string(i + 1));
    }
  }
  rank_column(first_, ties, 1, rank1_, owner1_);
  rank_column(second_, ties, 2, rank2_, owner2_);
}

}  // namespace tailcop
