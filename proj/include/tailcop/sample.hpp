#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tailcop {

enum class TiePolicy {
  Error,         // ties in a column raise DataError
  ByOccurrence,  // earlier observations receive the smaller rank
};

// n paired observations together with their componentwise ranks 1..n.
class BivariateSample {
 public:
  BivariateSample() = default;
  BivariateSample(std::vector<double> first, std::vector<double> second,
                  TiePolicy ties = TiePolicy::Error);

  std::size_t size() const { return first_.size(); }
  bool empty() const { return first_.empty(); }

  std::span<const double> column(int j) const { return j == 1 ? first_ : second_; }

  // ranks(j)[i] is the rank of observation i within column j.
  std::span<const std::int32_t> ranks(int j) const { return j == 1 ? rank1_ : rank2_; }

  // owner(j)[r - 1] is the observation holding rank r in column j.
  std::span<const std::int32_t> owner(int j) const { return j == 1 ? owner1_ : owner2_; }

 private:
  std::vector<double> first_;
  std::vector<double> second_;
  std::vector<std::int32_t> rank1_;
  std::vector<std::int32_t> rank2_;
  std::vector<std::int32_t> owner1_;
  std::vector<std::int32_t> owner2_;
};

}  // namespace tailcop
