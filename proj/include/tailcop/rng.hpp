#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace tailcop {

// Philox4x64-10 counter-based generator (Salmon et al., SC'11). The
// counter is incremented before each block, matching numpy's Philox.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;
  using Key = std::array<std::uint64_t, 2>;
  using Counter = std::array<std::uint64_t, 4>;

  Philox4x64(Key key, Counter counter) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      increment();
      buffer_ = block(counter_, key_);
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  static Counter block(Counter ctr, Key key);

  const Counter& counter() const { return counter_; }

 private:
  void increment() {
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
  }

  Key key_;
  Counter counter_;
  Counter buffer_{};
  int pos_ = 4;
};

// Stream roles used to separate data, multiplier and resampling randomness.
enum class StreamRole : std::uint64_t { Data = 1, Weights = 2, Resample = 3 };

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view text);

// A reproducible random stream keyed by a seed and a path of tags. Streams
// with different paths are statistically independent; child() derives a new
// stream without consuming any output of the parent.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

  RngStream child(std::uint64_t tag) const;
  RngStream child(StreamRole role) const { return child(static_cast<std::uint64_t>(role)); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64);
  }

  std::uint64_t seed() const { return seed_; }
  const Philox4x64::Key& key() const { return key_; }

 private:
  RngStream(std::uint64_t seed, Philox4x64::Key key);

  std::uint64_t seed_;
  Philox4x64::Key key_;
  Philox4x64 engine_;
};

}  // namespace tailcop
