#include "tailcop/rng.hpp"

namespace tailcop {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view text) {
  // FNV-1a, finalized with splitmix64.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : RngStream(seed, Philox4x64::Key{splitmix64(seed), splitmix64(seed ^ 0x6A09E667F3BCC909ULL)}) {
  for (std::uint64_t tag : path) {
    *this = child(tag);
  }
}

RngStream::RngStream(std::uint64_t seed, Philox4x64::Key key)
    : seed_(seed), key_(key), engine_(key, Philox4x64::Counter{}) {}

RngStream RngStream::child(std::uint64_t tag) const {
  const std::uint64_t t = splitmix64(tag + 0x3C6EF372FE94F82BULL);
  return RngStream(seed_, Philox4x64::Key{splitmix64(key_[0] ^ t), splitmix64(key_[1] + t + 1)});
}

}  // namespace tailcop
