/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace haarforge::rng {

// Philox4x32-10 (Salmon et al., SC 2011).  Counter-based: the word stream is
// a pure function of (key, counter), so any (seed, tag, stream) triple can be
// replayed independently of draw order elsewhere.  This is what makes
// parallel and serial runs produce identical samples.
namespace detail {

inline constexpr std::uint32_t kWeylA = 0x9E3779B9u;
inline constexpr std::uint32_t kWeylB = 0xBB67AE85u;
inline constexpr std::uint32_t kMulA = 0xD2511F53u;
inline constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::uint32_t k0,
                                             std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, k0, k1);
    k0 += kWeylA;
    k1 += kWeylB;
  }
  return ctr;
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

/// One independent random stream keyed by (master seed, module tag, stream
/// index).  Streams never share state; constructing the same triple twice
/// yields the same draws.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::string_view tag, std::uint64_t stream)
      : key0_(static_cast<std::uint32_t>(master_seed)),
        key1_(static_cast<std::uint32_t>(master_seed >> 32)) {
    const std::uint64_t th = detail::fnv1a(tag);
    lane2_ = static_cast<std::uint32_t>(stream) ^ static_cast<std::uint32_t>(th);
    lane3_ = static_cast<std::uint32_t>(stream >> 32) ^
             static_cast<std::uint32_t>(th >> 32);
  }

  std::uint32_t next_u32() {
    if (have_ == 0) refill();
    return block_[--have_];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the sine partner is cached.
  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
  }

  /// Draws exactly n <= 64 random bits (low bits of the result) and charges
  /// them against the bit budget.
  std::uint64_t bits(unsigned n) {
    std::uint64_t out = 0;
    unsigned got = 0;
    while (got < n) {
      if (bit_fill_ == 0) {
        bit_buffer_ = next_u32();
        bit_fill_ = 32;
      }
      const unsigned take = std::min(n - got, bit_fill_);
      out = (out << take) | (bit_buffer_ & ((take == 64 ? 0 : (1ull << take)) - 1));
      bit_buffer_ >>= take;
      bit_fill_ -= take;
      got += take;
    }
    bits_consumed_ += n;
    return out;
  }

  std::uint64_t bits_consumed() const { return bits_consumed_; }

 private:
  void refill() {
    block_ = detail::philox10(
        {static_cast<std::uint32_t>(block_index_),
         static_cast<std::uint32_t>(block_index_ >> 32), lane2_, lane3_},
        key0_, key1_);
    ++block_index_;
    have_ = 4;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t lane2_, lane3_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> block_{};
  unsigned have_ = 0;

  std::uint64_t bit_buffer_ = 0;
  unsigned bit_fill_ = 0;
  std::uint64_t bits_consumed_ = 0;

  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace haarforge::rng
