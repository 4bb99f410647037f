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

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "haarforge/constants.hpp"
#include "haarforge/rng.hpp"

namespace haarforge::khash {

// Reduction polynomials for GF(2^w), w = 1..64, stored as the bits below
// x^w.  Entry w-1 is the numerically smallest odd value making
// x^w + poly(entry) irreducible over GF(2); the table reproduces the classic
// published choices (x^3+x+1, x^8+x^4+x^3+x+1, x^32+x^7+x^3+x^2+1, ...).
inline constexpr std::array<std::uint64_t, 64> kReductionTable = {
    0x1ull,  0x3ull,  0x3ull,  0x3ull,  0x5ull,  0x3ull,  0x3ull,  0x1bull,
    0x3ull,  0x9ull,  0x5ull,  0x9ull,  0x1bull, 0x21ull, 0x3ull,  0x2bull,
    0x9ull,  0x9ull,  0x27ull, 0x9ull,  0x5ull,  0x3ull,  0x21ull, 0x1bull,
    0x9ull,  0x1bull, 0x27ull, 0x3ull,  0x5ull,  0x3ull,  0x9ull,  0x8dull,
    0x4bull, 0x1bull, 0x5ull,  0x35ull, 0x3full, 0x63ull, 0x11ull, 0x39ull,
    0x9ull,  0x27ull, 0x59ull, 0x21ull, 0x1bull, 0x3ull,  0x21ull, 0x2dull,
    0x71ull, 0x1dull, 0x4bull, 0x9ull,  0x47ull, 0x7dull, 0x47ull, 0x95ull,
    0x11ull, 0x63ull, 0x7bull, 0x3ull,  0x27ull, 0x69ull, 0x3ull,  0x1bull,
};

inline std::uint64_t reduction_poly(unsigned width) {
  if (width < 1 || width > 64)
    throw invalid_config("khash: field width must be in [1, 64]");
  return kReductionTable[width - 1];
}

/// Binary field GF(2^w) with the fixed modulus from the table above.
/// Addition is xor; multiplication is shift-and-xor with modular reduction.
class Gf2Field {
 public:
  explicit Gf2Field(unsigned width)
      : width_(width),
        reduction_(reduction_poly(width)),
        mask_(width == 64 ? ~0ull : (1ull << width) - 1) {}

  unsigned width() const { return width_; }
  std::uint64_t mask() const { return mask_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return a ^ b; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    a &= mask_;
    b &= mask_;
    std::uint64_t r = 0;
    const std::uint64_t top = width_ == 64 ? (1ull << 63) : (1ull << (width_ - 1));
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      const bool carry = (a & top) != 0;
      a = (a << 1) & mask_;
      if (carry) a ^= reduction_;
    }
    return r;
  }

 private:
  unsigned width_;
  std::uint64_t reduction_;
  std::uint64_t mask_;
};

/// One member h(x) = a_0 + a_1 x + ... + a_{k-1} x^{k-1} of the k-wise
/// independent polynomial family over GF(2^max(w_in, w_out)).
struct HashFamilyMember {
  unsigned k = 0;
  unsigned w_in = 0;
  unsigned w_out = 0;
  std::vector<std::uint64_t> coeffs;  // exactly k field elements

  unsigned field_width() const { return std::max(w_in, w_out); }
};

/// Draws a uniformly random family member.  Consumes exactly
/// k * max(w_in, w_out) random bits.
inline HashFamilyMember sample_hash(unsigned k, unsigned w_in, unsigned w_out,
                                    rng::Stream& stream) {
  if (k < 1) throw invalid_config("sample_hash: k must be >= 1");
  if (w_in < 1 || w_in > 64 || w_out < 1 || w_out > 64)
    throw invalid_config("sample_hash: widths must be in [1, 64]");
  HashFamilyMember h{k, w_in, w_out, {}};
  const unsigned w = h.field_width();
  h.coeffs.reserve(k);
  for (unsigned i = 0; i < k; ++i) h.coeffs.push_back(stream.bits(w));
  return h;
}

/// Horner evaluation, O(k) field multiplications; the result keeps the low
/// w_out bits of the field element.
inline std::uint64_t hash_eval(const HashFamilyMember& h, std::uint64_t x) {
  if (h.w_in < 64 && (x >> h.w_in) != 0)
    throw invalid_config("hash_eval: input does not fit w_in bits");
  const Gf2Field field(h.field_width());
  std::uint64_t acc = 0;
  for (std::size_t i = h.coeffs.size(); i-- > 0;)
    acc = field.add(field.mul(acc, x), h.coeffs[i]);
  const std::uint64_t out_mask =
      h.w_out == 64 ? ~0ull : (1ull << h.w_out) - 1;
  return acc & out_mask;
}

/// Seed material for a hashed circuit: the hash value itself keys the gate
/// stream of random_local_circuit, so a fixed (h, j) always reproduces the
/// same circuit and any k distinct j give k-wise independent seeds.
inline std::uint64_t hashed_seed_stream(const HashFamilyMember& h,
                                        std::uint64_t j) {
  return hash_eval(h, j);
}

}  // namespace haarforge::khash
