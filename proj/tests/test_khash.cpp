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

#include <catch2/catch.hpp>
#include <cstdint>
#include <map>
#include <vector>

#include "haarforge/ensembles.hpp"
#include "haarforge/khash.hpp"

using namespace haarforge;
using khash::Gf2Field;
using khash::HashFamilyMember;

namespace {

// Independent schoolbook oracle for GF(2^3) with modulus x^3 + x + 1:
// multiply as polynomials, then long-divide by the modulus.
std::uint64_t gf8_mul_oracle(std::uint64_t a, std::uint64_t b) {
  std::uint64_t prod = 0;
  for (int i = 0; i < 3; ++i)
    if ((a >> i) & 1) prod ^= b << i;
  for (int bit = 5; bit >= 3; --bit)
    if ((prod >> bit) & 1) prod ^= 0b1011ull << (bit - 3);
  return prod;
}

}  // namespace

TEST_CASE("field table pins the documented moduli") {
  CHECK(khash::reduction_poly(3) == 0x3);   // x^3 + x + 1
  CHECK(khash::reduction_poly(4) == 0x3);   // x^4 + x + 1
  CHECK(khash::reduction_poly(8) == 0x1b);  // x^8 + x^4 + x^3 + x + 1
  CHECK(khash::reduction_poly(32) == 0x8d);
  CHECK(khash::reduction_poly(64) == 0x1b);
}

TEST_CASE("GF(2^3) multiplication matches the schoolbook oracle") {
  const Gf2Field f(3);
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t b = 0; b < 8; ++b)
      CHECK(f.mul(a, b) == gf8_mul_oracle(a, b));
}

TEST_CASE("field axioms by full enumeration") {
  for (unsigned w : {3u, 4u}) {
    const Gf2Field f(w);
    const std::uint64_t size = 1ull << w;
    for (std::uint64_t a = 0; a < size; ++a) {
      for (std::uint64_t b = 0; b < size; ++b) {
        CHECK(f.mul(a, b) == f.mul(b, a));
        for (std::uint64_t c = 0; c < size; ++c) {
          REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          REQUIRE(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
        }
      }
    }
    // Nonzero elements form a group: a * x = 1 solvable.
    for (std::uint64_t a = 1; a < size; ++a) {
      bool has_inverse = false;
      for (std::uint64_t x = 1; x < size; ++x)
        if (f.mul(a, x) == 1) has_inverse = true;
      CHECK(has_inverse);
    }
  }
}

TEST_CASE("hash evaluation") {
  SECTION("k = 1 is the constant function") {
    HashFamilyMember h{1, 8, 8, {0x5a}};
    for (std::uint64_t x = 0; x < 256; ++x) CHECK(khash::hash_eval(h, x) == 0x5a);
  }
  SECTION("GF(2^3) worked example against the oracle") {
    HashFamilyMember h{2, 3, 3, {0b011, 0b101}};
    const std::uint64_t x = 0b010;
    const std::uint64_t expect = 0b011ull ^ gf8_mul_oracle(0b101, x);
    CHECK(khash::hash_eval(h, x) == expect);
  }
  SECTION("degree-1 polynomials are additive in characteristic 2") {
    rng::Stream s(17, "test.khash.lin", 0);
    const auto h = khash::sample_hash(2, 8, 8, s);
    for (std::uint64_t x = 0; x < 64; x += 7)
      for (std::uint64_t y = 0; y < 64; y += 5) {
        const std::uint64_t lhs = khash::hash_eval(h, x) ^ khash::hash_eval(h, y) ^
                                  khash::hash_eval(h, x ^ y) ^
                                  khash::hash_eval(h, 0);
        CHECK(lhs == 0);
      }
  }
}

TEST_CASE("sample_hash bit budget and determinism") {
  rng::Stream s(18, "test.khash.budget", 0);
  const auto before = s.bits_consumed();
  const auto h = khash::sample_hash(3, 16, 16, s);
  CHECK(s.bits_consumed() - before == 48);
  CHECK(h.coeffs.size() == 3);

  rng::Stream a(19, "test.khash.det", 4);
  rng::Stream b(19, "test.khash.det", 4);
  CHECK(khash::sample_hash(4, 8, 12, a).coeffs ==
        khash::sample_hash(4, 8, 12, b).coeffs);
}

TEST_CASE("exact k-wise uniformity on GF(2^3) by full enumeration") {
  // For every tuple of k distinct inputs, every output tuple must occur for
  // exactly one coefficient vector (polynomial interpolation is a bijection).
  for (unsigned k : {2u, 3u}) {
    const std::uint64_t field = 8;
    std::vector<std::vector<std::uint64_t>> input_tuples;
    std::vector<std::uint64_t> tuple(k);
    auto gen = [&](auto&& self, unsigned depth) -> void {
      if (depth == k) {
        input_tuples.push_back(tuple);
        return;
      }
      for (std::uint64_t x = 0; x < field; ++x) {
        bool used = false;
        for (unsigned i = 0; i < depth; ++i)
          if (tuple[i] == x) used = true;
        if (used) continue;
        tuple[depth] = x;
        self(self, depth + 1);
      }
    };
    gen(gen, 0);

    std::uint64_t coeff_count = 1;
    for (unsigned i = 0; i < k; ++i) coeff_count *= field;

    for (const auto& inputs : input_tuples) {
      std::map<std::vector<std::uint64_t>, int> histogram;
      for (std::uint64_t code = 0; code < coeff_count; ++code) {
        HashFamilyMember h{k, 3, 3, {}};
        std::uint64_t rest = code;
        for (unsigned i = 0; i < k; ++i) {
          h.coeffs.push_back(rest % field);
          rest /= field;
        }
        std::vector<std::uint64_t> outputs;
        for (std::uint64_t x : inputs) outputs.push_back(khash::hash_eval(h, x));
        ++histogram[outputs];
      }
      REQUIRE(histogram.size() == coeff_count);
      for (const auto& [outputs, count] : histogram) REQUIRE(count == 1);
    }
  }
}

TEST_CASE("hashed seed streams drive circuits deterministically") {
  HashFamilyMember h{3, 4, 64, {0x1234, 0x9876, 0x4242}};
  const auto seed = khash::hashed_seed_stream(h, 5);
  const auto a = ensembles::random_local_circuit(3, 40, seed);
  const auto b = ensembles::random_local_circuit(3, 40, seed);
  CHECK((a.mat() - b.mat()).norm() == 0.0);

  // Changing one coefficient changes at least one circuit seed.
  HashFamilyMember g = h;
  g.coeffs[1] ^= 1;
  bool changed = false;
  for (std::uint64_t j = 0; j < 16; ++j)
    if (khash::hashed_seed_stream(g, j) != khash::hashed_seed_stream(h, j))
      changed = true;
  CHECK(changed);
}

TEST_CASE("khash guards") {
  rng::Stream s(20, "test.khash.guards", 0);
  CHECK_THROWS_AS(khash::sample_hash(0, 8, 8, s), invalid_config);
  CHECK_THROWS_AS(khash::sample_hash(2, 65, 8, s), invalid_config);
  HashFamilyMember h{1, 3, 3, {1}};
  CHECK_THROWS_AS(khash::hash_eval(h, 9), invalid_config);
}
