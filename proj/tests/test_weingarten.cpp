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
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <vector>

#include "haarforge/weingarten.hpp"

using namespace haarforge;
using weingarten::BigInt;
using weingarten::CycleType;
using weingarten::Partition;
using weingarten::Rational;
using Complex = std::complex<double>;

namespace {

BigInt factorial_big(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Hook-length dimension formula: chi^lambda(1^q) = q! / prod hooks.
long long hook_dimension(const Partition& lambda) {
  const int rows = static_cast<int>(lambda.size());
  std::vector<int> conj(static_cast<std::size_t>(lambda.empty() ? 0 : lambda[0]), 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j) ++conj[static_cast<std::size_t>(j)];
  BigInt hooks = 1;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j)
      hooks *= lambda[static_cast<std::size_t>(i)] - (j + 1) +
               conj[static_cast<std::size_t>(j)] - (i + 1) + 1;
  const BigInt dim = factorial_big(weingarten::weight(lambda)) / hooks;
  return dim.convert_to<long long>();
}

BigInt class_size(const CycleType& mu) {
  // |class| = q! / (prod_k k^{m_k} m_k!), m_k = multiplicity of part k.
  std::map<int, int> mult;
  for (int part : mu) ++mult[part];
  BigInt z = 1;
  for (const auto& [part, m] : mult) {
    for (int i = 0; i < m; ++i) z *= part;
    z *= factorial_big(m);
  }
  return factorial_big(weingarten::weight(mu)) / z;
}

}  // namespace

TEST_CASE("partitions enumeration") {
  CHECK(weingarten::partitions(1).size() == 1);
  CHECK(weingarten::partitions(4).size() == 5);
  CHECK(weingarten::partitions(6).size() == 11);
  const auto p4 = weingarten::partitions(4);
  CHECK(p4.front() == Partition{4});
  CHECK(p4.back() == Partition{1, 1, 1, 1});
  // Reverse-lexicographic, no duplicates.
  for (std::size_t i = 1; i < p4.size(); ++i) CHECK(p4[i - 1] > p4[i]);
}

TEST_CASE("characters by the Murnaghan-Nakayama rule") {
  SECTION("trivial representation") {
    for (const auto& mu : weingarten::partitions(5))
      CHECK(weingarten::character({5}, mu) == 1);
  }
  SECTION("sign representation on a 3-cycle") {
    CHECK(weingarten::character({1, 1, 1}, {3}) == 1);
  }
  SECTION("standard representation of S(3)") {
    CHECK(weingarten::character({2, 1}, {1, 1, 1}) == 2);
    CHECK(weingarten::character({2, 1}, {3}) == -1);
    // Brute-force oracle: the standard character is (#fixed points) - 1.
    CHECK(weingarten::character({2, 1}, {2, 1}) == 1 - 1);
  }
  SECTION("dimensions match the hook-length formula") {
    for (int q = 1; q <= 8; ++q) {
      const CycleType identity(static_cast<std::size_t>(q), 1);
      for (const auto& lambda : weingarten::partitions(q))
        CHECK(weingarten::character(lambda, identity) == hook_dimension(lambda));
    }
  }
  SECTION("column orthogonality, exact") {
    for (int q = 1; q <= 6; ++q) {
      const BigInt qfac = factorial_big(q);
      for (const auto& mu : weingarten::partitions(q)) {
        BigInt sum = 0;
        for (const auto& lambda : weingarten::partitions(q)) {
          const long long chi = weingarten::character(lambda, mu);
          sum += BigInt(chi) * chi;
        }
        CHECK(sum * class_size(mu) == qfac);
      }
    }
  }
}

TEST_CASE("schur_at_ones") {
  CHECK(weingarten::schur_at_ones({1}, 9) == Rational(9));
  CHECK(weingarten::schur_at_ones({2}, 7) == Rational(7 * 8, 2));
  CHECK(weingarten::schur_at_ones({1, 1}, 7) == Rational(7 * 6, 2));
  SECTION("hook-content equals the pairwise product") {
    for (int q = 1; q <= 5; ++q)
      for (const auto& lambda : weingarten::partitions(q))
        for (long n = static_cast<long>(lambda.size()); n <= 12; ++n)
          CHECK(weingarten::schur_at_ones(lambda, n) ==
                weingarten::schur_at_ones_pairwise(lambda, n));
  }
}

TEST_CASE("weingarten exact values") {
  SECTION("q = 1") {
    for (long n : {1L, 2L, 7L, 100L}) {
      const auto wg = weingarten::weingarten({1}, n);
      CHECK(wg.num == 1);
      CHECK(wg.den == n);
    }
  }
  SECTION("q = 2 closed forms") {
    for (long n : {5L, 8L, 16L}) {
      const auto id2 = weingarten::weingarten({1, 1}, n);
      CHECK(id2.num == 1);
      CHECK(id2.den == n * n - 1);
      const auto swap2 = weingarten::weingarten({2}, n);
      CHECK(swap2.num == -1);
      CHECK(swap2.den == n * (n * n - 1));
    }
  }
  SECTION("Gram inversion identity for q <= 4") {
    using weingarten::detail::all_permutations;
    using weingarten::detail::cycle_type;
    for (int q = 2; q <= 4; ++q) {
      for (long n : {static_cast<long>(q), static_cast<long>(q) + 1, 8L}) {
        const auto perms = all_permutations(q);
        const std::size_t sz = perms.size();
        std::map<CycleType, Rational> wg;
        for (const auto& pt : weingarten::partitions(q)) {
          const auto v = weingarten::weingarten(pt, n);
          wg[pt] = Rational(v.num, v.den);
        }
        std::vector<std::vector<int>> inv(sz);
        for (std::size_t i = 0; i < sz; ++i) {
          inv[i].resize(static_cast<std::size_t>(q));
          for (int t = 0; t < q; ++t)
            inv[i][static_cast<std::size_t>(perms[i][static_cast<std::size_t>(t)])] = t;
        }
        auto type_of_product = [&](std::size_t a, std::size_t b) {
          std::vector<int> prod(static_cast<std::size_t>(q));
          for (int t = 0; t < q; ++t)
            prod[static_cast<std::size_t>(t)] =
                perms[a][static_cast<std::size_t>(inv[b][static_cast<std::size_t>(t)])];
          return cycle_type(prod);
        };
        // [Wg(sigma tau^{-1})] [N^{cycles(tau rho^{-1})}] == identity.
        for (std::size_t a = 0; a < sz; ++a) {
          for (std::size_t c = 0; c < sz; ++c) {
            Rational sum = 0;
            for (std::size_t b = 0; b < sz; ++b) {
              const auto left = type_of_product(a, b);
              const auto right = type_of_product(b, c);
              BigInt npow = 1;
              for (std::size_t i = 0; i < right.size(); ++i) npow *= n;
              sum += wg[left] * Rational(npow);
            }
            CHECK(sum == (a == c ? Rational(1) : Rational(0)));
          }
        }
      }
    }
  }
}

TEST_CASE("weingarten_leading") {
  SECTION("identity cycle type") {
    for (int q = 1; q <= 5; ++q) {
      const CycleType identity(static_cast<std::size_t>(q), 1);
      CHECK(weingarten::weingarten_leading(identity, 10.0) ==
            Approx(std::pow(10.0, -q)));
    }
  }
  SECTION("transposition") {
    CHECK(weingarten::weingarten_leading({2}, 10.0) == Approx(-1e-3));
  }
  SECTION("asymptotic error bound at q = 3, exact rationals") {
    const long n = 1000000;
    for (const auto& pt : weingarten::partitions(3)) {
      const auto wg = weingarten::weingarten(pt, n);
      const Rational exact(wg.num, wg.den);
      // Leading term as an exact rational: coeff / N^{2q - cycles}.
      BigInt coeff = 1;
      bool negative = false;
      for (int c : pt) {
        const auto cat = static_cast<long long>(weingarten::detail::catalan(c - 1));
        coeff *= cat;
        if ((c - 1) % 2 == 1) negative = !negative;
      }
      BigInt denom = 1;
      const int power = 2 * 3 - static_cast<int>(pt.size());
      for (int i = 0; i < power; ++i) denom *= n;
      Rational leading(coeff, denom);
      if (negative) leading = -leading;
      Rational diff = exact - leading;
      if (diff < 0) diff = -diff;
      // The correction coefficient for the 3-cycle is exactly 10(1 + O(1/N^2))
      // and approaches 10 from above, so the envelope needs headroom.
      BigInt denom2 = denom * n * n;
      CHECK(diff <= Rational(BigInt(11), denom2));
    }
  }
}

TEST_CASE("haar conjugation moments") {
  using ensembles::DiagonalSpectrum;
  auto phase_diag = [](int n, std::uint64_t stream) {
    DiagonalSpectrum d;
    d.dim = n;
    d.kind = DiagonalSpectrum::Kind::phase;
    rng::Stream s(55, "test.weingarten.diag", stream);
    for (int i = 0; i < n; ++i)
      d.values.push_back(2 * 3.14159265358979323846 * s.uniform());
    return d;
  };

  SECTION("identity diagonals give one") {
    DiagonalSpectrum id;
    id.dim = 6;
    id.kind = DiagonalSpectrum::Kind::phase;
    id.values.assign(6, 0.0);
    for (int p = 1; p <= 4; ++p)
      CHECK(std::abs(weingarten::haar_conjugation_moment_exact(id, id, p, 6) -
                     Complex(1, 0)) <= 1e-8);
  }
  SECTION("p = 1 closed form") {
    const auto d1 = phase_diag(8, 1);
    const auto d2 = phase_diag(8, 2);
    const Complex expect =
        d1.normalized_trace_power(1) * d2.normalized_trace_power(1);
    CHECK(std::abs(weingarten::haar_conjugation_moment_exact(d1, d2, 1, 8) -
                   expect) <= 1e-12);
  }
  SECTION("invariance under relabeling of the diagonal") {
    auto d1 = phase_diag(8, 3);
    const auto d2 = phase_diag(8, 4);
    const Complex before = weingarten::haar_conjugation_moment_exact(d1, d2, 3, 8);
    std::rotate(d1.values.begin(), d1.values.begin() + 3, d1.values.end());
    std::swap(d1.values[0], d1.values[5]);
    const Complex after = weingarten::haar_conjugation_moment_exact(d1, d2, 3, 8);
    CHECK(before == after);
  }
  SECTION("matches the Monte-Carlo oracle at p = 2", "[mc]") {
    const auto d1 = phase_diag(8, 5);
    const auto d2 = phase_diag(8, 6);
    const Complex exact = weingarten::haar_conjugation_moment_exact(d1, d2, 2, 8);
    const auto [mean, err] =
        weingarten::haar_conjugation_moment_mc(d1, d2, 2, 20000, 42);
    CHECK(std::abs(mean - exact) <= 4 * err);
  }
  SECTION("mc oracle on identity diagonals") {
    DiagonalSpectrum id;
    id.dim = 5;
    id.kind = DiagonalSpectrum::Kind::phase;
    id.values.assign(5, 0.0);
    const auto [mean, err] = weingarten::haar_conjugation_moment_mc(id, id, 2, 50, 7);
    CHECK(std::abs(mean - Complex(1, 0)) <= 1e-10);
    CHECK(err <= 1e-10);
  }
  SECTION("range guards") {
    const auto d = phase_diag(4, 7);
    CHECK_THROWS_AS(weingarten::haar_conjugation_moment_exact(d, d, 7, 4),
                    unsupported_range);
    CHECK_THROWS_AS(weingarten::weingarten({3}, 2), unsupported_range);
    CHECK_THROWS_AS(weingarten::partitions(13), unsupported_range);
  }
}
