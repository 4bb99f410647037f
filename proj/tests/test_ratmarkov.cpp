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
#include <cmath>
#include <complex>

#include "haarforge/ratmarkov.hpp"

using namespace haarforge;
using ratmarkov::PoleSet;

TEST_CASE("bessel_j1 values") {
  CHECK(ratmarkov::bessel_j1(0.0) == 0.0);
  // Independent oracle: the standard library implementation.
  for (double x = 0.0; x <= 60.0; x += 0.0317) {
    CHECK(std::abs(ratmarkov::bessel_j1(x) - std::cyl_bessel_j(1.0, x)) <=
          tol::bessel_abs);
  }
  // First zero, located by sign change of our own evaluation.
  double lo = 3.0, hi = 4.5;
  REQUIRE(ratmarkov::bessel_j1(lo) * ratmarkov::bessel_j1(hi) < 0);
  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    if (ratmarkov::bessel_j1(lo) * ratmarkov::bessel_j1(mid) <= 0)
      hi = mid;
    else
      lo = mid;
  }
  CHECK(0.5 * (lo + hi) == Approx(3.8317059702).epsilon(1e-9));
}

TEST_CASE("bessel_j1 envelope bound") {
  for (double x : {1.0, 2.0, 5.0, 10.0, 50.0})
    CHECK(std::abs(ratmarkov::bessel_j1(x)) <= ratmarkov::bessel_j1_envelope(x));
}

TEST_CASE("calibrate_theta reproduces the zero list") {
  // Leading digits 1.915, 3.507, 5.086, 6.661.
  CHECK(std::floor(ratmarkov::calibrate_theta(1) * 1000) == 1915.0);
  CHECK(std::floor(ratmarkov::calibrate_theta(2) * 1000) == 3507.0);
  CHECK(std::floor(ratmarkov::calibrate_theta(3) * 1000) == 5086.0);
  CHECK(std::floor(ratmarkov::calibrate_theta(4) * 1000) == 6661.0);
  for (int k = 1; k <= 4; ++k)
    CHECK(std::abs(ratmarkov::bessel_j1(2 * ratmarkov::calibrate_theta(k))) <=
          1e-8);
  double prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double t = ratmarkov::calibrate_theta(k);
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("lambda_n closed forms") {
  SECTION("all zeros give n") {
    PoleSet p;
    p.a.assign(6, {0.0, 0.0});
    p.validate();
    for (double x : {-1.0, -0.3, 0.0, 0.9, 1.0})
      CHECK(ratmarkov::lambda_n(p, x) == Approx(3.0).margin(1e-12));
  }
  SECTION("real symmetric pair") {
    const double a = 0.4;
    PoleSet p;
    p.a = {{a, 0.0}, {-a, 0.0}};
    CHECK(ratmarkov::lambda_n(p, 0.0) ==
          Approx(std::sqrt(1.0 - a * a)).margin(1e-12));
  }
  SECTION("nonnegative on the interval for the stock pole sets") {
    for (int pp : {1, 2, 3}) {
      const PoleSet poles = ratmarkov::moment_pole_set(pp);
      for (double x = -1.0; x <= 1.0; x += 0.037)
        CHECK(ratmarkov::lambda_n(poles, x) >= 0.0);
    }
  }
}

TEST_CASE("cosine_fraction collapses to Chebyshev") {
  PoleSet p;
  p.a.assign(6, {0.0, 0.0});  // n = 3
  CHECK(ratmarkov::cosine_fraction(p, 0.5) == Approx(-1.0).margin(1e-12));
  for (double x = -1.0; x <= 1.0; x += 1e-3) {
    const double tn = std::cos(3.0 * std::acos(x));
    CHECK(std::abs(ratmarkov::cosine_fraction(p, x) - tn) <= 1e-10);
    CHECK(std::abs(ratmarkov::cosine_fraction(p, x)) <= 1.0);
  }
}

TEST_CASE("cosine_fraction sign changes count the degree") {
  const int p = 3;
  const PoleSet poles = ratmarkov::moment_pole_set(p);
  const int n = poles.half_count();
  REQUIRE(n == 4 * p * p);
  // Scan on an arccos-uniform grid: zeros cluster like Chebyshev nodes near
  // the endpoints, where a linear grid would skip them.
  int changes = 0;
  const int grid = 4000;
  double prev = ratmarkov::cosine_fraction(poles, std::cos(3.14159265358979 *
                                                           (1 - 0.5 / grid)));
  for (int i = grid - 1; i >= 1; --i) {
    const double x = std::cos(3.14159265358979 * (i - 0.5) / grid);
    const double cur = ratmarkov::cosine_fraction(poles, x);
    if (prev * cur < 0) ++changes;
    prev = cur;
  }
  CHECK(changes == n);
}

TEST_CASE("moment_pole_set structure") {
  SECTION("p = 1 degenerates to eight zeros") {
    const PoleSet p1 = ratmarkov::moment_pole_set(1);
    REQUIRE(p1.a.size() == 8);
    for (const auto& z : p1.a) CHECK(std::abs(z) == 0.0);
  }
  SECTION("p = 2 contains the first pole with multiplicity 2p") {
    const PoleSet p2 = ratmarkov::moment_pole_set(2);
    CHECK(p2.a.size() == 8 * 2 * 2);
    const double expected = std::sqrt(1.0 / (48.0 * std::pow(2.0, 3.5)));
    int count = 0;
    for (const auto& z : p2.a)
      if (std::abs(z - std::complex<double>(expected, 0)) < 1e-15) ++count;
    CHECK(count == 4);
    p2.validate();
  }
  SECTION("all members stay inside the unit disk") {
    for (int p : {1, 2, 3, 4, 5}) {
      for (const auto& z : ratmarkov::moment_pole_set(p).a)
        CHECK(std::abs(z) < 1.0);
    }
  }
}

TEST_CASE("lambda_n respects its envelope bound on a grid") {
  // sup over [-1,1] of lambda_n < 4p + 4p sqrt(2) (p-1); grid step 1e-3.
  for (int p : {2, 3, 4}) {
    const PoleSet poles = ratmarkov::moment_pole_set(p);
    const double bound = 4.0 * p + 4.0 * p * std::sqrt(2.0) * (p - 1);
    double sup = 0.0;
    for (double x = -1.0; x <= 1.0; x += 1e-3)
      sup = std::max(sup, ratmarkov::lambda_n(poles, x));
    CHECK(sup < bound);
  }
}

TEST_CASE("pole proximity and domain errors") {
  PoleSet p;
  p.a = {{0.5, 0.0}, {-0.5, 0.0}};
  CHECK_THROWS_AS(ratmarkov::lambda_n(p, 1.5), invalid_config);
  CHECK_THROWS_AS(ratmarkov::bessel_j1(-1.0), invalid_config);
  CHECK_THROWS_AS(ratmarkov::calibrate_theta(0), invalid_config);
  PoleSet bad;
  bad.a = {{0.3, 0.2}, {0.1, 0.0}};  // conjugate missing
  CHECK_THROWS_AS(bad.validate(), invalid_config);
}
