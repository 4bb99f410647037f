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
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "haarforge/constants.hpp"

namespace haarforge::ratmarkov {

using Complex = std::complex<double>;

namespace detail {

inline constexpr long double kPi = 3.14159265358979323846264338327950288L;

// Ascending series J1(x) = sum_m (-1)^m (x/2)^{2m+1} / (m! (m+1)!).
// Accumulated in extended precision; the largest term at x = 16 is ~1.7e5,
// which keeps the rounding floor below 1e-12 absolute.
inline long double j1_series(long double x) {
  const long double u = x / 2;
  const long double u2 = u * u;
  long double term = u;  // m = 0
  long double sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -u2 / (static_cast<long double>(m) * (m + 1));
    sum += term;
    if (std::abs(term) < 1e-22L * (1 + std::abs(sum)) && m > 4) break;
  }
  return sum;
}

// Hankel expansion J1(x) = sqrt(2/(pi x)) [cos(chi) P(x) - sin(chi) Q(x)],
// chi = x - 3 pi / 4.  The terms of P and Q are
//   A_m = prod_{j=1..m} (4 - (2j-1)^2) / (m! 8^m),
// P = sum_k (-1)^k A_{2k} x^{-2k}, Q = sum_k (-1)^k A_{2k+1} x^{-2k-1}.
// Both series are truncated at their smallest term; the remainder is bounded
// by the first omitted term.
inline long double j1_asymptotic(long double x) {
  long double p_sum = 1.0L;
  long double q_sum = 0.0L;
  long double a = 1.0L;  // A_m running product
  long double prev_abs = 1e30L;
  for (int m = 1; m <= 40; ++m) {
    const long double f = 4.0L - (2.0L * m - 1) * (2.0L * m - 1);
    a *= f / (8.0L * m);
    const long double term = a / std::pow(x, static_cast<long double>(m));
    if (std::abs(term) >= prev_abs) break;  // past the smallest term
    prev_abs = std::abs(term);
    const long double signed_term = ((m / 2) % 2 == 0 ? term : -term);
    if (m % 2 == 0)
      p_sum += signed_term;
    else
      q_sum += signed_term;
    if (std::abs(term) < 1e-20L) break;
  }
  const long double chi = x - 3.0L * kPi / 4.0L;
  return std::sqrt(2.0L / (kPi * x)) *
         (std::cos(chi) * p_sum - std::sin(chi) * q_sum);
}

}  // namespace detail

/// Bessel function of the first kind J1, absolute error <= 1e-12 for x >= 0.
inline double bessel_j1(double x) {
  if (!(x >= 0.0)) throw invalid_config("bessel_j1: x must be >= 0");
  const long double lx = x;
  // The series carries full precision to well past the crossover; the
  // asymptotic branch reaches 1e-13 absolute from x = 16 on.
  if (x < 16.0) return static_cast<double>(detail::j1_series(lx));
  return static_cast<double>(detail::j1_asymptotic(lx));
}

/// Envelope bound sqrt(22753 / (8192 pi x)), valid for x >= 1.
inline double bessel_j1_envelope(double x) {
  return std::sqrt(22753.0 / (8192.0 * 3.14159265358979323846 * x));
}

/// theta_k = (k-th positive zero of J1) / 2, so that J1(2 theta_k) = 0.
/// Bracketed bisection on (k pi, (k+1) pi).
inline double calibrate_theta(int k) {
  if (k < 1 || k > 20)
    throw invalid_config("calibrate_theta: k must be in [1, 20]");
  const double pi = 3.14159265358979323846;
  double lo = k * pi, hi = (k + 1) * pi;
  double flo = bessel_j1(lo);
  if (!(flo * bessel_j1(hi) < 0))
    throw numerical_failure("calibrate_theta: bracket does not straddle a zero");
  while (hi - lo > tol::theta_zero * 0.5) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = bessel_j1(mid);
    if (flo * fmid <= 0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.25 * (lo + hi);  // zero/2
}

/// Pole data for the rational Markov machinery: 2n entries, each real or in
/// conjugate pairs, all inside the unit disk.
struct PoleSet {
  std::vector<Complex> a;

  int half_count() const { return static_cast<int>(a.size()) / 2; }

  void validate() const {
    if (a.size() % 2 != 0)
      throw invalid_config("PoleSet: list length must be even (2n)");
    for (const Complex& z : a) {
      if (!(std::abs(z) < 1.0))
        throw invalid_config("PoleSet: all |a_k| must be < 1");
      if (std::abs(z.imag()) > 0) {
        bool found = false;
        for (const Complex& w : a)
          if (std::abs(w - std::conj(z)) <= 1e-12) {
            found = true;
            break;
          }
        if (!found)
          throw invalid_config("PoleSet: non-real pole missing its conjugate");
      }
    }
  }
};

/// lambda_n(x) = (1/2) sum_k sqrt(1 - a_k^2) / (1 + a_k x).  Conjugate pairs
/// cancel the imaginary part; any residual leak above 1e-12 is rejected.
inline double lambda_n(const PoleSet& poles, double x) {
  if (!(x >= -1.0 && x <= 1.0))
    throw invalid_config("lambda_n: x must lie in [-1, 1]");
  Complex sum = 0.0;
  double scale = 0.0;
  for (const Complex& a : poles.a) {
    const Complex den = 1.0 + a * x;
    if (std::abs(den) < tol::pole_proximity)
      throw numerical_failure("lambda_n: pole too close to evaluation point");
    const Complex term = std::sqrt(Complex(1.0) - a * a) / den;
    sum += term;
    scale += std::abs(term);
  }
  sum *= 0.5;
  if (std::abs(sum.imag()) > tol::imag_leak * std::max(1.0, scale))
    throw numerical_failure("lambda_n: imaginary residue did not cancel");
  return sum.real();
}

/// m_n(x) = cos((1/2) sum_k arccos((x + a_k) / (1 + a_k x))).  Collapses to
/// the Chebyshev polynomial T_n when all poles vanish.
inline double cosine_fraction(const PoleSet& poles, double x) {
  if (!(x >= -1.0 && x <= 1.0))
    throw invalid_config("cosine_fraction: x must lie in [-1, 1]");
  Complex acc = 0.0;
  for (const Complex& a : poles.a) {
    const Complex den = 1.0 + a * x;
    if (std::abs(den) < tol::pole_proximity)
      throw numerical_failure("cosine_fraction: pole too close to evaluation point");
    acc += std::acos((x + a) / den);
  }
  const Complex m = std::cos(0.5 * acc);
  if (std::abs(m.imag()) > 1e-9 * std::max(1.0, std::abs(m)))
    throw numerical_failure("cosine_fraction: imaginary residue did not cancel");
  // Clamp the cosine of a nearly-real angle back into [-1, 1].
  return std::clamp(m.real(), -1.0, 1.0);
}

/// The pole family used to control the trace-moment rational function:
/// +-sqrt(k/p') and +-i sqrt(k/p') for k = 1..p-1, each with multiplicity 2p,
/// padded with 8p zeros; p' = 48 p^{7/2}.  8p^2 entries in total.
inline PoleSet moment_pole_set(int p) {
  if (p < 1) throw invalid_config("moment_pole_set: p must be >= 1");
  const double p_prime = 48.0 * std::pow(static_cast<double>(p), 3.5);
  PoleSet out;
  out.a.reserve(static_cast<std::size_t>(8) * p * p);
  for (int k = 1; k <= p - 1; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / p_prime);
    for (int rep = 0; rep < 2 * p; ++rep) {
      out.a.emplace_back(b, 0.0);
      out.a.emplace_back(-b, 0.0);
      out.a.emplace_back(0.0, b);
      out.a.emplace_back(0.0, -b);
    }
  }
  for (int rep = 0; rep < 8 * p; ++rep) out.a.emplace_back(0.0, 0.0);
  return out;
}

}  // namespace haarforge::ratmarkov
