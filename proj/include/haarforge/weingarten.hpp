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
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "haarforge/constants.hpp"
#include "haarforge/ensembles.hpp"

namespace haarforge::weingarten {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

/// Weakly decreasing positive parts.
using Partition = std::vector<int>;
/// A Partition read as the cycle lengths of a permutation.
using CycleType = Partition;

inline int weight(const Partition& p) {
  return std::accumulate(p.begin(), p.end(), 0);
}

/// All partitions of q in reverse-lexicographic order ((q) first, (1^q)
/// last), complete and duplicate-free.
inline std::vector<Partition> partitions(int q) {
  if (q < 1 || q > 12)
    throw unsupported_range("partitions: q must be in [1, 12]");
  std::vector<Partition> out;
  Partition cur;
  auto rec = [&](auto&& self, int rest, int max_part) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(rest, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, rest - part, part);
      cur.pop_back();
    }
  };
  rec(rec, q, q);
  return out;
}

namespace detail {

// Beta-set form of a partition: b_i = lambda_i + (len - 1 - i), strictly
// decreasing.  Removing a border strip of length r is moving one beta value
// down by r onto an unoccupied slot; the sign is (-1)^{values jumped over}.
inline std::vector<int> beta_set(const Partition& lambda) {
  const int len = static_cast<int>(lambda.size());
  std::vector<int> beta(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i)
    beta[static_cast<std::size_t>(i)] = lambda[static_cast<std::size_t>(i)] + (len - 1 - i);
  return beta;
}

inline long long mn_recurse(std::vector<int>& beta, const Partition& mu,
                            std::size_t mu_index) {
  if (mu_index == mu.size()) return 1;  // beta is now a bare staircase
  const int r = mu[mu_index];
  long long total = 0;
  const std::size_t len = beta.size();
  for (std::size_t i = 0; i < len; ++i) {
    const int from = beta[i];
    const int to = from - r;
    if (to < 0) continue;
    bool occupied = false;
    int jumped = 0;
    for (std::size_t j = 0; j < len; ++j) {
      if (j == i) continue;
      if (beta[j] == to) {
        occupied = true;
        break;
      }
      if (beta[j] > to && beta[j] < from) ++jumped;
    }
    if (occupied) continue;
    beta[i] = to;
    const long long sub = mn_recurse(beta, mu, mu_index + 1);
    beta[i] = from;
    total += (jumped % 2 == 0) ? sub : -sub;
  }
  return total;
}

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline std::uint64_t catalan(int n) {
  // Cat_n = C(2n, n) / (n + 1); exact in 64 bits for n <= 30.
  BigInt c = factorial(2 * n) / (factorial(n) * factorial(n) * (n + 1));
  return c.convert_to<std::uint64_t>();
}

}  // namespace detail

/// chi^lambda(mu) by the Murnaghan-Nakayama rule (border-strip recursion in
/// beta-set form).  Exact integer.
inline long long character(const Partition& lambda, const CycleType& mu) {
  if (weight(lambda) != weight(mu))
    throw invalid_config("character: |lambda| must equal |mu|");
  std::vector<int> beta = detail::beta_set(lambda);
  return detail::mn_recurse(beta, mu, 0);
}

/// Exact s_lambda(1^N) via the hook-content product
/// prod_{cells (i,j)} (N + j - i) / hook(i, j).
inline Rational schur_at_ones(const Partition& lambda, long n) {
  if (n < static_cast<long>(lambda.size()))
    throw invalid_config("schur_at_ones: N must be >= number of parts");
  // Conjugate partition for hook lengths.
  const int rows = static_cast<int>(lambda.size());
  const int cols = rows == 0 ? 0 : lambda[0];
  std::vector<int> conj(static_cast<std::size_t>(cols), 0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j)
      ++conj[static_cast<std::size_t>(j)];
  BigInt num = 1, den = 1;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < lambda[static_cast<std::size_t>(i)]; ++j) {
      num *= (n + j - i);
      den *= lambda[static_cast<std::size_t>(i)] - (j + 1) +
             conj[static_cast<std::size_t>(j)] - (i + 1) + 1;
    }
  }
  return Rational(num, den);
}

/// Exact s_lambda(1^N) via the pairwise product
/// prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i); used as a
/// cross-check of the hook-content route for moderate N.
inline Rational schur_at_ones_pairwise(const Partition& lambda, long n) {
  std::vector<long> lam(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < lambda.size(); ++i) lam[i] = lambda[i];
  BigInt num = 1, den = 1;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      num *= lam[static_cast<std::size_t>(i)] - lam[static_cast<std::size_t>(j)] + j - i;
      den *= j - i;
    }
  return Rational(num, den);
}

/// Exact Weingarten value in lowest terms.
struct WeingartenValue {
  BigInt num;
  BigInt den;  // > 0
  long n = 0;

  double to_double() const {
    return num.convert_to<double>() / den.convert_to<double>();
  }
  std::string str() const {
    return num.str() + "/" + den.str();
  }
};

/// Wg(pi, N) = (1/q!^2) sum_{lambda |- q} chi^lambda(1)^2 chi^lambda(pi)
///             / s_lambda(1^N), exact.
inline WeingartenValue weingarten(const CycleType& pi, long n) {
  const int q = weight(pi);
  if (q < 1 || q > 8)
    throw unsupported_range("weingarten: q must be in [1, 8]");
  if (n < q)
    throw unsupported_range("weingarten: N < q sits on Schur zeros");
  const CycleType identity(static_cast<std::size_t>(q), 1);
  Rational sum = 0;
  for (const Partition& lambda : partitions(q)) {
    const long long dim = character(lambda, identity);
    const long long chi = character(lambda, pi);
    if (chi == 0) continue;
    sum += Rational(BigInt(dim) * dim * chi) / schur_at_ones(lambda, n);
  }
  const BigInt qfac = detail::factorial(q);
  Rational wg = sum / Rational(qfac * qfac);
  WeingartenValue out;
  out.num = boost::multiprecision::numerator(wg);
  out.den = boost::multiprecision::denominator(wg);
  out.n = n;
  return out;
}

/// Leading asymptotics N^{-2q + cycles(pi)} prod_i (-1)^{|C_i|-1}
/// Cat_{|C_i|-1}.
inline double weingarten_leading(const CycleType& pi, double n) {
  const int q = weight(pi);
  const int cycles = static_cast<int>(pi.size());
  double coeff = 1.0;
  for (int c : pi) {
    const double cat = static_cast<double>(detail::catalan(c - 1));
    coeff *= ((c - 1) % 2 == 0) ? cat : -cat;
  }
  return coeff * std::pow(n, static_cast<double>(-2 * q + cycles));
}

namespace detail {

inline std::vector<std::vector<int>> all_permutations(int p) {
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline CycleType cycle_type(const std::vector<int>& perm) {
  const int p = static_cast<int>(perm.size());
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  CycleType type;
  for (int i = 0; i < p; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    int len = 0, j = i;
    while (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      j = perm[static_cast<std::size_t>(j)];
      ++len;
    }
    type.push_back(len);
  }
  std::sort(type.rbegin(), type.rend());
  return type;
}

}  // namespace detail

/// Exact Haar average E_U btr[(U D1 U^d D2)^p] by Weingarten contraction:
///
///   (1/N) sum_{sigma, tau in S(p)} Wg(sigma tau^{-1}, N)
///         prod_{cycles C of tau}       tr(D1^{|C|})
///         prod_{cycles C of gamma sigma} tr(D2^{|C|})
///
/// with gamma the full cycle t -> t+1 (mod p) coming from the trace wiring.
/// The bookkeeping is certified against closed forms (D = I, p = 1) and the
/// Monte-Carlo estimator below.
inline Complex haar_conjugation_moment_exact(
    const ensembles::DiagonalSpectrum& d1,
    const ensembles::DiagonalSpectrum& d2, int p, int n) {
  if (p < 1 || p > 6)
    throw unsupported_range("haar_conjugation_moment_exact: p must be in [1, 6]");
  if (n < p)
    throw unsupported_range("haar_conjugation_moment_exact: needs N >= p");
  if (d1.dim != n || d2.dim != n)
    throw invalid_dimension("haar_conjugation_moment_exact: dimension mismatch");

  std::vector<Complex> tr1(static_cast<std::size_t>(p) + 1),
      tr2(static_cast<std::size_t>(p) + 1);
  for (int k = 1; k <= p; ++k) {
    tr1[static_cast<std::size_t>(k)] = d1.trace_power(k);
    tr2[static_cast<std::size_t>(k)] = d2.trace_power(k);
  }

  const auto perms = detail::all_permutations(p);
  const std::size_t count = perms.size();

  // Wg by cycle type, converted to double once.
  std::map<CycleType, double> wg_cache;
  for (const Partition& pt : partitions(p))
    wg_cache[pt] = weingarten(pt, n).to_double();

  // Per-tau product of D1 traces over cycles of tau.
  std::vector<Complex> tau_factor(count), sigma_factor(count);
  std::vector<std::vector<int>> inverses(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto& perm = perms[idx];
    Complex f1 = 1.0;
    for (int c : detail::cycle_type(perm)) f1 *= tr1[static_cast<std::size_t>(c)];
    tau_factor[idx] = f1;
    // gamma o sigma with gamma(t) = t + 1 mod p.
    std::vector<int> gs(perm.size());
    for (int t = 0; t < p; ++t)
      gs[static_cast<std::size_t>(t)] = (perm[static_cast<std::size_t>(t)] + 1) % p;
    Complex f2 = 1.0;
    for (int c : detail::cycle_type(gs)) f2 *= tr2[static_cast<std::size_t>(c)];
    sigma_factor[idx] = f2;
    std::vector<int> inv(perm.size());
    for (int t = 0; t < p; ++t) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])] = t;
    inverses[idx] = inv;
  }

  Complex total = 0.0;
  std::vector<int> prod(static_cast<std::size_t>(p));
  for (std::size_t si = 0; si < count; ++si) {
    const auto& sigma = perms[si];
    for (std::size_t ti = 0; ti < count; ++ti) {
      const auto& tau_inv = inverses[ti];
      for (int t = 0; t < p; ++t)
        prod[static_cast<std::size_t>(t)] = sigma[static_cast<std::size_t>(tau_inv[static_cast<std::size_t>(t)])];
      total += wg_cache[detail::cycle_type(prod)] * tau_factor[ti] * sigma_factor[si];
    }
  }
  return total / static_cast<double>(n);
}

/// Monte-Carlo oracle for the exact contraction: sample mean and standard
/// error of btr[(U D1 U^d D2)^p] over Haar U.
inline std::pair<Complex, double> haar_conjugation_moment_mc(
    const ensembles::DiagonalSpectrum& d1,
    const ensembles::DiagonalSpectrum& d2, int p, long samples,
    std::uint64_t seed) {
  if (d1.dim != d2.dim)
    throw invalid_dimension("haar_conjugation_moment_mc: dimension mismatch");
  const int n = d1.dim;
  Eigen::VectorXcd diag1(n), diag2(n);
  for (int i = 0; i < n; ++i) {
    diag1(i) = d1.kind == ensembles::DiagonalSpectrum::Kind::phase
                   ? std::polar(1.0, d1.values[static_cast<std::size_t>(i)])
                   : Complex(d1.values[static_cast<std::size_t>(i)], 0.0);
    diag2(i) = d2.kind == ensembles::DiagonalSpectrum::Kind::phase
                   ? std::polar(1.0, d2.values[static_cast<std::size_t>(i)])
                   : Complex(d2.values[static_cast<std::size_t>(i)], 0.0);
  }
  // Welford updates avoid the cancellation that would otherwise swamp the
  // stderr of near-constant statistics.
  Complex mean = 0.0;
  double m2_re = 0.0, m2_im = 0.0;
  for (long s = 0; s < samples; ++s) {
    rng::Stream stream(seed, "weingarten.mc", static_cast<std::uint64_t>(s));
    const Eigen::MatrixXcd u = ensembles::sample_haar(n, stream).mat();
    Eigen::MatrixXcd m = u * diag1.asDiagonal() * u.adjoint() * diag2.asDiagonal();
    Eigen::MatrixXcd power = m;
    for (int k = 1; k < p; ++k) power = power * m;
    const Complex v = power.trace() / static_cast<double>(n);
    const Complex delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    const Complex delta2 = v - mean;
    m2_re += delta.real() * delta2.real();
    m2_im += delta.imag() * delta2.imag();
  }
  const double stderr_v =
      samples > 1 ? std::sqrt((m2_re + m2_im) /
                              (static_cast<double>(samples - 1) *
                               static_cast<double>(samples)))
                  : 0.0;
  return {mean, stderr_v};
}

}  // namespace haarforge::weingarten
