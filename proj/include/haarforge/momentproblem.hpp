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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "haarforge/constants.hpp"
#include "haarforge/matrixcore.hpp"

namespace haarforge::momentproblem {

using matrixcore::Complex;
using matrixcore::ComplexMatrix;

inline constexpr double kPi = 3.14159265358979323846;

/// Target moments alpha_1..alpha_T (alpha_0 = 1 implicitly).
struct MomentVector {
  std::vector<Complex> alpha;

  int order() const { return static_cast<int>(alpha.size()); }

  double l1() const {
    double s = 0;
    for (const Complex& a : alpha) s += std::abs(a);
    return s;
  }

  double l2() const {
    double s = 0;
    for (const Complex& a : alpha) s += std::norm(a);
    return std::sqrt(s);
  }
};

/// Weighted point masses on the unit circle.
struct AtomicMeasure {
  struct Atom {
    double angle;   // [0, 2pi)
    double weight;  // >= 0 up to 1e-12 slack
  };
  std::vector<Atom> atoms;
  std::optional<long> integral_base;  // N when every weight is a multiple of 1/N

  Complex moment(int k) const {
    Complex s = 0.0;
    for (const Atom& a : atoms) s += a.weight * std::polar(1.0, k * a.angle);
    return s;
  }

  void validate() const {
    double total = 0;
    for (const Atom& a : atoms) {
      if (a.weight < -tol::weight_negativity)
        throw invalid_config("AtomicMeasure: negative weight");
      total += a.weight;
    }
    if (std::abs(total - 1.0) > tol::weight_sum)
      throw invalid_config("AtomicMeasure: weights must sum to 1");
    if (integral_base) {
      for (const Atom& a : atoms) {
        const double scaled = a.weight * static_cast<double>(*integral_base);
        if (std::abs(scaled - std::round(scaled)) > tol::integral_weight)
          throw invalid_config("AtomicMeasure: weight not a multiple of 1/N");
      }
    }
  }
};

/// (T+1)x(T+1) Toeplitz matrix with entry (j,k) = alpha_{k-j}, alpha_0 = 1,
/// alpha_{-l} = conj(alpha_l).
inline matrixcore::HermitianMatrix toeplitz_moment_matrix(
    const MomentVector& mv) {
  const int t = mv.order();
  ComplexMatrix h(t + 1, t + 1);
  for (int j = 0; j <= t; ++j) {
    h(j, j) = 1.0;
    for (int k = j + 1; k <= t; ++k) {
      const Complex a = mv.alpha[static_cast<std::size_t>(k - j - 1)];
      h(j, k) = a;
      h(k, j) = std::conj(a);
    }
  }
  return matrixcore::HermitianMatrix(std::move(h));
}

namespace detail {

inline std::vector<Complex> roots_of_monic(const Eigen::VectorXcd& coeffs) {
  // coeffs holds c_0..c_{d-1} of z^d + c_{d-1} z^{d-1} + ... + c_0.
  const int d = static_cast<int>(coeffs.size());
  ComplexMatrix companion = ComplexMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs(i);
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw numerical_failure("atomic_solve: companion eigensolver failed");
  std::vector<Complex> roots(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

inline AtomicMeasure measure_from_roots(std::vector<Complex> roots,
                                        const MomentVector& target) {
  const int t = target.order();
  // Keep unit-modulus candidates; snap them onto the circle.
  std::vector<double> angles;
  for (Complex z : roots) {
    const double m = std::abs(z);
    if (m < 0.5 || m > 2.0) continue;
    double a = std::arg(z);
    if (a < 0) a += 2 * kPi;
    angles.push_back(a);
  }
  if (angles.empty()) throw numerical_failure("atomic_solve: no unit-circle roots");
  std::sort(angles.begin(), angles.end());

  const int p = static_cast<int>(angles.size());
  ComplexMatrix vander(t + 1, p);
  Eigen::VectorXcd rhs(t + 1);
  rhs(0) = 1.0;
  for (int k = 1; k <= t; ++k) rhs(k) = target.alpha[static_cast<std::size_t>(k - 1)];
  for (int j = 0; j < p; ++j)
    for (int k = 0; k <= t; ++k)
      vander(k, j) = std::polar(1.0, k * angles[static_cast<std::size_t>(j)]);
  const Eigen::VectorXcd w = vander.colPivHouseholderQr().solve(rhs);

  AtomicMeasure out;
  for (int j = 0; j < p; ++j) {
    const Complex wj = w(j);
    if (std::abs(wj.imag()) > 1e-8)
      throw numerical_failure("atomic_solve: weight came out non-real");
    if (wj.real() < -tol::weight_negativity)
      throw numerical_failure("atomic_solve: weight came out negative");
    if (wj.real() <= 1e-14) continue;  // numerically absent atom
    out.atoms.push_back({angles[static_cast<std::size_t>(j)], wj.real()});
  }
  // Residual gate: never return an unverified measure.
  for (int k = 1; k <= t; ++k) {
    if (std::abs(out.moment(k) - rhs(k)) > tol::moment_internal)
      throw numerical_failure("atomic_solve: residual above tolerance");
  }
  double total = 0;
  for (const auto& a : out.atoms) total += a.weight;
  if (std::abs(total - 1.0) > 1e-9)
    throw numerical_failure("atomic_solve: weights do not sum to 1");
  // Renormalize the float dust so the measure invariant holds exactly.
  for (auto& a : out.atoms) a.weight /= total;
  return out;
}

}  // namespace detail

/// Solves the truncated trigonometric moment problem: finds at most 2T+1
/// weighted atoms on the circle reproducing beta within 1e-10 per moment.
///
/// Construction: extend the Toeplitz matrix by one order, choosing the new
/// moment on the boundary of its admissible disk so the extension is
/// singular PSD; the monic null-vector polynomial has the atoms as roots and
/// a Vandermonde solve recovers the weights.
inline AtomicMeasure atomic_solve(const MomentVector& beta) {
  const int t = beta.order();
  if (t == 0) {
    AtomicMeasure out;
    out.atoms.push_back({0.0, 1.0});
    return out;
  }
  const matrixcore::HermitianMatrix h_full = toeplitz_moment_matrix(beta);
  const ComplexMatrix& h = h_full.mat();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw numerical_failure("atomic_solve: Toeplitz eigensolver failed");
  const double min_eig = es.eigenvalues()(0);
  if (min_eig < -tol::psd_slack)
    throw infeasible_moment("atomic_solve: moment matrix is not PSD");

  if (min_eig <= tol::psd_slack) {
    // Singular case: the null vector of H_T itself already annihilates the
    // measure's support.
    Eigen::VectorXcd v = es.eigenvectors().col(0);
    int top = t;
    while (top > 0 && std::abs(v(top)) < 1e-10) --top;
    if (top == 0) throw numerical_failure("atomic_solve: degenerate null vector");
    Eigen::VectorXcd monic = v.head(top).eval() / v(top);
    return detail::measure_from_roots(detail::roots_of_monic(monic), beta);
  }

  // Positive definite case: boundary extension.
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(t + 1);
  for (int j = 1; j <= t; ++j) b(j) = beta.alpha[static_cast<std::size_t>(t - j)];
  Eigen::LDLT<ComplexMatrix> ldlt(h);
  const Eigen::VectorXcd hb = ldlt.solve(b);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(t + 1);
  e0(0) = 1.0;
  const Eigen::VectorXcd he0 = ldlt.solve(e0);
  const double g = he0(0).real();                  // (H^{-1})_00 > 0
  const Complex u = hb(0);                         // e0^d H^{-1} b
  const double bquad = b.dot(hb).real();           // b^d H^{-1} b
  const double radius_sq = (1.0 - bquad + std::norm(u) / g) / g;
  const double radius = radius_sq > 0 ? std::sqrt(radius_sq) : 0.0;
  // Either boundary point of the admissible disk makes the extension
  // singular PSD; the negative-real side reproduces the symmetric two-atom
  // solution for real targets.

  const Complex c = -u / g - radius;

  Eigen::VectorXcd w = b;
  w(0) = c;
  const Eigen::VectorXcd hw = ldlt.solve(w);
  Eigen::VectorXcd monic(t + 1);
  for (int j = 0; j <= t; ++j) monic(j) = -hw(j);
  return detail::measure_from_roots(detail::roots_of_monic(monic), beta);
}

namespace detail {

// Damped Gauss-Newton for one block: n angles, targets alpha_1..alpha_T in
// the frame already rotated by `offset`.  Starts from the equispaced grid;
// steps are minimal-norm solutions of the underdetermined 2T x n system with
// a Levenberg fallback.  Returns angles in the original frame.
inline std::vector<double> solve_block(int n, const std::vector<Complex>& alpha,
                                       double offset) {
  const int t = static_cast<int>(alpha.size());
  std::vector<Complex> beta(alpha.size());
  for (int k = 1; k <= t; ++k)
    beta[static_cast<std::size_t>(k - 1)] =
        alpha[static_cast<std::size_t>(k - 1)] * std::polar(1.0, -k * offset);

  Eigen::VectorXd theta(n);
  for (int l = 0; l < n; ++l) theta(l) = 2.0 * kPi * (l + 1) / n;

  auto residual = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd f(2 * t);
    for (int k = 1; k <= t; ++k) {
      Complex s = 0.0;
      for (int l = 0; l < n; ++l) s += std::polar(1.0, k * th(l));
      s /= static_cast<double>(n);
      s -= beta[static_cast<std::size_t>(k - 1)];
      f(2 * k - 2) = s.real();
      f(2 * k - 1) = s.imag();
    }
    return f;
  };

  Eigen::VectorXd f = residual(theta);
  double mu = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    if (f.lpNorm<Eigen::Infinity>() <= 1e-12) break;
    Eigen::MatrixXd jac(2 * t, n);
    for (int k = 1; k <= t; ++k)
      for (int l = 0; l < n; ++l) {
        const double a = k * theta(l);
        jac(2 * k - 2, l) = -k * std::sin(a) / n;
        jac(2 * k - 1, l) = k * std::cos(a) / n;
      }
    // Minimal-norm step: d = J^T (J J^T + mu I)^{-1} (-f).
    Eigen::MatrixXd gram = jac * jac.transpose();
    bool accepted = false;
    for (int boost = 0; boost < 8 && !accepted; ++boost) {
      Eigen::MatrixXd damped = gram;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd y = damped.ldlt().solve(-f);
      Eigen::VectorXd step = jac.transpose() * y;
      double scale = 1.0;
      for (int halving = 0; halving <= 20; ++halving) {
        const Eigen::VectorXd cand = theta + scale * step;
        const Eigen::VectorXd fc = residual(cand);
        if (fc.norm() < f.norm()) {
          theta = cand;
          f = fc;
          accepted = true;
          mu *= 0.25;
          break;
        }
        scale *= 0.5;
      }
      if (!accepted) mu = mu == 0.0 ? 1e-8 : mu * 16.0;
    }
    if (!accepted)
      throw numerical_failure(
          "near_origin_solve: damped Newton failed to reduce the residual");
  }
  if (f.lpNorm<Eigen::Infinity>() > 1e-11)
    throw numerical_failure(
        "near_origin_solve: no convergence within the iteration cap");

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    double a = std::fmod(theta(l) + offset, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    out[static_cast<std::size_t>(l)] = a;
  }
  return out;
}

}  // namespace detail

namespace detail {

inline std::vector<double> near_origin_unchecked(const MomentVector& mv, long n) {
  const int t = mv.order();
  const long r = n / (2 * t);
  const long b = n % (2 * t);
  const Complex top = mv.alpha.back();
  const double aligned =
      std::abs(top) > 1e-13 ? (std::arg(top) - kPi / 2.0) / t : 0.0;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < r; ++j) {
    const int block = static_cast<int>(j + 1 == r ? 2 * t + b : 2 * t);
    double offset;
    if (block == 2 * t && std::abs(top) > 1e-13)
      offset = aligned;
    else
      offset = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    const std::vector<double> angles = solve_block(block, mv.alpha, offset);
    out.insert(out.end(), angles.begin(), angles.end());
  }

  for (int k = 1; k <= t; ++k) {
    Complex s = 0.0;
    for (double a : out) s += std::polar(1.0, k * a);
    s /= static_cast<double>(n);
    if (std::abs(s - mv.alpha[static_cast<std::size_t>(k - 1)]) > tol::moment_internal)
      throw numerical_failure("near_origin_solve: verification failed");
  }
  return out;
}

}  // namespace detail

/// Solves the equal-weight moment problem near the origin: N angles whose
/// first T normalized power sums equal alpha, requiring
/// ||alpha||_2 <= 1/(8 T^{3/2}) and N >= 2T.
///
/// The problem splits into floor(N/2T) blocks (sizes 2T, last 2T+b) that
/// each solve the same target; block offsets stagger by 2 pi j / N so the
/// zero target returns the global equispaced grid whenever 2T divides N.
/// Blocks of size exactly 2T start from a frame rotated to put alpha_T on
/// the direction reachable at first order from the uniform grid (the top
/// frequency aliases with its conjugate there, which the rotation absorbs).
inline std::vector<double> near_origin_solve(const MomentVector& mv, long n) {
  const int t = mv.order();
  if (t < 1) throw invalid_config("near_origin_solve: need T >= 1");
  if (n < 2 * t) throw infeasible_moment("near_origin_solve: requires N >= 2T");
  if (mv.l2() > 1.0 / (8.0 * std::pow(static_cast<double>(t), 1.5)) + 1e-12)
    throw infeasible_moment(
        "near_origin_solve: ||alpha||_2 exceeds the 1/(8 T^{3/2}) radius");
  return detail::near_origin_unchecked(mv, n);
}

enum class Strictness { strict, best_effort };

/// Full integral solver: N equally weighted angles matching alpha within
/// 1e-8 per moment, for ||alpha||_1 <= 1/4 and N >= 16 (2T+1) T^{5/2}.
/// The threshold on N is sufficient, not necessary; best_effort skips it
/// (and the internal near-origin radius gate) and relies on the mandatory
/// end verification instead.
///
/// Architecture (s = 2 split): solve the atomic problem for 2 alpha, round
/// its weights to multiples of 1/N1 with N1 = ceil(N/2) by largest-remainder
/// apportionment, then cancel the rounding residue with the near-origin
/// solver on the remaining N2 = N - N1 angles.
inline std::vector<double> unitary_moment_solve(
    const MomentVector& mv, long n, Strictness mode = Strictness::strict) {
  const int t = mv.order();
  if (t < 1) throw invalid_config("unitary_moment_solve: need T >= 1");
  if (mv.l1() > 0.25 + 1e-12)
    throw infeasible_moment(
        "unitary_moment_solve: ||alpha||_1 exceeds the 1/4 bound");
  const double n_floor =
      16.0 * (2.0 * t + 1.0) * std::pow(static_cast<double>(t), 2.5);
  if (mode == Strictness::strict && static_cast<double>(n) < n_floor - 0.5)
    throw infeasible_moment(
        "unitary_moment_solve: N below the 16(2T+1)T^{5/2} threshold");
  if (n < 4 * t + 2)
    throw infeasible_moment("unitary_moment_solve: N too small to split");

  MomentVector doubled;
  doubled.alpha.reserve(mv.alpha.size());
  for (const Complex& a : mv.alpha) doubled.alpha.push_back(2.0 * a);
  const AtomicMeasure mu = atomic_solve(doubled);

  const long n1 = (n + 1) / 2;
  const long n2 = n - n1;

  // Largest-remainder rounding of the atomic weights to counts over N1.
  const std::size_t p = mu.atoms.size();
  std::vector<long> counts(p);
  std::vector<std::pair<double, std::size_t>> rema(p);
  long assigned = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const double exact = mu.atoms[i].weight * static_cast<double>(n1);
    counts[i] = static_cast<long>(std::floor(exact));
    assigned += counts[i];
    rema[i] = {exact - static_cast<double>(counts[i]), i};
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long k = 0; k < n1 - assigned; ++k) ++counts[rema[static_cast<std::size_t>(k)].second];

  // The rounded half is an N1-integral atomic measure in its own right.
  AtomicMeasure rounded;
  rounded.integral_base = n1;
  for (std::size_t i = 0; i < p; ++i)
    if (counts[i] > 0)
      rounded.atoms.push_back(
          {mu.atoms[i].angle,
           static_cast<double>(counts[i]) / static_cast<double>(n1)});
  rounded.validate();

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < p; ++i)
    for (long c = 0; c < counts[i]; ++c) out.push_back(mu.atoms[i].angle);

  // Exact bookkeeping of what the correction block must supply.
  MomentVector corr;
  corr.alpha.resize(mv.alpha.size());
  for (int k = 1; k <= t; ++k) {
    Complex m1 = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      m1 += static_cast<double>(counts[i]) * std::polar(1.0, k * mu.atoms[i].angle);
    m1 /= static_cast<double>(n1);
    corr.alpha[static_cast<std::size_t>(k - 1)] =
        (static_cast<double>(n) * mv.alpha[static_cast<std::size_t>(k - 1)] -
         static_cast<double>(n1) * m1) /
        static_cast<double>(n2);
  }
  const std::vector<double> correction =
      mode == Strictness::strict ? near_origin_solve(corr, n2)
                                 : detail::near_origin_unchecked(corr, n2);
  out.insert(out.end(), correction.begin(), correction.end());

  for (int k = 1; k <= t; ++k) {
    Complex s = 0.0;
    for (double a : out) s += std::polar(1.0, k * a);
    s /= static_cast<double>(n);
    if (std::abs(s - mv.alpha[static_cast<std::size_t>(k - 1)]) > tol::moment_end_to_end)
      throw numerical_failure("unitary_moment_solve: verification failed");
  }
  return out;
}

}  // namespace haarforge::momentproblem
