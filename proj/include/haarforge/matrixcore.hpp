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
#include <utility>
#include <vector>

#include "haarforge/constants.hpp"

namespace haarforge::matrixcore {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

inline double hermitian_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

inline double unitary_defect(const ComplexMatrix& m) {
  const auto n = m.rows();
  return (m * m.adjoint() - ComplexMatrix::Identity(n, n)).norm();
}

/// Square complex matrix with ||M - M^d||_F <= 1e-10 * max(1, ||M||_F).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw invalid_dimension("HermitianMatrix: matrix must be square");
    if (!all_finite(m_))
      throw invalid_config("HermitianMatrix: non-finite entries");
    if (hermitian_defect(m_) > tol::hermitian_residual)
      throw invalid_config("HermitianMatrix: Hermitian residual too large");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& mat() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Square complex matrix with ||M M^d - I||_F <= 1e-8 * sqrt(N).
class UnitaryMatrix {
 public:
  struct unchecked_t {};
  static constexpr unchecked_t unchecked{};

  explicit UnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw invalid_dimension("UnitaryMatrix: matrix must be square");
    if (!all_finite(m_))
      throw invalid_config("UnitaryMatrix: non-finite entries");
    if (unitary_defect(m_) >
        tol::unitary_residual * std::sqrt(static_cast<double>(m_.rows())))
      throw invalid_config("UnitaryMatrix: unitarity residual too large");
  }

  // For matrices unitary by construction (QR factors, exponentials of
  // Hermitian matrices, products of unitaries).  The invariant still holds;
  // it is just not re-measured on this path.
  UnitaryMatrix(ComplexMatrix m, unchecked_t) : m_(std::move(m)) {}

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& mat() const { return m_; }

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  ComplexMatrix eigenvectors;    // columns, phase-canonical
};

namespace detail {

// Multiply each eigenvector by a phase so its first component of nontrivial
// magnitude is real and positive, then order degenerate groups
// lexicographically.  Keeps reports byte-stable for fixed input.
inline void canonicalize(Eigen::VectorXd& vals, ComplexMatrix& vecs) {
  const int n = static_cast<int>(vals.size());
  for (int j = 0; j < n; ++j) {
    int anchor = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > best + 1e-12) {
        best = a;
        anchor = i;
        if (a > 0.5) break;
      }
    }
    const Complex v = vecs(anchor, j);
    if (std::abs(v) > 0) vecs.col(j) *= std::conj(v) / std::abs(v);
  }
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  auto lex_less = [&](int a, int b) {
    for (int i = 0; i < n; ++i) {
      const Complex x = vecs(i, a), y = vecs(i, b);
      if (std::abs(x.real() - y.real()) > 1e-10) return x.real() < y.real();
      if (std::abs(x.imag() - y.imag()) > 1e-10) return x.imag() < y.imag();
    }
    return false;
  };
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && vals(hi) - vals(lo) <= tol::eig_degeneracy * scale) ++hi;
    if (hi - lo > 1) {
      std::vector<int> idx(hi - lo);
      for (int i = 0; i < hi - lo; ++i) idx[i] = lo + i;
      std::sort(idx.begin(), idx.end(), lex_less);
      ComplexMatrix block(n, hi - lo);
      for (int i = 0; i < hi - lo; ++i) block.col(i) = vecs.col(idx[i]);
      vecs.middleCols(lo, hi - lo) = block;
    }
    lo = hi;
  }
}

}  // namespace detail

/// Hermitian eigendecomposition with ascending eigenvalues and deterministic
/// eigenvector phases.
inline EigenDecomposition herm_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h.mat() + h.mat().adjoint()));
  if (solver.info() != Eigen::Success)
    throw numerical_failure("herm_eig: eigensolver failed to converge at dim " +
                            std::to_string(h.dim()));
  EigenDecomposition d{solver.eigenvalues(), solver.eigenvectors()};
  detail::canonicalize(d.eigenvalues, d.eigenvectors);
  return d;
}

/// e^{i * theta * H} through the spectral factorization.
inline UnitaryMatrix unitary_exp(const HermitianMatrix& h, double theta) {
  const EigenDecomposition d = herm_eig(h);
  const int n = h.dim();
  Eigen::VectorXcd phases(n);
  for (int i = 0; i < n; ++i)
    phases(i) = std::polar(1.0, theta * d.eigenvalues(i));
  ComplexMatrix out = d.eigenvectors * phases.asDiagonal() *
                      d.eigenvectors.adjoint();
  return UnitaryMatrix(std::move(out), UnitaryMatrix::unchecked);
}

enum class MomentPath { eigenphase, matrix_power };

/// First T normalized trace moments alpha_k = tr(U^k) / N.
inline std::vector<Complex> trace_power_moments(
    const UnitaryMatrix& u, int t_max,
    MomentPath path = MomentPath::matrix_power) {
  const int n = u.dim();
  if (t_max < 1 || t_max > 4 * n)
    throw invalid_config("trace_power_moments: T out of range (T <= 4N)");
  std::vector<Complex> out(static_cast<std::size_t>(t_max));
  if (path == MomentPath::matrix_power) {
    ComplexMatrix power = u.mat();
    out[0] = power.trace() / static_cast<double>(n);
    for (int k = 2; k <= t_max; ++k) {
      power = power * u.mat();
      out[static_cast<std::size_t>(k - 1)] = power.trace() / static_cast<double>(n);
    }
  } else {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(u.mat(), false);
    if (solver.info() != Eigen::Success)
      throw numerical_failure("trace_power_moments: eigensolver failed at dim " +
                              std::to_string(n));
    const Eigen::VectorXcd lam = solver.eigenvalues();
    Eigen::VectorXcd powers = Eigen::VectorXcd::Ones(n);
    for (int k = 1; k <= t_max; ++k) {
      powers.array() *= lam.array();
      out[static_cast<std::size_t>(k - 1)] = powers.sum() / static_cast<double>(n);
    }
  }
  return out;
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace haarforge::matrixcore
