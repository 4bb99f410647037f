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
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "haarforge/constants.hpp"
#include "haarforge/khash.hpp"
#include "haarforge/matrixcore.hpp"
#include "haarforge/rng.hpp"

namespace haarforge::ensembles {

using matrixcore::Complex;
using matrixcore::ComplexMatrix;
using matrixcore::HermitianMatrix;
using matrixcore::UnitaryMatrix;

/// Spectrum of a diagonal matrix: either real eigenvalues (Hermitian case)
/// or angles in [0, 2pi) (unitary case).
struct DiagonalSpectrum {
  enum class Kind { real, phase };
  int dim = 0;
  Kind kind = Kind::real;
  std::vector<double> values;  // length dim

  void validate() const {
    if (static_cast<int>(values.size()) != dim)
      throw invalid_config("DiagonalSpectrum: value count must equal dim");
  }

  /// tr(D^k): sum of x^k for real spectra, sum of e^{ik theta} for phases.
  /// Entries are summed in sorted order, so relabeling the diagonal yields
  /// bit-identical traces.
  Complex trace_power(int k) const {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    Complex s = 0.0;
    if (kind == Kind::real) {
      for (double x : sorted) s += std::pow(x, k);
    } else {
      for (double a : sorted) s += std::polar(1.0, k * a);
    }
    return s;
  }

  Complex normalized_trace_power(int k) const {
    return trace_power(k) / static_cast<double>(dim);
  }
};

enum class BasisKind { haar, circuit, hashed_circuit };

/// Full description of one random-sum ensemble draw.
struct EnsembleSpec {
  int dim = 0;            // N; a power of two when circuits are involved
  int m = 1;              // summands per Hamiltonian
  int q = 1;              // moment-match order of the diagonal
  double theta = 0.0;     // resolved rotation angle
  BasisKind basis_kind = BasisKind::haar;
  int circuit_length = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 2) throw invalid_config("EnsembleSpec: N must be >= 2");
    if (m < 1) throw invalid_config("EnsembleSpec: m must be >= 1");
    if (q < 1) throw invalid_config("EnsembleSpec: q must be >= 1");
    if (circuit_length < 0)
      throw invalid_config("EnsembleSpec: circuit_length must be >= 0");
    if (m > 1024)
      throw invalid_config("EnsembleSpec: m capped at 1024 by the stream layout");
    if (basis_kind != BasisKind::haar) {
      if (n_qubits() < 0)
        throw invalid_config("EnsembleSpec: circuit bases need N = 2^n");
    }
  }

  int n_qubits() const {
    int n = 0, v = dim;
    while (v > 1 && (v & 1) == 0) {
      v >>= 1;
      ++n;
    }
    return v == 1 ? n : -1;
  }
};

/// GUE draw: off-diagonal (g + i g') / sqrt(2N), diagonal g / sqrt(N), so
/// that E btr G^2 = 1 in distribution.
inline HermitianMatrix sample_gue(int n, rng::Stream& stream) {
  if (n < 1) throw invalid_config("sample_gue: N must be >= 1");
  ComplexMatrix g(n, n);
  const double off = 1.0 / std::sqrt(2.0 * n);
  const double diag = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    g(i, i) = Complex(stream.normal() * diag, 0.0);
    for (int j = i + 1; j < n; ++j) {
      const Complex z(stream.normal() * off, stream.normal() * off);
      g(i, j) = z;
      g(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(g));
}

/// Measure-exact Haar draw: QR of a complex Ginibre matrix, then each column
/// divided by the phase of the corresponding R diagonal entry.
inline UnitaryMatrix sample_haar(int n, rng::Stream& stream) {
  if (n < 1) throw invalid_config("sample_haar: N must be >= 1");
  ComplexMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      a(i, j) = Complex(stream.normal(), stream.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0) q.col(j) *= mag / d;
  }
  return UnitaryMatrix(std::move(q), UnitaryMatrix::unchecked);
}

namespace detail {

/// Largest-remainder apportionment of N units proportional to weights.
/// Ties resolve to the lower index.
inline std::vector<long> largest_remainder(const std::vector<double>& weights,
                                           long total) {
  const std::size_t n = weights.size();
  std::vector<long> counts(n);
  std::vector<std::pair<double, std::size_t>> rema(n);
  long assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    counts[i] = static_cast<long>(std::floor(exact));
    assigned += counts[i];
    rema[i] = {exact - static_cast<double>(counts[i]), i};
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long k = 0; k < total - assigned; ++k) ++counts[rema[static_cast<std::size_t>(k)].second];
  return counts;
}

}  // namespace detail

struct SemicircleAtom {
  double x;      // in [-2, 2]
  double weight; // pre-rounding
  long count;    // rounded multiplicity
};

/// The L = 2q+5 atom grid x_l = 2 cos(2 pi l / L) with weights
/// (4 - x^2) / (2L), rounded to N-integral multiplicities by largest
/// remainder.  Matches semicircle moments within 2^k (2q+4)/N for k <= q.
inline std::vector<SemicircleAtom> semicircle_atoms(int n, int q) {
  if (q < 1) throw invalid_config("semicircle_diagonal: q must be >= 1");
  if (n <= 2 * (q + 2))
    throw invalid_config("semicircle_diagonal: requires N > 2(q+2)");
  const int L = 2 * q + 5;
  std::vector<SemicircleAtom> atoms(static_cast<std::size_t>(L));
  std::vector<double> weights(static_cast<std::size_t>(L));
  const double pi = 3.14159265358979323846;
  for (int l = 1; l <= L; ++l) {
    const double x = 2.0 * std::cos(2.0 * pi * l / L);
    const double w = (4.0 - x * x) / (2.0 * L);
    atoms[static_cast<std::size_t>(l - 1)] = {x, w, 0};
    weights[static_cast<std::size_t>(l - 1)] = w;
  }
  const std::vector<long> counts = detail::largest_remainder(weights, n);
  for (int l = 0; l < L; ++l) atoms[static_cast<std::size_t>(l)].count = counts[static_cast<std::size_t>(l)];
  return atoms;
}

/// Deterministic function of (N, q): the expanded diagonal of the rounded
/// semicircle measure.
inline DiagonalSpectrum semicircle_diagonal(int n, int q) {
  DiagonalSpectrum d;
  d.dim = n;
  d.kind = DiagonalSpectrum::Kind::real;
  d.values.reserve(static_cast<std::size_t>(n));
  for (const SemicircleAtom& a : semicircle_atoms(n, q))
    for (long c = 0; c < a.count; ++c) d.values.push_back(a.x);
  d.validate();
  return d;
}

/// (1/sqrt(m)) sum_j U_j D U_j^dagger.
inline HermitianMatrix sum_hamiltonian(const DiagonalSpectrum& d,
                                       std::span<const UnitaryMatrix> bases) {
  d.validate();
  if (d.kind != DiagonalSpectrum::Kind::real)
    throw invalid_config("sum_hamiltonian: needs a real spectrum");
  if (bases.empty()) throw invalid_dimension("sum_hamiltonian: m must be >= 1");
  const int n = d.dim;
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(d.values.data(), n);
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (const UnitaryMatrix& u : bases) {
    if (u.dim() != n)
      throw invalid_dimension("sum_hamiltonian: basis dimension mismatch");
    ComplexMatrix scaled = u.mat() * diag.asDiagonal();
    h.noalias() += scaled * u.mat().adjoint();
  }
  h /= std::sqrt(static_cast<double>(bases.size()));
  h = 0.5 * (h + h.adjoint()).eval();
  return HermitianMatrix(std::move(h));
}

/// Dense random circuit over {H x I, I x H, T x I, I x T, CNOT} applied to a
/// uniformly random adjacent qubit pair per step.  In each two-qubit word
/// the right factor acts on the lower qubit p and the left factor on p+1;
/// CNOT takes qubit p as control and p+1 as target.
inline UnitaryMatrix random_local_circuit(int n_qubits, int length,
                                          std::uint64_t seed_material) {
  if (n_qubits < 1 || n_qubits > 10)
    throw invalid_config("random_local_circuit: n_qubits must be in [1, 10]");
  if (length < 0) throw invalid_config("random_local_circuit: length must be >= 0");
  if (length > 0 && n_qubits < 2)
    throw invalid_config("random_local_circuit: gates need at least 2 qubits");
  const int n = 1 << n_qubits;
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  if (length == 0) return UnitaryMatrix(std::move(u), UnitaryMatrix::unchecked);

  const double s = 1.0 / std::sqrt(2.0);
  const Complex t_phase = std::polar(1.0, 3.14159265358979323846 / 4.0);
  // 4x4 gate words on (qubit p+1, qubit p); local index = b_p + 2 b_{p+1}.
  auto apply = [&](int gate, int p) {
    Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
    switch (gate) {
      case 0:  // H on qubit p+1
        g << s, 0, s, 0, 0, s, 0, s, s, 0, -s, 0, 0, s, 0, -s;
        break;
      case 1:  // H on qubit p
        g << s, s, 0, 0, s, -s, 0, 0, 0, 0, s, s, 0, 0, s, -s;
        break;
      case 2:  // T on qubit p+1
        g(0, 0) = g(1, 1) = 1.0;
        g(2, 2) = g(3, 3) = t_phase;
        break;
      case 3:  // T on qubit p
        g(0, 0) = g(2, 2) = 1.0;
        g(1, 1) = g(3, 3) = t_phase;
        break;
      default:  // CNOT, control p, target p+1
        g(0, 0) = g(1, 3) = g(2, 2) = g(3, 1) = 1.0;
        break;
    }
    const int lo = 1 << p;
    const int hi = 1 << (p + 1);
    Eigen::Matrix<Complex, 4, Eigen::Dynamic> rows(4, n);
    for (int base = 0; base < n; ++base) {
      if (base & (lo | hi)) continue;
      rows.row(0) = u.row(base);
      rows.row(1) = u.row(base | lo);
      rows.row(2) = u.row(base | hi);
      rows.row(3) = u.row(base | lo | hi);
      rows = (g * rows).eval();
      u.row(base) = rows.row(0);
      u.row(base | lo) = rows.row(1);
      u.row(base | hi) = rows.row(2);
      u.row(base | lo | hi) = rows.row(3);
    }
  };

  rng::Stream stream(seed_material, "ensembles.circuit", 0);
  const int pairs = n_qubits - 1;
  for (int step = 0; step < length; ++step) {
    const int p = pairs == 1 ? 0 : static_cast<int>(stream.next_u32() % pairs);
    const int gate = static_cast<int>(stream.next_u32() % 5);
    apply(gate, p);
  }
  return UnitaryMatrix(std::move(u), UnitaryMatrix::unchecked);
}

namespace detail {

// Stream layout for W2 draws: one sub-stream per (sample, hamiltonian,
// summand), so the same sample index reproduces bit-identical matrices under
// any worker count.  m <= 1024 per EnsembleSpec::validate.
inline std::uint64_t w2_stream_id(std::uint64_t sample, int hamiltonian, int j) {
  return (sample << 11) | (static_cast<std::uint64_t>(hamiltonian) << 10) |
         static_cast<std::uint64_t>(j);
}

inline ComplexMatrix w2_half(const EnsembleSpec& spec,
                             const DiagonalSpectrum& d,
                             std::uint64_t sample_index, int hamiltonian) {
  const int n = spec.dim;
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(d.values.data(), n);
  ComplexMatrix h = ComplexMatrix::Zero(n, n);

  khash::HashFamilyMember hash;
  if (spec.basis_kind == BasisKind::hashed_circuit) {
    unsigned w_in = 1;
    while ((1u << w_in) < static_cast<unsigned>(spec.m)) ++w_in;
    rng::Stream hash_stream(spec.seed, "ensembles.w2.hash",
                            w2_stream_id(sample_index, hamiltonian, 0));
    hash = khash::sample_hash(static_cast<unsigned>(std::max(2, spec.q)), w_in,
                              64, hash_stream);
  }

  for (int j = 0; j < spec.m; ++j) {
    ComplexMatrix basis;
    switch (spec.basis_kind) {
      case BasisKind::haar: {
        rng::Stream s(spec.seed, "ensembles.w2.basis",
                      w2_stream_id(sample_index, hamiltonian, j));
        basis = sample_haar(n, s).mat();
        break;
      }
      case BasisKind::circuit: {
        rng::Stream s(spec.seed, "ensembles.w2.circuitseed",
                      w2_stream_id(sample_index, hamiltonian, j));
        basis = random_local_circuit(spec.n_qubits(), spec.circuit_length,
                                     s.next_u64())
                    .mat();
        break;
      }
      case BasisKind::hashed_circuit: {
        basis = random_local_circuit(
                    spec.n_qubits(), spec.circuit_length,
                    khash::hashed_seed_stream(hash, static_cast<std::uint64_t>(j)))
                    .mat();
        break;
      }
    }
    ComplexMatrix scaled = basis * diag.asDiagonal();
    h.noalias() += scaled * basis.adjoint();
  }
  h /= std::sqrt(static_cast<double>(spec.m));
  h = 0.5 * (h + h.adjoint()).eval();
  return h;
}

}  // namespace detail

/// One draw of W2 = e^{i theta H} e^{i theta H'} with H, H' independent
/// random-sum Hamiltonians over the semicircle diagonal.  Deterministic in
/// (spec.seed, sample_index).
inline UnitaryMatrix sample_w2(const EnsembleSpec& spec,
                               std::uint64_t sample_index) {
  spec.validate();
  const DiagonalSpectrum d = semicircle_diagonal(spec.dim, spec.q);
  const HermitianMatrix h1(detail::w2_half(spec, d, sample_index, 0));
  const HermitianMatrix h2(detail::w2_half(spec, d, sample_index, 1));
  const UnitaryMatrix e1 = matrixcore::unitary_exp(h1, spec.theta);
  const UnitaryMatrix e2 = matrixcore::unitary_exp(h2, spec.theta);
  return UnitaryMatrix(e1.mat() * e2.mat(), UnitaryMatrix::unchecked);
}

/// Product of independent ensemble draws; k = 1 returns the input unchanged.
inline UnitaryMatrix compose_boost(std::span<const UnitaryMatrix> samples) {
  if (samples.empty()) throw invalid_dimension("compose_boost: k must be >= 1");
  const int n = samples.front().dim();
  ComplexMatrix out = samples.front().mat();
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].dim() != n)
      throw invalid_dimension("compose_boost: dimension mismatch");
    out = out * samples[i].mat();
  }
  return UnitaryMatrix(std::move(out), UnitaryMatrix::unchecked);
}

}  // namespace haarforge::ensembles
