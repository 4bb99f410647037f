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
#include <functional>
#include <optional>
#include <vector>

#include "haarforge/constants.hpp"
#include "haarforge/ensembles.hpp"
#include "haarforge/parallel.hpp"

namespace haarforge::statlab {

using Complex = std::complex<double>;
using UnitarySampler = std::function<Eigen::MatrixXcd(std::uint64_t)>;
using ScalarSampler = std::function<double(std::uint64_t)>;

/// Streaming mean/variance accumulator for complex observations, mergeable
/// across batch partitions (Chan et al. update rules).
struct Running {
  long long n = 0;
  Complex mean{0.0, 0.0};
  double m2_re = 0.0;
  double m2_im = 0.0;

  void add(Complex x) {
    ++n;
    const Complex delta = x - mean;
    mean += delta / static_cast<double>(n);
    const Complex delta2 = x - mean;
    m2_re += delta.real() * delta2.real();
    m2_im += delta.imag() * delta2.imag();
  }

  void merge(const Running& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const Complex delta = other.mean - mean;
    const double total = static_cast<double>(n + other.n);
    const double w = static_cast<double>(n) * static_cast<double>(other.n) / total;
    m2_re += other.m2_re + delta.real() * delta.real() * w;
    m2_im += other.m2_im + delta.imag() * delta.imag() * w;
    mean += delta * (static_cast<double>(other.n) / total);
    n += other.n;
  }

  /// Standard error of the complex mean: sqrt((Var_re + Var_im) / n).
  double stderr_mean() const {
    if (n < 2) return 0.0;
    const double var = (m2_re + m2_im) / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }
};

/// Per-power moment statistics of one unitary ensemble, plus the Haar
/// reference magnitudes for E|tr U^p|^2.
struct MomentReport {
  int dim = 0;
  int p_max = 0;
  long long samples = 0;
  std::optional<ensembles::EnsembleSpec> ensemble;  // echo when applicable
  std::vector<Complex> mean_btr;        // E btr W^p
  std::vector<double> stderr_btr;
  std::vector<double> mean_abs_tr_sq;   // E |tr W^p|^2
  std::vector<double> stderr_abs_tr_sq;
  std::vector<double> haar_reference;   // min(p, N)
};

/// Haar reference for E|tr U^j|^2.
inline double haar_moment_reference(long j, long n) {
  if (j < 1) throw invalid_config("haar_moment_reference: j must be >= 1");
  return static_cast<double>(std::min(j, n));
}

/// Estimates all trace moments p = 1..p_max of the sampled ensemble.
/// Samples are generated in parallel by index; the reduction runs serially
/// in index order, so the report does not depend on the worker count.
inline MomentReport mc_trace_moments(const UnitarySampler& sampler, int dim,
                                     int p_max, long samples) {
  if (samples < 2) throw invalid_config("mc_trace_moments: samples must be >= 2");
  if (p_max < 1) throw invalid_config("mc_trace_moments: p_max must be >= 1");
  std::vector<Complex> traces(static_cast<std::size_t>(samples) * p_max);
  par::parallel_for(static_cast<std::uint64_t>(samples), [&](std::uint64_t i) {
    const Eigen::MatrixXcd w = sampler(i);
    Eigen::MatrixXcd power = w;
    for (int p = 1; p <= p_max; ++p) {
      if (p > 1) power = power * w;
      traces[static_cast<std::size_t>(i) * p_max + (p - 1)] = power.trace();
    }
  });

  MomentReport report;
  report.dim = dim;
  report.p_max = p_max;
  report.samples = samples;
  report.mean_btr.resize(static_cast<std::size_t>(p_max));
  report.stderr_btr.resize(static_cast<std::size_t>(p_max));
  report.mean_abs_tr_sq.resize(static_cast<std::size_t>(p_max));
  report.stderr_abs_tr_sq.resize(static_cast<std::size_t>(p_max));
  report.haar_reference.resize(static_cast<std::size_t>(p_max));
  for (int p = 1; p <= p_max; ++p) {
    Running btr, abs_sq;
    for (long i = 0; i < samples; ++i) {
      const Complex tr = traces[static_cast<std::size_t>(i) * p_max + (p - 1)];
      btr.add(tr / static_cast<double>(dim));
      abs_sq.add(Complex(std::norm(tr), 0.0));
    }
    report.mean_btr[static_cast<std::size_t>(p - 1)] = btr.mean;
    report.stderr_btr[static_cast<std::size_t>(p - 1)] = btr.stderr_mean();
    report.mean_abs_tr_sq[static_cast<std::size_t>(p - 1)] = abs_sq.mean.real();
    report.stderr_abs_tr_sq[static_cast<std::size_t>(p - 1)] = abs_sq.stderr_mean();
    report.haar_reference[static_cast<std::size_t>(p - 1)] =
        haar_moment_reference(p, dim);
  }
  return report;
}

/// l1 norm of the mean moment vector with first-order error propagation.
inline std::pair<double, double> moment_l1(const MomentReport& report) {
  double value = 0.0, var = 0.0;
  for (std::size_t i = 0; i < report.mean_btr.size(); ++i) {
    value += std::abs(report.mean_btr[i]);
    var += report.stderr_btr[i] * report.stderr_btr[i];
  }
  return {value, std::sqrt(var)};
}

/// Frame potential estimate E |tr(W^d W')|^{2T} over independent pairs
/// (draws 2i and 2i+1).  Haar reference: T! for N >= T.
inline std::pair<double, double> frame_potential(const UnitarySampler& sampler,
                                                 int dim, int t,
                                                 long pair_samples) {
  if (t < 1 || t > dim)
    throw invalid_config("frame_potential: requires 1 <= T <= N");
  if (pair_samples < 2)
    throw invalid_config("frame_potential: pair_samples must be >= 2");
  std::vector<double> vals(static_cast<std::size_t>(pair_samples));
  par::parallel_for(static_cast<std::uint64_t>(pair_samples), [&](std::uint64_t i) {
    const Eigen::MatrixXcd a = sampler(2 * i);
    const Eigen::MatrixXcd b = sampler(2 * i + 1);
    const Complex overlap = (a.adjoint() * b).trace();
    vals[static_cast<std::size_t>(i)] =
        std::pow(std::norm(overlap), static_cast<double>(t));
  });
  Running acc;
  for (double v : vals) acc.add(Complex(v, 0.0));
  return {acc.mean.real(), acc.stderr_mean()};
}

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double bound = 0.0;
  bool flagged = false;  // empirical lower confidence bound exceeds the bound
};

/// Empirical tail P(X >= t) of a scalar statistic against a theoretical
/// bound, with Wilson 95% intervals.  A row is flagged when even the lower
/// confidence limit sits above the bound.
inline std::vector<TailRow> concentration_tail(
    const ScalarSampler& sampler, const std::function<double(double)>& bound_fn,
    const std::vector<double>& t_grid, long samples) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]) || !(t_grid[0] > 0))
      throw invalid_config("concentration_tail: t grid must be positive ascending");
  std::vector<double> xs(static_cast<std::size_t>(samples));
  par::parallel_for(static_cast<std::uint64_t>(samples),
                    [&](std::uint64_t i) { xs[static_cast<std::size_t>(i)] = sampler(i); });
  const double z = 1.959963984540054;  // 95% normal quantile
  std::vector<TailRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    long hits = 0;
    for (double x : xs)
      if (x >= t) ++hits;
    const double nn = static_cast<double>(samples);
    const double phat = static_cast<double>(hits) / nn;
    const double z2n = z * z / nn;
    const double center = (phat + z2n / 2.0) / (1.0 + z2n);
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) /
        (1.0 + z2n);
    TailRow row;
    row.t = t;
    row.empirical = phat;
    row.wilson_low = std::max(0.0, center - half);
    row.wilson_high = std::min(1.0, center + half);
    row.bound = bound_fn(t);
    row.flagged = row.wilson_low > row.bound;
    rows.push_back(row);
  }
  return rows;
}

/// Closed-form semicircle CDF on [-2, 2].
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double pi = 3.14159265358979323846;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(x / 2.0) / pi;
}

/// Kolmogorov-Smirnov distance between the empirical CDF of the sample and
/// the semicircle CDF.
inline double ecdf_semicircle_distance(std::vector<double> eigs) {
  if (eigs.empty()) throw invalid_config("ecdf_semicircle_distance: empty sample");
  std::sort(eigs.begin(), eigs.end());
  const double n = static_cast<double>(eigs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    const double f = semicircle_cdf(eigs[i]);
    sup = std::max(sup, std::abs(static_cast<double>(i + 1) / n - f));
    sup = std::max(sup, std::abs(static_cast<double>(i) / n - f));
  }
  return sup;
}

}  // namespace haarforge::statlab
