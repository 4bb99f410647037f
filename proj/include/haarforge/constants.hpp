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

#include <stdexcept>
#include <string>

namespace haarforge {

/// Central tolerance table. Every numeric gate in the library and the test
/// suites reads from here, so there is a single source of truth.
namespace tol {

// Type invariants.
inline constexpr double hermitian_residual = 1e-10;  // ||M - M^d||_F <= tol * max(1, ||M||_F)
inline constexpr double unitary_residual = 1e-8;     // ||M M^d - I||_F <= tol * sqrt(N)
inline constexpr double eig_reconstruction = 1e-10;  // ||V L V^d - H||_F <= tol * ||H||_F
inline constexpr double eig_degeneracy = 1e-12;      // eigenvalue tie-break window

// Operation contracts.
inline constexpr double exp_identity = 1e-12;        // e^{i*0*H} == I
inline constexpr double exp_inverse_product = 1e-10; // e^{itH} e^{-itH} == I
inline constexpr double trace_moment_paths = 1e-9;   // eigenphase vs matrix-power route
inline constexpr double operator_norm_vs_eig = 1e-9;

// Moment-problem solver.
inline constexpr double moment_internal = 1e-10;     // atomic / near-origin residual
inline constexpr double moment_end_to_end = 1e-8;    // full integral solver residual
inline constexpr double psd_slack = 1e-10;           // allowed negative part of min eigenvalue
inline constexpr double weight_negativity = 1e-12;

// Measures.
inline constexpr double weight_sum = 1e-12;          // atomic weights sum to 1
inline constexpr double integral_weight = 1e-9;      // weight*N integrality

// Special functions.
inline constexpr double bessel_abs = 1e-12;
inline constexpr double theta_zero = 1e-9;           // bisection width for J1 zeros
inline constexpr double imag_leak = 1e-12;           // conjugate-pair cancellation check
inline constexpr double pole_proximity = 1e-12;

// Statistics plumbing.
inline constexpr double merge_determinism = 1e-12;

}  // namespace tol

// Error taxonomy shared across modules.  The CLI maps invalid_config to exit
// code 1 and everything else to exit code 2.
struct invalid_config : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct invalid_dimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct infeasible_moment : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_range : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace haarforge
