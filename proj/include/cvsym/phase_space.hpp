// Copyright 2026 The cvsym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "cvsym/random.hpp"

namespace cvsym {

// Residual bound for sampled group elements, ~100x double accumulation error.
inline constexpr double kGroupTolerance = 1e-12;

// Element of U(n). Constructed only through checked factories.
class ComplexUnitary {
 public:
  // Throws PreconditionError unless ||U^dagger U - 1||_max <= tolerance.
  static ComplexUnitary from_matrix(Eigen::MatrixXcd m,
                                    double tolerance = kGroupTolerance);
  static ComplexUnitary identity(std::size_t n);

  std::size_t modes() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return u_; }
  double unitarity_residual() const;

  // this * other
  ComplexUnitary operator*(const ComplexUnitary& other) const;

 private:
  explicit ComplexUnitary(Eigen::MatrixXcd m) : u_(std::move(m)) {}
  Eigen::MatrixXcd u_;
};

// Element of K(n) = O(2n) intersected with Sp(2n), acting on interleaved
// vectors (q1, p1, ..., qn, pn). Keeps the unitary it was realified from.
class SymplecticOrthogonal {
 public:
  static SymplecticOrthogonal identity(std::size_t n);

  std::size_t modes() const noexcept { return generator_.modes(); }
  const Eigen::MatrixXd& matrix() const noexcept { return r_; }
  const ComplexUnitary& generator() const noexcept { return generator_; }

  // Same map written for q-first vectors: [[X, Y], [-Y, X]].
  Eigen::MatrixXd q_first_matrix() const;

  double orthogonality_residual() const;
  double symplecticity_residual() const;

  // this * other, i.e. `other` is applied first.
  SymplecticOrthogonal operator*(const SymplecticOrthogonal& other) const;

 private:
  friend SymplecticOrthogonal unitary_to_symplectic(const ComplexUnitary& u);
  SymplecticOrthogonal(Eigen::MatrixXd r, ComplexUnitary g)
      : r_(std::move(r)), generator_(std::move(g)) {}

  Eigen::MatrixXd r_;
  ComplexUnitary generator_;
};

enum class Reorder { kInterleavedToQFirst, kQFirstToInterleaved };

constexpr Reorder inverse(Reorder r) noexcept {
  return r == Reorder::kInterleavedToQFirst ? Reorder::kQFirstToInterleaved
                                            : Reorder::kInterleavedToQFirst;
}

// [q1,p1,q2,p2] <-> [q1,q2,p1,p2]. Throws InvalidDimension on odd or empty input.
Eigen::VectorXd reorder(const Eigen::Ref<const Eigen::VectorXd>& v, Reorder direction);

// Interleaved standard symplectic form, blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(std::size_t n);

// ||R^T R - 1||_max and ||R^T Omega R - Omega||_max.
double orthogonality_residual(const Eigen::MatrixXd& r);
double symplecticity_residual(const Eigen::MatrixXd& r);

// a_k = x_{2k-1} + i x_{2k} (1-based), and back.
Eigen::VectorXcd complexify(const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd realify(const Eigen::Ref<const Eigen::VectorXcd>& a);

// Haar-distributed element of U(n): QR of a complex Ginibre matrix with the
// diagonal of the triangular factor normalized to positive reals.
ComplexUnitary haar_unitary(std::size_t n, Rng& rng);

// Splits U = X - iY and returns R(X, Y), conjugated into interleaved order, so
// that realify(U a) == R realify(a).
SymplecticOrthogonal unitary_to_symplectic(const ComplexUnitary& u);

inline SymplecticOrthogonal haar_kn(std::size_t n, Rng& rng) {
  return unitary_to_symplectic(haar_unitary(n, rng));
}

}  // namespace cvsym
