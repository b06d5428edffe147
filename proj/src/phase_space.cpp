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

#include "cvsym/phase_space.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "cvsym/errors.hpp"

namespace cvsym {

namespace {

void require_modes(std::size_t n) {
  if (n == 0) throw InvalidDimension("mode count must be at least 1");
}

std::size_t modes_of_length(Eigen::Index len) {
  if (len <= 0 || len % 2 != 0) {
    throw InvalidDimension("phase-space vector length must be even and positive, got " +
                           std::to_string(len));
  }
  return static_cast<std::size_t>(len / 2);
}

// Omega * r without forming Omega: row 2k <- row 2k+1, row 2k+1 <- -row 2k.
Eigen::MatrixXd apply_omega_left(const Eigen::MatrixXd& r) {
  Eigen::MatrixXd out(r.rows(), r.cols());
  for (Eigen::Index k = 0; k < r.rows(); k += 2) {
    out.row(k) = r.row(k + 1);
    out.row(k + 1) = -r.row(k);
  }
  return out;
}

}  // namespace

ComplexUnitary ComplexUnitary::from_matrix(Eigen::MatrixXcd m, double tolerance) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidDimension("unitary must be square and non-empty");
  }
  ComplexUnitary u(std::move(m));
  const double res = u.unitarity_residual();
  if (!(res <= tolerance)) {
    throw PreconditionError("matrix is not unitary: ||U^dagger U - 1||_max = " +
                            std::to_string(res));
  }
  return u;
}

ComplexUnitary ComplexUnitary::identity(std::size_t n) {
  require_modes(n);
  const auto d = static_cast<Eigen::Index>(n);
  return ComplexUnitary(Eigen::MatrixXcd::Identity(d, d));
}

double ComplexUnitary::unitarity_residual() const {
  const Eigen::MatrixXcd g = u_.adjoint() * u_;
  return (g - Eigen::MatrixXcd::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
}

ComplexUnitary ComplexUnitary::operator*(const ComplexUnitary& other) const {
  if (modes() != other.modes()) throw InvalidDimension("unitary size mismatch");
  return ComplexUnitary(u_ * other.u_);
}

SymplecticOrthogonal SymplecticOrthogonal::identity(std::size_t n) {
  return unitary_to_symplectic(ComplexUnitary::identity(n));
}

Eigen::MatrixXd SymplecticOrthogonal::q_first_matrix() const {
  const auto d = r_.rows();
  Eigen::MatrixXd out(d, d);
  const Eigen::Index n = d / 2;
  // q-first index of interleaved coordinate i.
  auto qf = [n](Eigen::Index i) { return (i % 2 == 0) ? i / 2 : n + i / 2; };
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(qf(i), qf(j)) = r_(i, j);
  return out;
}

double SymplecticOrthogonal::orthogonality_residual() const {
  return cvsym::orthogonality_residual(r_);
}

double SymplecticOrthogonal::symplecticity_residual() const {
  return cvsym::symplecticity_residual(r_);
}

SymplecticOrthogonal SymplecticOrthogonal::operator*(const SymplecticOrthogonal& other) const {
  if (modes() != other.modes()) throw InvalidDimension("transform size mismatch");
  return SymplecticOrthogonal(r_ * other.r_, generator_ * other.generator_);
}

Eigen::VectorXd reorder(const Eigen::Ref<const Eigen::VectorXd>& v, Reorder direction) {
  const std::size_t n = modes_of_length(v.size());
  Eigen::VectorXd out(v.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    const auto ni = static_cast<Eigen::Index>(n);
    if (direction == Reorder::kInterleavedToQFirst) {
      out(ki) = v(2 * ki);
      out(ni + ki) = v(2 * ki + 1);
    } else {
      out(2 * ki) = v(ki);
      out(2 * ki + 1) = v(ni + ki);
    }
  }
  return out;
}

Eigen::MatrixXd symplectic_form(std::size_t n) {
  require_modes(n);
  const auto d = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

double orthogonality_residual(const Eigen::MatrixXd& r) {
  Eigen::MatrixXd g = r.transpose() * r;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

double symplecticity_residual(const Eigen::MatrixXd& r) {
  if (r.rows() % 2 != 0) throw InvalidDimension("symplectic matrix must have even size");
  Eigen::MatrixXd g = r.transpose() * apply_omega_left(r);
  for (Eigen::Index k = 0; k < g.rows(); k += 2) {
    g(k, k + 1) -= 1.0;
    g(k + 1, k) += 1.0;
  }
  return g.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd complexify(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const std::size_t n = modes_of_length(x.size());
  Eigen::VectorXcd a(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = {x(2 * k), x(2 * k + 1)};
  return a;
}

Eigen::VectorXd realify(const Eigen::Ref<const Eigen::VectorXcd>& a) {
  if (a.size() == 0) throw InvalidDimension("empty complex vector");
  Eigen::VectorXd x(2 * a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    x(2 * k) = a(k).real();
    x(2 * k + 1) = a(k).imag();
  }
  return x;
}

ComplexUnitary haar_unitary(std::size_t n, Rng& rng) {
  require_modes(n);
  const auto d = static_cast<Eigen::Index>(n);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const auto& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    const std::complex<double> r = packed(j, j);
    const double mag = std::abs(r);
    // A zero pivot has probability zero; leave the column as is if it happens.
    if (mag > 0.0) q.col(j) *= r / mag;
  }
  return ComplexUnitary::from_matrix(std::move(q));
}

SymplecticOrthogonal unitary_to_symplectic(const ComplexUnitary& u) {
  const auto& m = u.matrix();
  const Eigen::Index n = m.rows();
  // U = X - iY.
  const Eigen::MatrixXd x = m.real();
  const Eigen::MatrixXd y = -m.imag();
  Eigen::MatrixXd q_first(2 * n, 2 * n);
  q_first << x, y, -y, x;

  // R_interleaved = P^T R_qfirst P with P the interleaved -> q-first permutation.
  Eigen::MatrixXd r(2 * n, 2 * n);
  auto qf = [n](Eigen::Index i) { return (i % 2 == 0) ? i / 2 : n + i / 2; };
  for (Eigen::Index j = 0; j < 2 * n; ++j)
    for (Eigen::Index i = 0; i < 2 * n; ++i) r(i, j) = q_first(qf(i), qf(j));
  return SymplecticOrthogonal(std::move(r), u);
}

}  // namespace cvsym
