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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"
#include "cvsym/phase_space.hpp"

using namespace cvsym;
using cd = std::complex<double>;

TEST_CASE("haar_unitary: single mode is a unit phase") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const ComplexUnitary u = haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u.matrix()(0, 0)) - 1.0) < 1e-15);
  }
}

TEST_CASE("haar_unitary: deterministic for a fixed seed") {
  Rng a(42), b(42);
  CHECK(haar_unitary(1, a).matrix() == haar_unitary(1, b).matrix());
  CHECK(haar_unitary(5, a).matrix() == haar_unitary(5, b).matrix());
}

TEST_CASE("haar_unitary: zero modes rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(haar_unitary(0, rng), InvalidDimension);
}

TEST_CASE("haar_unitary: E|u_ij|^2 = 1/n at n = 4") {
  constexpr int n = 4, samples = 100000;
  Rng rng(2024);
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(n, n), sum_sq = sum;
  for (int s = 0; s < samples; ++s) {
    const Eigen::ArrayXXd p = haar_unitary(n, rng).matrix().cwiseAbs2().array();
    sum += p;
    sum_sq += p * p;
  }
  const Eigen::ArrayXXd mean = sum / samples;
  const Eigen::ArrayXXd se = ((sum_sq / samples - mean * mean) / (samples - 1)).sqrt();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) CHECK(std::abs(mean(i, j) - 0.25) <= 3.0 * se(i, j));
  }
}

TEST_CASE("haar_unitary: left-invariance of first and second moments") {
  constexpr int n = 3, samples = 40000;
  Rng rng(99);
  const ComplexUnitary v0 = haar_unitary(n, rng);
  Eigen::ArrayXXd m1 = Eigen::ArrayXXd::Zero(n, n), m2 = m1, s1 = m1, s2 = m1;
  Eigen::ArrayXXd re1 = m1, re2 = m1;
  for (int s = 0; s < samples; ++s) {
    const Eigen::MatrixXcd a = haar_unitary(n, rng).matrix();
    const Eigen::MatrixXcd b = (v0 * haar_unitary(n, rng)).matrix();
    const Eigen::ArrayXXd pa = a.cwiseAbs2().array(), pb = b.cwiseAbs2().array();
    m1 += pa;
    s1 += pa * pa;
    m2 += pb;
    s2 += pb * pb;
    re1 += a.real().array();
    re2 += b.real().array();
  }
  m1 /= samples;
  m2 /= samples;
  const Eigen::ArrayXXd se =
      ((s1 / samples - m1 * m1 + s2 / samples - m2 * m2) / (samples - 1)).sqrt();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(m1(i, j) - m2(i, j)) <= 3.0 * se(i, j));
      // Re u_ij has variance 1/(2n).
      const double re_se = std::sqrt(1.0 / (2.0 * n) / samples);
      CHECK(std::abs(re1(i, j) / samples) <= 3.0 * re_se);
      CHECK(std::abs(re2(i, j) / samples) <= 3.0 * re_se);
    }
  }
}

TEST_CASE("unitary_to_symplectic: identity and multiplication by i") {
  const auto r1 = unitary_to_symplectic(ComplexUnitary::identity(1));
  CHECK(r1.matrix().isApprox(Eigen::Matrix2d::Identity()));

  Eigen::MatrixXcd i1(1, 1);
  i1(0, 0) = cd(0.0, 1.0);
  const auto ri = unitary_to_symplectic(ComplexUnitary::from_matrix(i1));
  const Eigen::Vector2d out = ri.matrix() * Eigen::Vector2d(0.3, 0.7);
  CHECK(out(0) == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(out(1) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("unitary_to_symplectic: non-unitary input rejected") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 0.1, 0.0, 1.0;
  CHECK_THROWS_AS(ComplexUnitary::from_matrix(m), PreconditionError);
}

TEST_CASE("unitary_to_symplectic: q-first block form and group residuals") {
  Rng rng(5);
  const ComplexUnitary u = haar_unitary(2, rng);
  const auto r = unitary_to_symplectic(u);
  CHECK(r.orthogonality_residual() <= kGroupTolerance);
  CHECK(r.symplecticity_residual() <= kGroupTolerance);

  const Eigen::MatrixXd x = u.matrix().real();
  const Eigen::MatrixXd y = -u.matrix().imag();
  const Eigen::MatrixXd q = r.q_first_matrix();
  CHECK((q.topLeftCorner(2, 2) - x).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((q.topRightCorner(2, 2) - y).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((q.bottomLeftCorner(2, 2) + y).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((q.bottomRightCorner(2, 2) - x).cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::MatrixXd xtx = x.transpose() * x + y.transpose() * y;
  CHECK((xtx - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
  const Eigen::MatrixXd xty = x.transpose() * y;
  CHECK((xty - xty.transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("unitary_to_symplectic: complex action matches real action") {
  Rng rng(8);
  std::normal_distribution<double> normal;
  for (std::size_t n : {1u, 3u, 7u}) {
    const ComplexUnitary u = haar_unitary(n, rng);
    const auto r = unitary_to_symplectic(u);
    Eigen::VectorXd x(2 * n);
    for (auto& v : x) v = normal(rng);
    const Eigen::VectorXd lhs = realify(u.matrix() * complexify(x));
    const Eigen::VectorXd rhs = r.matrix() * x;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("haar_kn: single mode is a planar rotation, det = 1") {
  Rng rng(3);
  const auto r = haar_kn(1, rng);
  const Eigen::MatrixXd& m = r.matrix();
  CHECK(m(0, 0) == doctest::Approx(m(1, 1)).epsilon(1e-15));
  CHECK(m(0, 1) == doctest::Approx(-m(1, 0)).epsilon(1e-15));
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    CHECK(std::abs(haar_kn(n, rng).matrix().determinant() - 1.0) <= 1e-10);
  }
}

TEST_CASE("haar_kn: group closure keeps residuals small") {
  Rng rng(11);
  for (std::size_t n : {2u, 10u, 40u}) {
    const auto p = haar_kn(n, rng) * haar_kn(n, rng);
    CHECK(p.orthogonality_residual() <= 1e-11);
    CHECK(p.symplecticity_residual() <= 1e-11);
  }
}

TEST_CASE("haar_kn: projection of R v is the uniform-sphere marginal") {
  // n = 3: R v is uniform on S^5; compare its first coordinate with a direct
  // normalized-Gaussian sampler.
  constexpr int samples = 10000;
  Rng rng(17), ref_rng(18);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v(2) = 1.0;
  std::vector<double> a, b;
  for (int s = 0; s < samples; ++s) {
    a.push_back((haar_kn(3, rng).matrix() * v)(0));
    Eigen::VectorXd g(6);
    for (auto& e : g) e = normal(ref_rng);
    b.push_back(g(0) / g.norm());
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("reorder: interleaved <-> q-first") {
  Eigen::VectorXd v(4);
  v << 1, 2, 3, 4;
  const Eigen::VectorXd q = reorder(v, Reorder::kInterleavedToQFirst);
  CHECK(q == (Eigen::VectorXd(4) << 1, 3, 2, 4).finished());

  Eigen::VectorXd w(4);
  w << 5, 6, 7, 8;
  CHECK(reorder(reorder(w, Reorder::kInterleavedToQFirst), Reorder::kQFirstToInterleaved) == w);
  CHECK(inverse(Reorder::kInterleavedToQFirst) == Reorder::kQFirstToInterleaved);

  const Eigen::Vector2d ab(0.25, -3.0);
  CHECK(reorder(ab, Reorder::kInterleavedToQFirst) == Eigen::VectorXd(ab));
  CHECK_THROWS_AS(reorder(Eigen::VectorXd::Zero(3), Reorder::kInterleavedToQFirst),
                  InvalidDimension);
}
