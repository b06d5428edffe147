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

namespace cvsym {

// Alice's and Bob's quadrature data for n modes, interleaved (q1, p1, ..., qn, pn).
struct SampleBatch {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  // Throws InvalidDimension unless both vectors have the same even, positive length.
  static SampleBatch make(Eigen::VectorXd x, Eigen::VectorXd y);

  std::size_t modes() const noexcept { return static_cast<std::size_t>(x.size() / 2); }
};

// The four K(n)-invariant quantities of a batch.
struct InvariantTriple {
  double norm_x_sq = 0.0;
  double norm_y_sq = 0.0;
  double dot_xy = 0.0;
  // omega(x, y) = sum_k x_{2k-1} y_{2k} - x_{2k} y_{2k-1}; equals Im<a|b>.
  double symp_xy = 0.0;

  bool operator==(const InvariantTriple&) const = default;
};

double symplectic_product(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y);

InvariantTriple invariants(const SampleBatch& batch);

// Largest relative change across the four quantities. Norms are compared on
// their own scale, dot and omega on the scale ||x|| ||y||.
double invariant_relative_change(const InvariantTriple& before, const InvariantTriple& after);

}  // namespace cvsym
