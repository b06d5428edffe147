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

#include "cvsym/batch.hpp"

#include <algorithm>
#include <cmath>

#include "cvsym/errors.hpp"

namespace cvsym {

SampleBatch SampleBatch::make(Eigen::VectorXd x, Eigen::VectorXd y) {
  if (x.size() != y.size()) {
    throw InvalidDimension("Alice and Bob vectors differ in length");
  }
  if (x.size() == 0 || x.size() % 2 != 0) {
    throw InvalidDimension("batch vectors must have even, positive length");
  }
  return SampleBatch{std::move(x), std::move(y)};
}

double symplectic_product(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() % 2 != 0) {
    throw InvalidDimension("symplectic product needs equal even-length vectors");
  }
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); k += 2) s += x(k) * y(k + 1) - x(k + 1) * y(k);
  return s;
}

InvariantTriple invariants(const SampleBatch& batch) {
  return InvariantTriple{batch.x.squaredNorm(), batch.y.squaredNorm(), batch.x.dot(batch.y),
                         symplectic_product(batch.x, batch.y)};
}

double invariant_relative_change(const InvariantTriple& before, const InvariantTriple& after) {
  auto rel = [](double a, double b, double scale) {
    if (scale == 0.0) return std::abs(a - b) == 0.0 ? 0.0 : INFINITY;
    return std::abs(a - b) / scale;
  };
  const double cross = std::sqrt(before.norm_x_sq * before.norm_y_sq);
  return std::max({rel(before.norm_x_sq, after.norm_x_sq, before.norm_x_sq),
                   rel(before.norm_y_sq, after.norm_y_sq, before.norm_y_sq),
                   rel(before.dot_xy, after.dot_xy, cross),
                   rel(before.symp_xy, after.symp_xy, cross)});
}

}  // namespace cvsym
