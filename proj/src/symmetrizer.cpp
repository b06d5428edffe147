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

#include "cvsym/symmetrizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cvsym/distance.hpp"
#include "cvsym/errors.hpp"

namespace cvsym {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// |<a|b>|^2 >= (1 - kColinearSlack) ||a||^2 ||b||^2 selects the reflection branch.
constexpr double kColinearSlack = 1e-12;
// Completion candidates whose residual falls below this are dropped.
constexpr double kCompletionCutoff = 1e-10;
// Below |p from - to| <= kReflectionGuard |to| the mediator reflection is
// ill-conditioned (its normal is mostly rounding error); the equivalent plane
// rotation is used instead.
constexpr double kReflectionGuard = 1e-4;

void check_match(const char* name, double src, double tgt, double scale) {
  if (scale == 0.0) return;
  if (std::abs(src - tgt) > kWitnessTolerance * scale) {
    throw PreconditionError(std::string("witness_transform: invariant ") + name +
                            " differs between source (" + std::to_string(src) +
                            ") and target (" + std::to_string(tgt) + ")");
  }
}

// Householder reflection H = 1 - 2 v v^dagger / (v^dagger v), applied in place.
void reflect_left(MatrixXcd& m, const VectorXcd& v) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) return;
  const Eigen::RowVectorXcd w = v.adjoint() * m;
  m.noalias() -= (2.0 / vv) * v * w;
}

// Plane rotation in span{from, to} taking from/|from| to to/|to|. Requires
// <from|to> real and non-negative.
void rotate_left(MatrixXcd& m, const VectorXcd& from, const VectorXcd& to) {
  const double nf = from.norm(), nt = to.norm();
  if (nf == 0.0 || nt == 0.0) return;
  const VectorXcd e1 = from / nf;
  VectorXcd f = to / nt;
  double c = e1.dot(f).real();
  for (int pass = 0; pass < 2; ++pass) f -= e1.dot(f) * e1;
  double s = f.norm();
  if (s == 0.0) return;
  const VectorXcd e2 = f / s;
  const double r = std::hypot(c, s);
  c /= r;
  s /= r;
  const Eigen::RowVectorXcd w1 = e1.adjoint() * m;
  const Eigen::RowVectorXcd w2 = e2.adjoint() * m;
  m.noalias() += e1 * ((c - 1.0) * w1 - s * w2);
  m.noalias() += e2 * (s * w1 + (c - 1.0) * w2);
}

// Unit-modulus factor p with <to| p from> real and non-negative.
std::complex<double> alignment_phase(const VectorXcd& from, const VectorXcd& to) {
  const std::complex<double> z = to.dot(from);  // <to|from>
  const double mag = std::abs(z);
  return mag > 0.0 ? std::conj(z) / mag : std::complex<double>(1.0, 0.0);
}

// Left-multiplies `u` by a unitary taking `from` to `to` while fixing every
// vector orthogonal to both `from` and `to`: a phase on the `from` direction
// followed by the reflection across the mediator hyperplane.
void map_vector(MatrixXcd& u, const VectorXcd& from, const VectorXcd& to) {
  const double norm = from.norm();
  if (norm == 0.0) return;
  const VectorXcd dir = from / norm;
  const std::complex<double> phase = alignment_phase(from, to);
  // (1 + (phase - 1) |dir><dir|) u
  const Eigen::RowVectorXcd w = dir.adjoint() * u;
  u.noalias() += (phase - 1.0) * dir * w;
  const VectorXcd moved = phase * from;
  const VectorXcd v = moved - to;
  if (v.norm() > kReflectionGuard * to.norm()) {
    reflect_left(u, v);
  } else {
    rotate_left(u, moved, to);
  }
}

MatrixXcd colinear_witness(const VectorXcd& a, const VectorXcd& b, const VectorXcd& a2,
                           const VectorXcd& b2) {
  const auto n = a.size();
  MatrixXcd u = MatrixXcd::Identity(n, n);
  const bool a_ref = a.squaredNorm() >= b.squaredNorm();
  const VectorXcd& ref = a_ref ? a : b;
  const VectorXcd& ref2 = a_ref ? a2 : b2;
  const VectorXcd& other = a_ref ? b : a;
  const VectorXcd& other2 = a_ref ? b2 : a2;
  if (ref.squaredNorm() == 0.0) return u;

  map_vector(u, ref, ref2);

  // Within the colinearity slack `other` may carry a small component orthogonal
  // to `ref`; carry it onto the target's orthogonal component with a second
  // reflection inside the complement of ref2, which leaves ref2 fixed.
  // Remainders at rounding level are noise, not directions, and are skipped.
  if (n == 1) return u;
  const VectorXcd e = ref2 / ref2.norm();
  auto perp = [&](VectorXcd v) {
    for (int pass = 0; pass < 2; ++pass) v -= e.dot(v) * e;
    return v;
  };
  const VectorXcd p = perp(u * other);
  const VectorXcd p2 = perp(other2);
  const double floor = kCompletionCutoff * std::max(other.norm(), other2.norm());
  if (std::max(p.norm(), p2.norm()) > floor) map_vector(u, p, p2);
  return u;
}

// Orthonormal basis starting with (a, b), completed from standard basis
// vectors in order of largest residual. Columns of the result.
MatrixXcd gram_schmidt_basis(const VectorXcd& a, const VectorXcd& b) {
  const auto n = a.size();
  MatrixXcd e(n, n);
  Eigen::Index filled = 0;

  auto append = [&](VectorXcd v) {
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < filled; ++i) v -= e.col(i).dot(v) * e.col(i);
    const double norm = v.norm();
    if (!(norm > 0.0)) return false;
    e.col(filled++) = v / norm;
    return true;
  };

  append(a);
  if (!append(b)) throw Error("witness_transform: Gram-Schmidt lost the second vector");

  // Squared residual norm of standard vector j is 1 - sum_i |e_i(j)|^2.
  Eigen::VectorXd captured = e.leftCols(filled).rowwise().squaredNorm();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (filled < n) {
    Eigen::Index best = -1;
    double best_res = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double res = 1.0 - captured(j);
      if (res > best_res) {
        best_res = res;
        best = j;
      }
    }
    if (best < 0) throw Error("witness_transform: basis completion ran out of candidates");
    used[static_cast<std::size_t>(best)] = true;
    if (best_res < kCompletionCutoff * kCompletionCutoff) continue;
    VectorXcd cand = VectorXcd::Zero(n);
    cand(best) = 1.0;
    if (append(std::move(cand))) captured += e.col(filled - 1).cwiseAbs2();
  }
  return e;
}

std::vector<std::vector<std::uint16_t>> monomials_up_to(std::size_t vars, unsigned max_degree) {
  std::vector<std::vector<std::uint16_t>> out;
  std::vector<std::uint16_t> cur;
  // Non-decreasing index tuples enumerate monomials without repetition.
  auto rec = [&](auto&& self, std::uint16_t start, unsigned remaining) -> void {
    if (!cur.empty()) out.push_back(cur);
    if (remaining == 0) return;
    for (std::size_t v = start; v < vars; ++v) {
      cur.push_back(static_cast<std::uint16_t>(v));
      self(self, static_cast<std::uint16_t>(v), remaining - 1);
      cur.pop_back();
    }
  };
  rec(rec, 0, max_degree);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& l, const auto& r) { return l.size() < r.size(); });
  return out;
}

struct MomentSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::size_t count = 0;

  explicit MomentSums(std::size_t m) : sum(m, 0.0), sum_sq(m, 0.0) {}

  void add(const Eigen::VectorXd& z, const std::vector<std::vector<std::uint16_t>>& monos) {
    for (std::size_t i = 0; i < monos.size(); ++i) {
      double v = 1.0;
      for (auto idx : monos[i]) v *= z(idx);
      sum[i] += v;
      sum_sq[i] += v * v;
    }
    ++count;
  }

  void merge(const MomentSums& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
    }
    count += o.count;
  }
};

Eigen::VectorXd stacked(const SampleBatch& b, const SymplecticOrthogonal& r) {
  Eigen::VectorXd z(2 * b.x.size());
  z << r.matrix() * b.x, r.matrix() * b.y;
  return z;
}

}  // namespace

SampleBatch apply_symmetrization(const SampleBatch& batch, const SymplecticOrthogonal& r) {
  if (batch.x.size() != batch.y.size()) {
    throw InvalidDimension("batch vectors differ in length");
  }
  if (static_cast<std::size_t>(batch.x.size()) != 2 * r.modes()) {
    throw InvalidDimension("transform acts on " + std::to_string(r.modes()) +
                           " modes but batch has " + std::to_string(batch.x.size() / 2));
  }
  return SampleBatch{r.matrix() * batch.x, r.matrix() * batch.y};
}

double mapping_residual(const SymplecticOrthogonal& r, const SampleBatch& source,
                        const SampleBatch& target) {
  const double scale = std::max(target.x.norm(), target.y.norm());
  const double err = std::max((r.matrix() * source.x - target.x).norm(),
                              (r.matrix() * source.y - target.y).norm());
  if (scale == 0.0) return err;
  return err / scale;
}

SymplecticOrthogonal witness_transform(const SampleBatch& source, const SampleBatch& target) {
  if (source.x.size() != target.x.size() || source.x.size() != source.y.size() ||
      target.x.size() != target.y.size() || source.x.size() == 0 || source.x.size() % 2 != 0) {
    throw InvalidDimension("witness_transform: source and target must be batches of equal size");
  }
  const InvariantTriple s = invariants(source);
  const InvariantTriple t = invariants(target);
  check_match("norm_x_sq", s.norm_x_sq, t.norm_x_sq, std::max(s.norm_x_sq, t.norm_x_sq));
  check_match("norm_y_sq", s.norm_y_sq, t.norm_y_sq, std::max(s.norm_y_sq, t.norm_y_sq));
  const double cross =
      std::sqrt(std::max(s.norm_x_sq, t.norm_x_sq) * std::max(s.norm_y_sq, t.norm_y_sq));
  check_match("dot_xy", s.dot_xy, t.dot_xy, cross);
  check_match("symp_xy", s.symp_xy, t.symp_xy, cross);

  const VectorXcd a = complexify(source.x);
  const VectorXcd b = complexify(source.y);
  const VectorXcd a2 = complexify(target.x);
  const VectorXcd b2 = complexify(target.y);

  const double overlap = std::norm(a.dot(b));
  const bool colinear = overlap >= (1.0 - kColinearSlack) * a.squaredNorm() * b.squaredNorm();

  MatrixXcd u;
  if (colinear) {
    u = colinear_witness(a, b, a2, b2);
  } else {
    const MatrixXcd e = gram_schmidt_basis(a, b);
    const MatrixXcd e2 = gram_schmidt_basis(a2, b2);
    u = e2 * e.adjoint();
  }

  SymplecticOrthogonal r = unitary_to_symplectic(ComplexUnitary::from_matrix(std::move(u)));
  const double res = mapping_residual(r, source, target);
  if (!(res <= kWitnessTolerance)) {
    throw Error("witness_transform: constructed transform misses the target (residual " +
                std::to_string(res) + ")");
  }
  return r;
}

SampleBatch batch_with_invariants(std::size_t n, const InvariantTriple& want, Rng& rng) {
  if (n == 0) throw InvalidDimension("mode count must be at least 1");
  if (want.norm_x_sq < 0.0 || want.norm_y_sq < 0.0) {
    throw DomainError("squared norms must be non-negative");
  }
  const double overlap = want.dot_xy * want.dot_xy + want.symp_xy * want.symp_xy;
  const double bound = want.norm_x_sq * want.norm_y_sq;
  if (overlap > bound * (1.0 + 1e-12)) {
    throw DomainError("requested dot/omega violate Cauchy-Schwarz");
  }
  if (n == 1 && std::abs(overlap - bound) > 1e-12 * std::max(bound, 1.0)) {
    throw DomainError("a single mode requires dot^2 + omega^2 = ||x||^2 ||y||^2");
  }
  const auto d = static_cast<Eigen::Index>(n);
  VectorXcd a = VectorXcd::Zero(d);
  VectorXcd b = VectorXcd::Zero(d);
  const double ra = std::sqrt(want.norm_x_sq);
  if (ra > 0.0) {
    a(0) = ra;
    b(0) = std::complex<double>(want.dot_xy, want.symp_xy) / ra;  // <a|b> = dot + i omega
    if (n > 1) b(1) = std::sqrt(std::max(0.0, want.norm_y_sq - overlap / want.norm_x_sq));
  } else {
    b(0) = std::sqrt(want.norm_y_sq);
  }
  const SymplecticOrthogonal r = haar_kn(n, rng);
  return apply_symmetrization(SampleBatch::make(realify(a), realify(b)), r);
}

// ---------------------------------------------------------------------------

std::string to_string(AuditStatistic s) {
  switch (s) {
    case AuditStatistic::kAliceQ: return "alice-q";
    case AuditStatistic::kBobQ: return "bob-q";
    case AuditStatistic::kQuadratureProduct: return "quadrature-product";
    case AuditStatistic::kModeOverlap: return "mode-overlap";
    case AuditStatistic::kModeSymplectic: return "mode-symplectic";
    case AuditStatistic::kAliceEnergy: return "alice-energy";
    case AuditStatistic::kBobEnergy: return "bob-energy";
  }
  return "unknown";
}

std::optional<AuditStatistic> audit_statistic_from_string(const std::string& s) {
  for (auto st : {AuditStatistic::kAliceQ, AuditStatistic::kBobQ,
                  AuditStatistic::kQuadratureProduct, AuditStatistic::kModeOverlap,
                  AuditStatistic::kModeSymplectic, AuditStatistic::kAliceEnergy,
                  AuditStatistic::kBobEnergy}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

double evaluate(AuditStatistic s, const SampleBatch& b) {
  const auto& x = b.x;
  const auto& y = b.y;
  switch (s) {
    case AuditStatistic::kAliceQ: return x(0);
    case AuditStatistic::kBobQ: return y(0);
    case AuditStatistic::kQuadratureProduct: return x(0) * y(0);
    case AuditStatistic::kModeOverlap: return x(0) * y(0) + x(1) * y(1);
    case AuditStatistic::kModeSymplectic: return x(0) * y(1) - x(1) * y(0);
    case AuditStatistic::kAliceEnergy: return x(0) * x(0) + x(1) * x(1);
    case AuditStatistic::kBobEnergy: return y(0) * y(0) + y(1) * y(1);
  }
  return 0.0;
}

AuditReport invariant_audit(const BatchSampler& first, const BatchSampler& second,
                            const AuditOptions& options) {
  if (options.trials == 0) throw PreconditionError("invariant_audit needs at least one trial");
  const std::size_t trials = options.trials;
  const std::size_t stats = options.statistics.size();

  struct Trial {
    std::vector<double> first, second;
    double change = 0.0;
    std::size_t modes = 0;
    InvariantTriple inv_first, inv_second;
  };
  std::vector<Trial> out(trials);

  parallel_for(trials, options.workers, [&](std::size_t i) {
    Rng s1 = make_stream(options.seed, 4 * i);
    Rng s2 = make_stream(options.seed, 4 * i + 1);
    Rng r1 = make_stream(options.seed, 4 * i + 2);
    Rng r2 = make_stream(options.seed, 4 * i + 3);
    const SampleBatch b1 = first(s1);
    const SampleBatch b2 = second(s2);
    if (b1.modes() != b2.modes()) throw InvalidDimension("audit ensembles differ in mode count");
    const SampleBatch t1 = apply_symmetrization(b1, haar_kn(b1.modes(), r1));
    const SampleBatch t2 = apply_symmetrization(b2, haar_kn(b2.modes(), r2));
    Trial& t = out[i];
    t.modes = b1.modes();
    t.inv_first = invariants(b1);
    t.inv_second = invariants(b2);
    t.change = std::max(invariant_relative_change(t.inv_first, invariants(t1)),
                        invariant_relative_change(t.inv_second, invariants(t2)));
    t.first.resize(stats);
    t.second.resize(stats);
    for (std::size_t k = 0; k < stats; ++k) {
      t.first[k] = evaluate(options.statistics[k], t1);
      t.second[k] = evaluate(options.statistics[k], t2);
    }
  });

  AuditReport rep;
  rep.modes = out.front().modes;
  rep.trials = trials;
  rep.underpowered = trials < 100;
  rep.first_invariants = out.front().inv_first;
  rep.second_invariants = out.front().inv_second;
  for (const auto& t : out) rep.max_invariant_change = std::max(rep.max_invariant_change, t.change);

  for (std::size_t k = 0; k < stats; ++k) {
    std::vector<double> u(trials), v(trials);
    for (std::size_t i = 0; i < trials; ++i) {
      u[i] = out[i].first[k];
      v[i] = out[i].second[k];
    }
    StatisticComparison c;
    c.statistic = to_string(options.statistics[k]);
    double su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      su += u[i];
      sv += v[i];
    }
    c.mean_first = su / static_cast<double>(trials);
    c.mean_second = sv / static_cast<double>(trials);
    const KsResult ks = ks_two_sample(std::move(u), std::move(v));
    c.ks_statistic = ks.statistic;
    c.p_value = ks.p_value;
    rep.comparisons.push_back(c);
  }
  return rep;
}

// ---------------------------------------------------------------------------

Design roots_of_unity_design(std::size_t order) {
  if (order == 0) throw PreconditionError("design must be non-empty");
  Design d;
  d.name = "roots-of-unity-" + std::to_string(order);
  for (std::size_t j = 0; j < order; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(order);
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::polar(1.0, th);
    d.elements.push_back(ComplexUnitary::from_matrix(std::move(m)));
  }
  return d;
}

Design identity_design(std::size_t n) {
  Design d;
  d.name = "identity";
  d.elements.push_back(ComplexUnitary::identity(n));
  return d;
}

Design haar_sample_design(std::size_t n, std::size_t count, Rng& rng) {
  if (count == 0) throw PreconditionError("design must be non-empty");
  Design d;
  d.name = "haar-sample-" + std::to_string(count);
  d.elements.reserve(count);
  for (std::size_t j = 0; j < count; ++j) d.elements.push_back(haar_unitary(n, rng));
  return d;
}

std::vector<std::complex<double>> phase_moments(const Design& design, int max_order) {
  if (design.elements.empty()) throw PreconditionError("design must be non-empty");
  if (design.modes() != 1) throw InvalidDimension("phase moments are defined for n = 1");
  if (max_order < 0) throw PreconditionError("max_order must be non-negative");
  std::vector<std::complex<double>> out(static_cast<std::size_t>(2 * max_order + 1));
  for (int m = -max_order; m <= max_order; ++m) {
    std::complex<double> s = 0.0;
    for (const auto& u : design.elements) s += std::pow(u.matrix()(0, 0), m);
    out[static_cast<std::size_t>(m + max_order)] = s / static_cast<double>(design.elements.size());
  }
  return out;
}

std::string to_string(HaarReference r) {
  return r == HaarReference::kExactU1 ? "exact-u1" : "monte-carlo";
}

std::vector<double> design_moments(const SampleBatch& batch, const Design& design,
                                   unsigned max_degree) {
  if (design.elements.empty()) throw PreconditionError("design must be non-empty");
  if (batch.modes() != design.modes()) throw InvalidDimension("batch and design disagree on n");
  const auto monos = monomials_up_to(4 * design.modes(), max_degree);
  MomentSums sums(monos.size());
  for (const auto& u : design.elements) sums.add(stacked(batch, unitary_to_symplectic(u)), monos);
  for (auto& v : sums.sum) v /= static_cast<double>(sums.count);
  return sums.sum;
}

DesignReport finite_design_average(const BatchSampler& sampler, std::size_t batches,
                                   const Design& design, unsigned k, HaarReference reference,
                                   std::uint64_t seed, unsigned workers) {
  if (design.elements.empty()) throw PreconditionError("design must be non-empty");
  if (k == 0) throw PreconditionError("design degree k must be at least 1");
  if (batches == 0) throw PreconditionError("need at least one batch");
  const std::size_t n = design.modes();
  if (reference == HaarReference::kExactU1 && n != 1) {
    throw PreconditionError("exact U(1) reference requires n = 1");
  }
  const unsigned max_degree = 2 * k;
  const auto monos = monomials_up_to(4 * n, max_degree);
  const std::size_t m = monos.size();
  if (m > kMaxDesignMonomials) {
    throw PreconditionError("too many monomials (" + std::to_string(m) + "); reduce n or k");
  }
  const std::size_t dsize = design.elements.size();
  if ((2 * batches + dsize) * m > kMaxDesignCells) {
    throw PreconditionError("design comparison needs too much memory; reduce batches or design size");
  }

  std::vector<SymplecticOrthogonal> design_r;
  design_r.reserve(dsize);
  for (const auto& u : design.elements) design_r.push_back(unitary_to_symplectic(u));

  // Shifted equispaced nodes integrate trigonometric polynomials of degree
  // < nodes exactly; symmetrized monomials of degree d have degree d in theta.
  std::vector<SymplecticOrthogonal> exact_r;
  if (reference == HaarReference::kExactU1) {
    const std::size_t nodes = 2 * max_degree + 1;
    for (std::size_t j = 0; j < nodes; ++j) {
      const double th = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) /
                        static_cast<double>(nodes);
      Eigen::MatrixXcd u(1, 1);
      u(0, 0) = std::polar(1.0, th);
      exact_r.push_back(unitary_to_symplectic(ComplexUnitary::from_matrix(std::move(u))));
    }
  }

  // Per-batch averages over the design (d) and over the reference (h).
  std::vector<SampleBatch> data(batches);
  std::vector<double> d(batches * m), h(batches * m);
  parallel_for(batches, workers, [&](std::size_t b) {
    Rng data_rng = make_stream(seed, 2 * b);
    Rng haar_rng = make_stream(seed, 2 * b + 1);
    data[b] = sampler(data_rng);
    if (data[b].modes() != n) throw InvalidDimension("sampler and design disagree on n");
    MomentSums ds(m), hs(m);
    for (const auto& r : design_r) ds.add(stacked(data[b], r), monos);
    if (reference == HaarReference::kExactU1) {
      for (const auto& r : exact_r) hs.add(stacked(data[b], r), monos);
    } else {
      for (std::size_t j = 0; j < dsize; ++j) hs.add(stacked(data[b], haar_kn(n, haar_rng)), monos);
    }
    for (std::size_t i = 0; i < m; ++i) {
      d[b * m + i] = ds.sum[i] / static_cast<double>(ds.count);
      h[b * m + i] = hs.sum[i] / static_cast<double>(hs.count);
    }
  });

  // Per-element averages over all batches. Their spread is the error a
  // design of this size carries even with unlimited data, which a Haar
  // sample of the same size would also carry.
  std::vector<double> element(dsize * m, 0.0);
  if (reference == HaarReference::kMonteCarlo && dsize > 1) {
    parallel_for(dsize, workers, [&](std::size_t j) {
      MomentSums es(m);
      for (std::size_t b = 0; b < batches; ++b) es.add(stacked(data[b], design_r[j]), monos);
      for (std::size_t i = 0; i < m; ++i) {
        element[j * m + i] = es.sum[i] / static_cast<double>(es.count);
      }
    });
  }

  DesignReport rep;
  rep.design = design.name;
  rep.modes = n;
  rep.design_size = dsize;
  rep.batches = batches;
  rep.k = k;
  rep.reference = reference;
  const double nb = static_cast<double>(batches);
  const double nd = static_cast<double>(dsize);
  for (unsigned deg = 1; deg <= max_degree; ++deg) {
    DegreeDiscrepancy dd;
    dd.degree = deg;
    double max_z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (monos[i].size() != deg) continue;
      ++dd.monomials;
      double mean = 0.0;
      for (std::size_t b = 0; b < batches; ++b) mean += d[b * m + i] - h[b * m + i];
      mean /= nb;
      dd.max_abs = std::max(dd.max_abs, std::abs(mean));
      if (reference != HaarReference::kMonteCarlo) continue;
      double var_b = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        const double e = d[b * m + i] - h[b * m + i] - mean;
        var_b += e * e;
      }
      var_b = batches > 1 ? var_b / (nb - 1.0) : 0.0;
      double var_j = 0.0;
      if (dsize > 1) {
        double mj = 0.0;
        for (std::size_t j = 0; j < dsize; ++j) mj += element[j * m + i];
        mj /= nd;
        for (std::size_t j = 0; j < dsize; ++j) {
          const double e = element[j * m + i] - mj;
          var_j += e * e;
        }
        var_j /= nd - 1.0;
      }
      const double se = std::sqrt(var_b / nb + var_j / nd);
      const double z = se > 0.0 ? std::abs(mean) / se : (mean == 0.0 ? 0.0 : INFINITY);
      max_z = std::max(max_z, z);
    }
    if (reference == HaarReference::kMonteCarlo) dd.max_standardized = max_z;
    rep.per_degree.push_back(dd);
  }
  return rep;
}

}  // namespace cvsym
