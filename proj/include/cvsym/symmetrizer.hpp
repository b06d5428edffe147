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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvsym/batch.hpp"
#include "cvsym/phase_space.hpp"
#include "cvsym/random.hpp"

namespace cvsym {

// (Rx, Ry). Throws InvalidDimension if R and the batch disagree on n.
SampleBatch apply_symmetrization(const SampleBatch& batch, const SymplecticOrthogonal& r);

// Relative tolerance on matching invariants and on the returned mapping.
inline constexpr double kWitnessTolerance = 1e-8;

// Returns R in K(n) with R x_src = x_tgt and R y_src = y_tgt.
//
// Both batches must agree on all four invariants (||x||^2, ||y||^2, x.y and
// omega(x,y)) to kWitnessTolerance; a mismatch throws PreconditionError naming
// the quantity. omega is needed because the basis change below maps b onto b'
// only when the full complex product <a|b> matches, and Im<a|b> = omega.
//
// Works on complex amplitudes a = complexify(x), b = complexify(y):
//   * a, b colinear (including zero vectors): a phase followed by the
//     Householder reflection across the mediator hyperplane of a and a'.
//   * otherwise: modified Gram-Schmidt (two passes) on (a, b, e_j...) and
//     (a', b', e_j...), with the completion vectors e_j picked by largest
//     residual; U is the basis change between the two orthonormal bases.
// The result is realified with unitary_to_symplectic and checked before
// returning; a failed check throws Error.
SymplecticOrthogonal witness_transform(const SampleBatch& source, const SampleBatch& target);

// max(||R x - x'||, ||R y - y'||) / max(||x'||, ||y'||); 0 when all are zero.
double mapping_residual(const SymplecticOrthogonal& r, const SampleBatch& source,
                        const SampleBatch& target);

// Random batch on n modes carrying exactly the requested invariants, in a
// Haar-random orientation. Throws DomainError when the values are infeasible
// (dot^2 + omega^2 > ||x||^2 ||y||^2, or n = 1 without equality).
SampleBatch batch_with_invariants(std::size_t n, const InvariantTriple& want, Rng& rng);

using BatchSampler = std::function<SampleBatch(Rng&)>;

// ---------------------------------------------------------------------------
// Invariant audit

// Built-in statistics of a symmetrized batch, all taken on mode 1.
enum class AuditStatistic {
  kAliceQ,          // x'_1
  kBobQ,            // y'_1
  kQuadratureProduct,  // x'_1 y'_1
  kModeOverlap,     // x'_1 y'_1 + x'_2 y'_2
  kModeSymplectic,  // x'_1 y'_2 - x'_2 y'_1
  kAliceEnergy,     // x'_1^2 + x'_2^2
  kBobEnergy,       // y'_1^2 + y'_2^2
};

std::string to_string(AuditStatistic s);
std::optional<AuditStatistic> audit_statistic_from_string(const std::string& s);
double evaluate(AuditStatistic s, const SampleBatch& batch);

struct AuditOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<AuditStatistic> statistics{AuditStatistic::kAliceQ,
                                         AuditStatistic::kQuadratureProduct,
                                         AuditStatistic::kModeOverlap,
                                         AuditStatistic::kModeSymplectic};
};

struct StatisticComparison {
  std::string statistic;
  double mean_first = 0.0;
  double mean_second = 0.0;
  double ks_statistic = 0.0;
  double p_value = 1.0;
};

struct AuditReport {
  std::size_t modes = 0;
  std::size_t trials = 0;
  bool underpowered = false;  // trials < 100
  InvariantTriple first_invariants;   // of the first trial's unsymmetrized batches
  InvariantTriple second_invariants;
  double max_invariant_change = 0.0;  // over every symmetrization performed
  std::vector<StatisticComparison> comparisons;
};

// Draws `trials` batches from each ensemble, symmetrizes every batch with an
// independent Haar R, and compares the chosen statistics across ensembles
// with a two-sample KS test. Trial i uses streams derived from (seed, i).
AuditReport invariant_audit(const BatchSampler& first, const BatchSampler& second,
                            const AuditOptions& options);

// ---------------------------------------------------------------------------
// Finite designs

struct Design {
  std::string name;
  std::vector<ComplexUnitary> elements;

  std::size_t modes() const { return elements.empty() ? 0 : elements.front().modes(); }
};

// {exp(2 pi i j / order)} as 1x1 unitaries.
Design roots_of_unity_design(std::size_t order);
Design identity_design(std::size_t n);
// `count` Haar samples used as an (approximate) design.
Design haar_sample_design(std::size_t n, std::size_t count, Rng& rng);

// Average of u^m over the design for m in [-max_order, max_order], n = 1 only.
// Entry max_order + m holds order m.
std::vector<std::complex<double>> phase_moments(const Design& design, int max_order);

enum class HaarReference {
  kMonteCarlo,  // fresh Haar draws, as many per batch as the design has elements
  kExactU1,     // n = 1: equispaced quadrature, exact for the degrees involved
};

struct DegreeDiscrepancy {
  unsigned degree = 0;
  std::size_t monomials = 0;
  double max_abs = 0.0;
  // |design - haar| over the combined standard error; empty for exact references.
  std::optional<double> max_standardized;
};

struct DesignReport {
  std::string design;
  std::size_t modes = 0;
  std::size_t design_size = 0;
  std::size_t batches = 0;
  unsigned k = 0;
  HaarReference reference = HaarReference::kMonteCarlo;
  std::vector<DegreeDiscrepancy> per_degree;  // degrees 1 .. 2k
};

inline constexpr std::size_t kMaxDesignMonomials = 200000;
inline constexpr std::size_t kMaxDesignCells = 50000000;  // doubles held at once

// Averages over the design of every monomial of degree 1..max_degree in the
// stacked symmetrized vector (R x, R y). Monomials are listed by degree, and
// within a degree as non-decreasing index tuples in lexicographic order.
std::vector<double> design_moments(const SampleBatch& batch, const Design& design,
                                   unsigned max_degree);

// Monomial moments of degree <= 2k in the 4n coordinates of symmetrized data,
// averaged (i) over the design and (ii) over the Haar reference, for
// `batches` batches drawn from `sampler`. Batch b uses streams (seed, 2b) for
// data and (seed, 2b + 1) for Haar draws. The Monte Carlo standard error adds
// the between-batch spread of the difference to the spread across design
// elements over the design size, i.e. it treats the design as a sample of
// its size. Throws PreconditionError above kMaxDesignMonomials monomials or
// kMaxDesignCells stored values ((2 batches + design size) x monomials).
DesignReport finite_design_average(const BatchSampler& sampler, std::size_t batches,
                                   const Design& design, unsigned k, HaarReference reference,
                                   std::uint64_t seed, unsigned workers = 1);

std::string to_string(HaarReference r);

}  // namespace cvsym
