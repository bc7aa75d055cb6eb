/* Copyright 2026 The cdseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Constrained dominant sets: the alpha-shifted quadratic program over the
// simplex and its solution by infection/immunization dynamics.
//
// For seeds S and alpha > lambda_max(A restricted to V\S), every local
// maximizer of x'(A - alpha * I_{V\S})x on the simplex has a support that
// meets S. The collection extractor repeatedly solves that program and peels
// the found support off the graph until every seed is covered.

#ifndef CDSEG_DYNAMICS_H_
#define CDSEG_DYNAMICS_H_

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cdseg/graph_core.h"

namespace cdseg {

// Raised when an iterative routine exhausts its iteration budget without
// meeting its stopping rule.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double tolerance = 1e-7;   // epsilon-Nash threshold on max infectivity
  int max_iterations = 10000;
  double alpha_margin = 1.01;
  double alpha_floor = 1e-4;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct CdsProgram {
  VertexSet seeds;
  double alpha = 0.0;
  double lambda_max = 0.0;  // of the non-seed principal submatrix
  Matrix payoff;            // A - alpha * diag(1 on V\S, 0 on S)

  int size() const { return payoff.size(); }
};

// Largest eigenvalue of the principal submatrix of a symmetric matrix on the
// rows/columns not in `excluded`. Shifted power iteration run per connected
// component; a component that stalls at the iteration cap is solved densely.
// Throws std::invalid_argument when nothing remains.
double lambda_max_principal(const Matrix& a, const VertexSet& excluded);
double lambda_max_principal(const AffinityGraph& a, const VertexSet& excluded);

// alpha = alpha_margin * max(lambda_max, alpha_floor). A program whose seeds
// cover every vertex has no penalty term and uses lambda_max = 0.
CdsProgram build_program(const Matrix& a, const VertexSet& seeds,
                         const SolverConfig& cfg);
CdsProgram build_program(const AffinityGraph& a, const VertexSet& seeds,
                         const SolverConfig& cfg);

// One invasion step: pick the most infective pure strategy or co-strategy
// and move towards it by the payoff-optimal share. Returns x unchanged when
// no strategy is infective by more than `tolerance`.
SimplexVector inimdyn_step(const Matrix& payoff, const SimplexVector& x,
                           double tolerance = 0.0);

// Observer called with (iteration, state, payoff) after initialization and
// after every step.
using TrajectoryObserver =
    std::function<void(int, std::span<const double>, double)>;

struct SolveOutcome {
  SimplexVector state;
  double payoff = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Runs invasion steps until the largest infectivity drops to
// cfg.tolerance. On budget exhaustion returns the last state with
// converged = false.
SolveOutcome inimdyn_run(const Matrix& payoff, const SimplexVector& x0,
                         const SolverConfig& cfg,
                         const TrajectoryObserver& observer = {});

// Characteristic vector of `support` computed from the optimality system
// A_S x = c 1, 1'x = 1. Falls back to the renormalized `fallback` restricted
// to the support when the system is singular or its solution leaves the
// relative interior.
SimplexVector support_characteristic_vector(const Matrix& a,
                                            const VertexSet& support,
                                            std::span<const double> fallback);

// Solves the program from x0 and reads off the support; `chi` is the
// characteristic vector of the support under the unshifted affinities.
DominantSetResult inimdyn_solve(const CdsProgram& program,
                                const SimplexVector& x0,
                                const SolverConfig& cfg,
                                const TrajectoryObserver& observer = {});

// x_i <- x_i (M x)_i / x'M x for a non-negative M. Verification utility.
SimplexVector replicator_step(const Matrix& m, const SimplexVector& x);

struct CdsCollection {
  std::vector<DominantSetResult> sets;  // supports in original vertex ids
  VertexSet uncovered_seeds;
  int unconverged = 0;
};

// Peels constrained dominant sets until each seed lies in one of them.
// Supports are pairwise disjoint. At most |seeds| rounds.
CdsCollection extract_cds_collection(const AffinityGraph& a,
                                     const VertexSet& seeds,
                                     const SolverConfig& cfg);

}  // namespace cdseg

#endif  // CDSEG_DYNAMICS_H_
