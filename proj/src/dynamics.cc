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

#include "cdseg/dynamics.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

namespace cdseg {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("SolverConfig: tolerance must be positive");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  }
  if (!(alpha_margin > 1.0)) {
    throw std::invalid_argument("SolverConfig: alpha_margin must exceed 1");
  }
  if (!(alpha_floor > 0.0)) {
    throw std::invalid_argument("SolverConfig: alpha_floor must be positive");
  }
}

namespace {

void check_vertex_ids(const VertexSet& set, int n, const char* what) {
  for (int v : set) {
    if (v < 0 || v >= n) {
      throw std::out_of_range(std::string(what) + ": vertex " +
                              std::to_string(v) + " outside graph");
    }
  }
}

// Compressed rows of one connected block of the principal submatrix.
struct SparseBlock {
  std::vector<int> row_start;
  std::vector<int> col;
  std::vector<double> val;
  bool non_negative = true;
  double max_abs_row_sum = 0.0;
};

double dense_block_lambda_max(const SparseBlock& block) {
  const int m = static_cast<int>(block.row_start.size()) - 1;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int p = block.row_start[i]; p < block.row_start[i + 1]; ++p) {
      dense(i, block.col[p]) = block.val[p];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("lambda_max_principal: dense eigensolver failed on a block of " +
                           std::to_string(m) + " vertices");
  }
  return es.eigenvalues().maxCoeff();
}

double block_lambda_max(const SparseBlock& block) {
  const int m = static_cast<int>(block.row_start.size()) - 1;
  const double rho = std::max(block.max_abs_row_sum, 1e-300);
  // Non-negative blocks have spectrum in [-lambda_max, lambda_max], so any
  // positive shift makes lambda_max dominant; general blocks need a shift
  // that makes the whole spectrum non-negative.
  const double shift = block.non_negative ? 0.25 * rho : rho;

  std::vector<double> v(m), w(m);
  for (int i = 0; i < m; ++i) v[i] = 1.0 + 1e-3 * (i % 7);
  double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (double& e : v) e /= norm;

  const double tol = 1e-10 * (rho + shift);
  const int max_iter = std::max(20000, 200 * m);
  double mu = 0.0;
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < m; ++i) {
      double acc = shift * v[i];
      for (int p = block.row_start[i]; p < block.row_start[i + 1]; ++p) {
        acc += block.val[p] * v[block.col[p]];
      }
      w[i] = acc;
    }
    mu = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
    double r2 = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = w[i] - mu * v[i];
      r2 += d * d;
    }
    residual = std::sqrt(r2);
    if (residual <= tol) return mu - shift;
    norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (norm == 0.0) return -shift;
    for (int i = 0; i < m; ++i) v[i] = w[i] / norm;
  }
  // The Rayleigh quotient lies within `residual` of an eigenvalue.
  if (residual <= 1e-7 * (rho + shift)) return mu - shift;
  // Nearly equal leading eigenvalues stall the iteration; solve densely.
  return dense_block_lambda_max(block);
}

// Invasion dynamics state: x, g = Bx and the payoff x'Bx.
struct InvasionState {
  std::vector<double> x;
  std::vector<double> g;
  double payoff = 0.0;

  void refresh(const Matrix& b) {
    const int n = b.size();
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= sum;
    g.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto row = b.row(i);
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += row[j] * x[j];
      g[i] = acc;
    }
    payoff = std::inner_product(x.begin(), x.end(), g.begin(), 0.0);
  }
};

struct Invader {
  int index = -1;
  bool co_strategy = false;
  double infectivity = 0.0;
};

// Most infective pure strategy or co-strategy; ties go to the smaller index.
Invader select_invader(const InvasionState& s) {
  Invader best;
  const int n = static_cast<int>(s.x.size());
  for (int i = 0; i < n; ++i) {
    const double r = s.g[i] - s.payoff;
    if (r > best.infectivity) {
      best = {i, false, r};
    } else if (-r > best.infectivity && s.x[i] > 0.0 && s.x[i] < 1.0) {
      best = {i, true, -r};
    }
  }
  return best;
}

void invade(const Matrix& b, InvasionState& s, const Invader& inv) {
  const int n = static_cast<int>(s.x.size());
  const int i = inv.index;
  const double bii = b(i, i);
  const auto col = b.row(i);  // symmetric: column i == row i
  if (!inv.co_strategy) {
    // y = e_i, d = y - x
    const double dbx = s.g[i] - s.payoff;
    const double dbd = bii - 2.0 * s.g[i] + s.payoff;
    const double delta = dbd < 0.0 ? std::min(-dbx / dbd, 1.0) : 1.0;
    for (int j = 0; j < n; ++j) {
      s.x[j] *= 1.0 - delta;
      s.g[j] = (1.0 - delta) * s.g[j] + delta * col[j];
    }
    s.x[i] += delta;
  } else {
    // y = (x - x_i e_i) / (1 - x_i), d = c (x - e_i) with c = x_i / (1 - x_i)
    const double xi = s.x[i];
    const double c = xi / (1.0 - xi);
    const double dbx = c * (s.payoff - s.g[i]);
    const double dbd = c * c * (s.payoff - 2.0 * s.g[i] + bii);
    const double delta = dbd < 0.0 ? std::min(-dbx / dbd, 1.0) : 1.0;
    const double mu = delta * c;
    for (int j = 0; j < n; ++j) {
      s.x[j] *= 1.0 + mu;
      s.g[j] = (1.0 + mu) * s.g[j] - mu * col[j];
    }
    s.x[i] = delta >= 1.0 ? 0.0 : (1.0 - delta) * xi;
  }
  for (double& v : s.x) v = std::max(v, 0.0);
  s.payoff = std::inner_product(s.x.begin(), s.x.end(), s.g.begin(), 0.0);
}

constexpr int kRefreshInterval = 256;

void check_program_input(const Matrix& b, const SimplexVector& x) {
  if (b.size() != x.size()) {
    throw std::invalid_argument("payoff matrix and state differ in size");
  }
}

}  // namespace

double lambda_max_principal(const Matrix& a, const VertexSet& excluded) {
  const int n = a.size();
  check_vertex_ids(excluded, n, "lambda_max_principal");
  std::vector<int> keep;
  for (int v = 0; v < n; ++v) {
    if (!contains(excluded, v)) keep.push_back(v);
  }
  if (keep.empty()) {
    throw std::invalid_argument(
        "lambda_max_principal: complement of excluded set is empty");
  }

  // Connected components of the kept vertices under non-zero entries.
  const int m = static_cast<int>(keep.size());
  std::vector<int> component(m, -1);
  int component_count = 0;
  std::vector<int> stack;
  for (int start = 0; start < m; ++start) {
    if (component[start] >= 0) continue;
    component[start] = component_count;
    stack.push_back(start);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      const auto row = a.row(keep[u]);
      for (int v = 0; v < m; ++v) {
        if (component[v] < 0 && v != u && row[keep[v]] != 0.0) {
          component[v] = component_count;
          stack.push_back(v);
        }
      }
    }
    ++component_count;
  }

  double best = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < component_count; ++c) {
    std::vector<int> members;
    for (int u = 0; u < m; ++u) {
      if (component[u] == c) members.push_back(keep[u]);
    }
    if (members.size() == 1) {
      best = std::max(best, a(members[0], members[0]));
      continue;
    }
    SparseBlock block;
    block.row_start.push_back(0);
    for (int r : members) {
      double row_sum = 0.0;
      for (std::size_t q = 0; q < members.size(); ++q) {
        const double val = a(r, members[q]);
        if (val == 0.0) continue;
        block.col.push_back(static_cast<int>(q));
        block.val.push_back(val);
        block.non_negative = block.non_negative && val >= 0.0;
        row_sum += std::abs(val);
      }
      block.max_abs_row_sum = std::max(block.max_abs_row_sum, row_sum);
      block.row_start.push_back(static_cast<int>(block.col.size()));
    }
    best = std::max(best, block_lambda_max(block));
  }
  return best;
}

double lambda_max_principal(const AffinityGraph& a, const VertexSet& excluded) {
  return lambda_max_principal(a.weights(), excluded);
}

CdsProgram build_program(const Matrix& a, const VertexSet& seeds,
                         const SolverConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) throw std::invalid_argument("build_program: no seeds");
  check_vertex_ids(seeds, a.size(), "build_program");
  CdsProgram program;
  program.seeds = seeds;
  program.lambda_max = static_cast<int>(seeds.size()) == a.size()
                           ? 0.0
                           : lambda_max_principal(a, seeds);
  program.alpha =
      cfg.alpha_margin * std::max(program.lambda_max, cfg.alpha_floor);
  program.payoff = a;
  for (int i = 0; i < a.size(); ++i) {
    if (!contains(seeds, i)) program.payoff(i, i) = a(i, i) - program.alpha;
  }
  return program;
}

CdsProgram build_program(const AffinityGraph& a, const VertexSet& seeds,
                         const SolverConfig& cfg) {
  return build_program(a.weights(), seeds, cfg);
}

SimplexVector inimdyn_step(const Matrix& payoff, const SimplexVector& x,
                           double tolerance) {
  check_program_input(payoff, x);
  InvasionState state{x.values(), {}, 0.0};
  state.refresh(payoff);
  const Invader inv = select_invader(state);
  if (inv.index < 0 || inv.infectivity <= tolerance) return x;
  invade(payoff, state, inv);
  const double sum = std::accumulate(state.x.begin(), state.x.end(), 0.0);
  for (double& v : state.x) v /= sum;
  return SimplexVector(std::move(state.x));
}

SolveOutcome inimdyn_run(const Matrix& payoff, const SimplexVector& x0,
                         const SolverConfig& cfg,
                         const TrajectoryObserver& observer) {
  cfg.validate();
  check_program_input(payoff, x0);
  InvasionState state{x0.values(), {}, 0.0};
  state.refresh(payoff);
  if (observer) observer(0, state.x, state.payoff);

  SolveOutcome out;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const Invader inv = select_invader(state);
    if (inv.index < 0 || inv.infectivity <= cfg.tolerance) {
      out.converged = true;
      break;
    }
    invade(payoff, state, inv);
    if ((it + 1) % kRefreshInterval == 0) state.refresh(payoff);
    if (observer) observer(it + 1, state.x, state.payoff);
  }
  if (!out.converged) {
    const Invader inv = select_invader(state);
    out.converged = inv.index < 0 || inv.infectivity <= cfg.tolerance;
  }
  state.refresh(payoff);
  out.iterations = it;
  out.payoff = state.payoff;
  out.state = SimplexVector(std::move(state.x));
  return out;
}

SimplexVector support_characteristic_vector(const Matrix& a,
                                            const VertexSet& support,
                                            std::span<const double> fallback) {
  const int n = a.size();
  const int m = static_cast<int>(support.size());
  if (m == 0) throw std::invalid_argument("characteristic vector: empty support");
  check_vertex_ids(support, n, "support_characteristic_vector");
  if (m == 1) return SimplexVector::vertex(n, support[0]);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) kkt(r, c) = a(support[r], support[c]);
    kkt(r, m) = -1.0;
    kkt(m, r) = 1.0;
  }
  rhs(m) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  lu.setThreshold(1e-10);
  if (lu.isInvertible()) {
    const Eigen::VectorXd sol = lu.solve(rhs);
    const bool interior = (sol.head(m).array() > 0.0).all();
    if (interior && (kkt * sol - rhs).lpNorm<Eigen::Infinity>() < 1e-9) {
      std::vector<double> x(n, 0.0);
      double sum = 0.0;
      for (int r = 0; r < m; ++r) sum += sol(r);
      for (int r = 0; r < m; ++r) x[support[r]] = sol(r) / sum;
      return SimplexVector(std::move(x));
    }
  }
  std::vector<double> x(n, 0.0);
  double sum = 0.0;
  for (int v : support) sum += fallback[v];
  for (int v : support) x[v] = fallback[v] / sum;
  return SimplexVector(std::move(x));
}

DominantSetResult inimdyn_solve(const CdsProgram& program,
                                const SimplexVector& x0,
                                const SolverConfig& cfg,
                                const TrajectoryObserver& observer) {
  SolveOutcome outcome = inimdyn_run(program.payoff, x0, cfg, observer);
  DominantSetResult result;
  result.support = support_of(outcome.state.values());

  // Recover the unshifted affinities from the payoff matrix.
  Matrix a = program.payoff;
  for (int i = 0; i < a.size(); ++i) {
    if (!contains(program.seeds, i)) a(i, i) += program.alpha;
  }
  result.chi = support_characteristic_vector(a, result.support,
                                             outcome.state.values());
  result.value = quadratic_form(a, result.chi.values());
  result.payoff = outcome.payoff;
  result.iterations = outcome.iterations;
  result.converged = outcome.converged;
  result.state = std::move(outcome.state);
  return result;
}

SimplexVector replicator_step(const Matrix& m, const SimplexVector& x) {
  check_program_input(m, x);
  const int n = m.size();
  std::vector<double> mx(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto row = m.row(i);
    for (int j = 0; j < n; ++j) mx[i] += row[j] * x[j];
  }
  const double payoff =
      std::inner_product(x.values().begin(), x.values().end(), mx.begin(), 0.0);
  if (!(payoff > 0.0)) return x;
  std::vector<double> next(n);
  for (int i = 0; i < n; ++i) next[i] = x[i] * mx[i] / payoff;
  const double sum = std::accumulate(next.begin(), next.end(), 0.0);
  for (double& v : next) v /= sum;
  return SimplexVector(std::move(next));
}

CdsCollection extract_cds_collection(const AffinityGraph& a,
                                     const VertexSet& seeds,
                                     const SolverConfig& cfg) {
  cfg.validate();
  if (seeds.empty()) {
    throw std::invalid_argument("extract_cds_collection: no seeds");
  }
  const int n = a.size();
  check_vertex_ids(seeds, n, "extract_cds_collection");

  CdsCollection out;
  std::vector<int> working(n);
  std::iota(working.begin(), working.end(), 0);
  VertexSet remaining = seeds;

  for (std::size_t round = 0; !remaining.empty() && round < seeds.size();
       ++round) {
    const Matrix sub = a.weights().principal_submatrix(working);
    VertexSet local_seeds;
    for (int s : remaining) {
      auto it = std::lower_bound(working.begin(), working.end(), s);
      local_seeds.push_back(static_cast<int>(it - working.begin()));
    }
    const CdsProgram program = build_program(sub, local_seeds, cfg);
    DominantSetResult local = inimdyn_solve(
        program, SimplexVector::uniform(static_cast<int>(working.size())), cfg);

    DominantSetResult global;
    std::vector<double> chi(n, 0.0), state(n, 0.0);
    for (std::size_t p = 0; p < working.size(); ++p) {
      chi[working[p]] = local.chi[static_cast<int>(p)];
      state[working[p]] = local.state[static_cast<int>(p)];
    }
    for (int p : local.support) global.support.push_back(working[p]);
    global.chi = SimplexVector(std::move(chi));
    global.state = SimplexVector(std::move(state));
    global.value = local.value;
    global.payoff = local.payoff;
    global.iterations = local.iterations;
    global.converged = local.converged;
    if (!global.converged) ++out.unconverged;

    std::vector<int> next_working;
    std::set_difference(working.begin(), working.end(), global.support.begin(),
                        global.support.end(), std::back_inserter(next_working));
    working = std::move(next_working);
    VertexSet next_remaining;
    std::set_difference(remaining.begin(), remaining.end(),
                        global.support.begin(), global.support.end(),
                        std::back_inserter(next_remaining));
    remaining = std::move(next_remaining);
    out.sets.push_back(std::move(global));
  }
  out.uncovered_seeds = std::move(remaining);
  return out;
}

}  // namespace cdseg
