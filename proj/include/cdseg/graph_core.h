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

// Affinity graphs over superpixels and the combinatorial dominant-set
// machinery. The recursive node weights are exponential in |S| and exist
// only to verify solver output on small graphs.

#ifndef CDSEG_GRAPH_CORE_H_
#define CDSEG_GRAPH_CORE_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cdseg {

// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<int>;
using VertexPair = std::pair<int, int>;

VertexSet make_vertex_set(std::vector<int> ids);
bool contains(const VertexSet& set, int v);

// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * n_,
            static_cast<std::size_t>(n_)};
  }
  const std::vector<double>& data() const { return data_; }

  bool is_symmetric(double tol = 0.0) const;
  // Rows/columns indexed by `keep`, in the given order.
  Matrix principal_submatrix(std::span<const int> keep) const;

  bool operator==(const Matrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

// Symmetric non-negative similarity graph with zero diagonal. Pairs not in
// the adjacency list carry zero weight.
class AffinityGraph {
 public:
  AffinityGraph() = default;
  // Validates symmetry, zero diagonal, [0,1] range and that weights outside
  // `adjacency` vanish. Pairs are normalized to (min, max) and deduplicated.
  AffinityGraph(Matrix weights, std::vector<VertexPair> adjacency);

  // Every pair adjacent; weights still validated.
  static AffinityGraph complete(Matrix weights);

  int size() const { return weights_.size(); }
  double operator()(int i, int j) const { return weights_(i, j); }
  const Matrix& weights() const { return weights_; }
  const std::vector<VertexPair>& adjacency() const { return adjacency_; }
  // Neighbors of v under the adjacency structure, sorted.
  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }

 private:
  Matrix weights_;
  std::vector<VertexPair> adjacency_;
  std::vector<std::vector<int>> neighbors_;
};

// Point of the standard simplex.
class SimplexVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  SimplexVector() = default;
  // Throws std::invalid_argument unless entries are >= 0 and sum to 1.
  explicit SimplexVector(std::vector<double> x);

  static SimplexVector uniform(int n);
  static SimplexVector vertex(int n, int i);

  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[i]; }
  const std::vector<double>& values() const { return x_; }

 private:
  std::vector<double> x_;
};

// Relative support threshold used to read sigma(x) off a converged state.
inline constexpr double kSupportThreshold = 1e-6;

// { i : x[i] > kSupportThreshold * max(x) }.
VertexSet support_of(std::span<const double> x);

struct DominantSetResult {
  VertexSet support;
  SimplexVector chi;      // weighted characteristic vector, full length
  double value = 0.0;     // chi' A chi
  SimplexVector state;    // raw solver state the support was read from
  double payoff = 0.0;    // state' B state for the program that produced it
  int iterations = 0;
  bool converged = true;
};

// phi_S(i, j) = a_ji - (1/|S|) sum_{k in S} a_ik, for i in S and j not in S.
double relative_similarity(const AffinityGraph& a, const VertexSet& s, int i,
                           int j);

// Largest set accepted by the recursive weight oracle.
inline constexpr int kMaxOracleSetSize = 15;

// Recursive weight w_S(i). Memoized over subsets of S.
double node_weight(const AffinityGraph& a, const VertexSet& s, int i);

// Internal coherence (w_S(i) > 0 for i in S) and external incoherence
// (w_{S+{j}}(j) < 0 for j outside S).
bool is_dominant_set(const AffinityGraph& a, const VertexSet& s);

// x_i = w_S(i) / sum_j w_S(j) on S, zero elsewhere.
SimplexVector characteristic_vector(const AffinityGraph& a, const VertexSet& s);

// x' M x.
double quadratic_form(const Matrix& m, std::span<const double> x);

}  // namespace cdseg

#endif  // CDSEG_GRAPH_CORE_H_
