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

#include "cdseg/graph_core.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cdseg {

VertexSet make_vertex_set(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool contains(const VertexSet& set, int v) {
  return std::binary_search(set.begin(), set.end(), v);
}

bool Matrix::is_symmetric(double tol) const {
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    }
  }
  return true;
}

Matrix Matrix::principal_submatrix(std::span<const int> keep) const {
  const int m = static_cast<int>(keep.size());
  Matrix sub(m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) sub(r, c) = (*this)(keep[r], keep[c]);
  }
  return sub;
}

AffinityGraph::AffinityGraph(Matrix weights, std::vector<VertexPair> adjacency)
    : weights_(std::move(weights)) {
  const int n = weights_.size();
  for (auto& [i, j] : adjacency) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw std::invalid_argument("AffinityGraph: invalid adjacency pair");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(adjacency.begin(), adjacency.end());
  adjacency.erase(std::unique(adjacency.begin(), adjacency.end()),
                  adjacency.end());
  adjacency_ = std::move(adjacency);

  std::vector<char> adjacent(static_cast<std::size_t>(n) * n, 0);
  neighbors_.assign(n, {});
  for (const auto& [i, j] : adjacency_) {
    adjacent[static_cast<std::size_t>(i) * n + j] = 1;
    adjacent[static_cast<std::size_t>(j) * n + i] = 1;
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());

  for (int i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw std::invalid_argument("AffinityGraph: non-zero diagonal");
    }
    for (int j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument("AffinityGraph: weight outside [0,1]");
      }
      if (w != weights_(j, i)) {
        throw std::invalid_argument("AffinityGraph: matrix not symmetric");
      }
      if (w != 0.0 && !adjacent[static_cast<std::size_t>(i) * n + j]) {
        throw std::invalid_argument(
            "AffinityGraph: non-zero weight on non-adjacent pair");
      }
    }
  }
}

AffinityGraph AffinityGraph::complete(Matrix weights) {
  const int n = weights.size();
  std::vector<VertexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return AffinityGraph(std::move(weights), std::move(pairs));
}

SimplexVector::SimplexVector(std::vector<double> x) : x_(std::move(x)) {
  if (x_.empty()) throw std::invalid_argument("SimplexVector: empty");
  double sum = 0.0;
  for (double v : x_) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("SimplexVector: negative or NaN entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("SimplexVector: entries sum to " +
                                std::to_string(sum));
  }
}

SimplexVector SimplexVector::uniform(int n) {
  if (n < 1) throw std::invalid_argument("SimplexVector::uniform: n < 1");
  return SimplexVector(std::vector<double>(n, 1.0 / n));
}

SimplexVector SimplexVector::vertex(int n, int i) {
  if (i < 0 || i >= n) throw std::invalid_argument("SimplexVector::vertex");
  std::vector<double> x(n, 0.0);
  x[i] = 1.0;
  return SimplexVector(std::move(x));
}

VertexSet support_of(std::span<const double> x) {
  VertexSet support;
  if (x.empty()) return support;
  const double peak = *std::max_element(x.begin(), x.end());
  const double cut = kSupportThreshold * peak;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > cut) support.push_back(static_cast<int>(i));
  }
  return support;
}

double quadratic_form(const Matrix& m, std::span<const double> x) {
  double total = 0.0;
  for (int i = 0; i < m.size(); ++i) {
    if (x[i] == 0.0) continue;
    const auto row = m.row(i);
    double acc = 0.0;
    for (int j = 0; j < m.size(); ++j) acc += row[j] * x[j];
    total += x[i] * acc;
  }
  return total;
}

namespace {

void check_vertices(const AffinityGraph& a, const VertexSet& s) {
  for (int v : s) {
    if (v < 0 || v >= a.size()) {
      throw std::out_of_range("vertex id " + std::to_string(v) +
                              " outside graph");
    }
  }
}

// Memoized w_T(i) over all subsets T of a fixed universe of at most 16
// vertices. Subsets are bitmasks over universe positions.
class WeightOracle {
 public:
  static constexpr int kMaxUniverse = kMaxOracleSetSize + 1;

  WeightOracle(const AffinityGraph& a, VertexSet universe)
      : a_(a), universe_(std::move(universe)) {
    const int m = static_cast<int>(universe_.size());
    if (m > kMaxUniverse) {
      throw std::invalid_argument("node weight recursion cap exceeded");
    }
    memo_.assign((std::size_t{1} << m) * m,
                 std::numeric_limits<double>::quiet_NaN());
  }

  int position(int v) const {
    auto it = std::lower_bound(universe_.begin(), universe_.end(), v);
    return static_cast<int>(it - universe_.begin());
  }

  // w_T(i), i a universe position inside mask.
  double weight(std::uint32_t mask, int i) {
    double& slot = memo_[static_cast<std::size_t>(mask) * universe_.size() + i];
    if (!std::isnan(slot)) return slot;
    if (std::popcount(mask) == 1) return slot = 1.0;
    const std::uint32_t rest = mask & ~(std::uint32_t{1} << i);
    const double inv = 1.0 / std::popcount(rest);
    const int vi = universe_[i];
    double total = 0.0;
    for (int j = 0; j < static_cast<int>(universe_.size()); ++j) {
      if (!(rest >> j & 1u)) continue;
      const int vj = universe_[j];
      // phi_R(j, i) = a_ij - mean_{k in R} a_jk
      double mean = 0.0;
      for (int k = 0; k < static_cast<int>(universe_.size()); ++k) {
        if (rest >> k & 1u) mean += a_(vj, universe_[k]);
      }
      total += (a_(vi, vj) - mean * inv) * weight(rest, j);
    }
    return slot = total;
  }

  std::uint32_t full_mask() const {
    return (std::uint32_t{1} << universe_.size()) - 1;
  }

 private:
  const AffinityGraph& a_;
  VertexSet universe_;
  std::vector<double> memo_;
};

}  // namespace

double relative_similarity(const AffinityGraph& a, const VertexSet& s, int i,
                           int j) {
  if (s.empty()) throw std::invalid_argument("relative_similarity: empty S");
  check_vertices(a, s);
  if (!contains(s, i)) {
    throw std::invalid_argument("relative_similarity: i must belong to S");
  }
  if (contains(s, j) || j < 0 || j >= a.size()) {
    throw std::invalid_argument("relative_similarity: j must lie outside S");
  }
  double mean = 0.0;
  for (int k : s) mean += a(i, k);
  mean /= static_cast<double>(s.size());
  return a(j, i) - mean;
}

double node_weight(const AffinityGraph& a, const VertexSet& s, int i) {
  if (s.empty()) throw std::invalid_argument("node_weight: empty S");
  if (static_cast<int>(s.size()) > kMaxOracleSetSize) {
    throw std::invalid_argument("node_weight: |S| above recursion cap");
  }
  check_vertices(a, s);
  if (!contains(s, i)) throw std::invalid_argument("node_weight: i not in S");
  WeightOracle oracle(a, s);
  return oracle.weight(oracle.full_mask(), oracle.position(i));
}

bool is_dominant_set(const AffinityGraph& a, const VertexSet& s) {
  if (s.empty()) throw std::invalid_argument("is_dominant_set: empty S");
  if (static_cast<int>(s.size()) > kMaxOracleSetSize) {
    throw std::invalid_argument("is_dominant_set: |S| above recursion cap");
  }
  check_vertices(a, s);
  {
    WeightOracle oracle(a, s);
    for (int v : s) {
      if (!(oracle.weight(oracle.full_mask(), oracle.position(v)) > 0.0)) {
        return false;
      }
    }
  }
  for (int j = 0; j < a.size(); ++j) {
    if (contains(s, j)) continue;
    VertexSet grown = s;
    grown.insert(std::upper_bound(grown.begin(), grown.end(), j), j);
    WeightOracle oracle(a, grown);
    if (!(oracle.weight(oracle.full_mask(), oracle.position(j)) < 0.0)) {
      return false;
    }
  }
  return true;
}

SimplexVector characteristic_vector(const AffinityGraph& a,
                                    const VertexSet& s) {
  if (s.empty()) throw std::invalid_argument("characteristic_vector: empty S");
  if (static_cast<int>(s.size()) > kMaxOracleSetSize) {
    throw std::invalid_argument(
        "characteristic_vector: |S| above recursion cap");
  }
  check_vertices(a, s);
  WeightOracle oracle(a, s);
  std::vector<double> w(s.size());
  double total = 0.0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    w[p] = oracle.weight(oracle.full_mask(), static_cast<int>(p));
    total += w[p];
  }
  if (!(total > 0.0)) {
    throw std::domain_error("characteristic_vector: total weight not positive");
  }
  std::vector<double> x(a.size(), 0.0);
  for (std::size_t p = 0; p < s.size(); ++p) {
    // Negative member weights mean S is not coherent; clamp so the result is
    // still a simplex point.
    x[s[p]] = std::max(w[p], 0.0) / total;
  }
  double sum = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= sum;
  return SimplexVector(std::move(x));
}

}  // namespace cdseg
