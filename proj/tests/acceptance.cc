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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cdseg/dynamics.h"
#include "cdseg/features.h"
#include "cdseg/fixtures.h"
#include "cdseg/metrics.h"
#include "cdseg/propagation.h"
#include "cdseg/serve.h"
#include "cdseg/superpixels.h"
#include "oracles.h"

namespace cdseg {
namespace {

using clock_type = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Matrix random_graph(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> density(0.3, 1.0);
  return testing::random_affinity(rng, n, density(rng));
}

VertexSet random_seeds(std::mt19937& rng, int n) {
  VertexSet seeds;
  const int want = 1 + static_cast<int>(rng() % std::max(1, n / 2));
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  seeds.assign(ids.begin(), ids.begin() + want);
  return make_vertex_set(seeds);
}

// Every support found while peeling with seeds = V is a dominant set of the
// working graph it was extracted from. An edgeless working graph with two or
// more vertices has no dominant set at all; the oracle confirms that and the
// peel stops there.
Outcome oracle_equivalence() {
  const auto t0 = clock_type::now();
  std::mt19937 rng(101);
  const SolverConfig cfg;
  int supports = 0, failures = 0, edgeless = 0;
  for (int g = 0; g < 50; ++g) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const Matrix a = random_graph(rng, n);
    std::vector<int> alive(n);
    std::iota(alive.begin(), alive.end(), 0);
    while (!alive.empty()) {
      const Matrix sub = a.principal_submatrix(alive);
      const AffinityGraph graph = AffinityGraph::complete(sub);
      testing::NodeWeightOracle oracle(sub);
      const bool has_edge =
          std::any_of(sub.data().begin(), sub.data().end(), [](double w) { return w > 0.0; });
      if (!has_edge && alive.size() > 1) {
        ++edgeless;
        for (std::uint32_t m = 1; m < (1u << alive.size()); ++m) failures += oracle.dominant(m);
        break;
      }
      VertexSet all(alive.size());
      std::iota(all.begin(), all.end(), 0);
      const CdsProgram prog = build_program(graph, all, cfg);
      const DominantSetResult r =
          inimdyn_solve(prog, SimplexVector::uniform(static_cast<int>(alive.size())), cfg);
      ++supports;
      if (!r.converged || !is_dominant_set(graph, r.support) ||
          !oracle.dominant(testing::to_mask(r.support))) {
        ++failures;
      }
      std::vector<int> rest;
      for (std::size_t i = 0; i < alive.size(); ++i) {
        if (!contains(r.support, static_cast<int>(i))) rest.push_back(alive[i]);
      }
      alive = rest;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 30.0,
          fmt("50 graphs, %d supports, %d not dominant, %d edgeless remainders without "
              "dominant sets, %.2fs (limit 30s)",
              supports, failures, edgeless, secs)};
}

Outcome seed_containment() {
  std::mt19937 rng(202);
  const SolverConfig cfg;
  int converged = 0, violations = 0, unconverged = 0;
  for (int g = 0; g < 100; ++g) {
    const int n = 2 + static_cast<int>(rng() % 19);
    const AffinityGraph graph = AffinityGraph::complete(random_graph(rng, n));
    const VertexSet seeds = random_seeds(rng, n);
    const CdsProgram prog = build_program(graph, seeds, cfg);
    const DominantSetResult r = inimdyn_solve(prog, SimplexVector::uniform(n), cfg);
    if (!r.converged) {
      ++unconverged;
      continue;
    }
    ++converged;
    bool hit = false;
    for (int s : seeds) hit |= contains(r.support, s);
    violations += !hit;
  }
  return {violations == 0 && unconverged == 0,
          fmt("100 graphs, %d converged, %d unconverged, %d supports missing the seeds",
              converged, unconverged, violations)};
}

Outcome solver_invariants() {
  std::mt19937 rng(303);
  std::exponential_distribution<double> e(1.0);
  const SolverConfig cfg;
  double worst_sum = 0.0, worst_drop = 0.0;
  long steps = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 19);
    const Matrix a = random_graph(rng, n);
    const CdsProgram prog = build_program(a, random_seeds(rng, n), cfg);
    std::vector<double> x0(n);
    for (double& v : x0) v = e(rng);
    const double total = std::accumulate(x0.begin(), x0.end(), 0.0);
    for (double& v : x0) v /= total;
    double last = quadratic_form(prog.payoff, x0);
    inimdyn_run(prog.payoff, SimplexVector(x0), cfg,
                [&](int, std::span<const double> x, double) {
                  double sum = 0.0;
                  for (double v : x) {
                    if (v < 0.0) worst_sum = std::max(worst_sum, 1.0);
                    sum += v;
                  }
                  worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
                  const double value = quadratic_form(prog.payoff, x);
                  worst_drop = std::max(worst_drop, last - value);
                  last = value;
                  ++steps;
                });
  }
  return {worst_sum < 1e-9 && worst_drop < 1e-12,
          fmt("1000 trajectories, %ld iterates, max |sum-1| %.2e (limit 1e-9), "
              "max payoff drop %.2e (limit 1e-12)",
              steps, worst_sum, worst_drop)};
}

Outcome eigenvalue_accuracy() {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 8);
    Matrix a(n);
    if (t % 2 == 0) {
      a = testing::random_affinity(rng, n);
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
      }
    }
    VertexSet excluded;
    for (int i = 0; i < n; ++i) {
      if (rng() % 3 == 0 && static_cast<int>(excluded.size()) + 1 < n) excluded.push_back(i);
    }
    const double got = lambda_max_principal(a, excluded);
    worst = std::max(worst, std::abs(got - testing::dense_lambda_max(a, excluded)));
  }
  return {worst <= 1e-6, fmt("100 matrices n<=8, max error %.2e (limit 1e-6)", worst)};
}

Outcome fh_fixtures() {
  ImageF constant(64, 48, 3);
  for (float& v : constant.data()) v = 123.0f;
  const int constant_count = segment_superpixels(constant, FhParams{}).count();

  const ImageF halves = convert_color_space(make_two_half_image(64, 64), ColorSpace::kIntensity);
  const SuperpixelMap sp = fh_segment(halves, FhParams{300, 0.0, 20});
  bool boundary = sp.count() == 2;
  for (int y = 0; y < 64 && boundary; ++y) {
    for (int x = 0; x < 64; ++x) boundary &= sp.label(x, y) == (x < 32 ? 0 : 1);
  }

  int rule_cases = 0, rule_failures = 0;
  for (double k = 1.0; k <= 255.0; k += 1.0) {
    for (double w : {k - 1, k, k + 1}) {
      if (w > 255.0) continue;
      ImageF pair(2, 1, 1);
      pair.at(1, 0, 0) = static_cast<float>(w);
      const int count = fh_segment(pair, FhParams{k, 0.0, 1}).count();
      ++rule_cases;
      rule_failures += count != (w <= k ? 1 : 2);
    }
  }
  return {constant_count == 1 && boundary && rule_failures == 0,
          fmt("constant -> %d superpixel(s); two-half -> %d superpixels, boundary %s; "
              "two-singleton rule %d/%d cases correct",
              constant_count, sp.count(), boundary ? "exact" : "wrong",
              rule_cases - rule_failures, rule_cases)};
}

double accuracy(const LabelMask& pred, const LabelMask& gt) {
  return pixel_accuracy(accumulate(pred, gt, 3));
}

Outcome end_to_end() {
  const SyntheticFixture fx = make_three_region_fixture();
  const auto t0 = clock_type::now();
  const PipelineResult r = full_pipeline(fx.image, fx.scribbles, PipelineConfig{});
  const double secs = seconds_since(t0);
  const ConfusionMatrix cm = accumulate(r.mask, fx.ground_truth, 3);
  const double acc = pixel_accuracy(cm), miou = mean_iou(cm);

  double best_single = 0.0;
  std::string best_name;
  for (const MapOutcome& m : r.maps) {
    const double a = accuracy(m.mask, fx.ground_truth);
    if (a > best_single) {
      best_single = a;
      best_name = to_string(m.spec.space) + fmt(" k=%g", m.spec.k);
    }
  }
  // Per-space runs with the same k values, voted over k.
  for (ColorSpace space : kAllColorSpaces) {
    PipelineConfig one;
    one.color_spaces = {space};
    const double a = accuracy(full_pipeline(fx.image, fx.scribbles, one).mask, fx.ground_truth);
    if (a > best_single) {
      best_single = a;
      best_name = to_string(space) + " (vote over k)";
    }
  }
  const bool pass = r.maps.size() == 20 && acc >= 0.99 && miou >= 0.97 &&
                    acc >= best_single - 0.01 && secs < 60.0;
  return {pass, fmt("%zu maps, accuracy %.4f (>=0.99), mIoU %.4f (>=0.97), best single %.4f "
                    "[%s], %.2fs (limit 60s)",
                    r.maps.size(), acc, miou, best_single, best_name.c_str(), secs)};
}

Outcome metrics_oracle() {
  std::mt19937 rng(505);
  int mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const int n_cl = 2 + static_cast<int>(rng() % 20);
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    std::vector<std::uint8_t> p(w * h), g(w * h);
    for (auto& v : p) v = static_cast<std::uint8_t>(rng() % n_cl);
    for (auto& v : g) v = static_cast<std::uint8_t>(rng() % 8 == 0 ? 255 : rng() % n_cl);
    g[0] = static_cast<std::uint8_t>(rng() % n_cl);  // at least one counted pixel
    const ConfusionMatrix cm = accumulate(LabelMask(w, h, p), LabelMask(w, h, g), n_cl);
    const auto want = testing::naive_metrics({p.begin(), p.end()}, {g.begin(), g.end()}, n_cl, 255);
    mismatches += pixel_accuracy(cm) != want.pixel_accuracy ||
                  mean_accuracy(cm) != want.mean_accuracy || mean_iou(cm) != want.mean_iou;
  }
  ConfusionMatrix hand(2);
  hand.add(0, 0, 1);
  hand.add(0, 1, 1);
  hand.add(1, 1, 2);
  const double pa = pixel_accuracy(hand), ma = mean_accuracy(hand), mi = mean_iou(hand);
  const bool hand_ok = std::abs(pa - 0.75) <= 1e-4 && std::abs(ma - 0.75) <= 1e-4 &&
                       std::abs(mi - 0.5833) <= 1e-4;
  return {mismatches == 0 && hand_ok,
          fmt("100 random pairs, %d mismatches; [[1,1],[0,2]] -> %.4f / %.4f / %.4f", mismatches,
              pa, ma, mi)};
}

Outcome determinism() {
  const SyntheticFixture fx = make_three_region_fixture(23);
  const LabelMask a = full_pipeline(fx.image, fx.scribbles, PipelineConfig{}).mask;
  const LabelMask b = full_pipeline(fx.image, fx.scribbles, PipelineConfig{}).mask;
  PipelineConfig parallel;
  parallel.workers = 4;
  const LabelMask c = full_pipeline(fx.image, fx.scribbles, parallel).mask;
  return {a == b && a == c,
          fmt("two sequential runs %s, 4-worker run %s", a == b ? "identical" : "differ",
              a == c ? "identical" : "differs")};
}

Outcome cache_transparency() {
  const SyntheticFixture fx = make_three_region_fixture();
  int checked = 0, mismatches = 0;
  for (const PipelineConfig& cfg : {PipelineConfig::interactive(), PipelineConfig{}}) {
    SessionStore store(cfg);
    const SessionInfo info = store.create(fx.image);
    const ScribbleResponse served = store.submit(info.id, fx.scribbles);
    const PipelineResult batch = full_pipeline(fx.image, fx.scribbles, cfg);
    ++checked;
    mismatches += served.mask != batch.mask;
  }
  return {mismatches == 0,
          fmt("%d grids (interactive, full), %d mismatching masks", checked, mismatches)};
}

}  // namespace
}  // namespace cdseg

int main() {
  using cdseg::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"dominant-set oracle equivalence", cdseg::oracle_equivalence},
      {"seed containment", cdseg::seed_containment},
      {"solver invariants", cdseg::solver_invariants},
      {"eigenvalue accuracy", cdseg::eigenvalue_accuracy},
      {"FH fixtures", cdseg::fh_fixtures},
      {"end-to-end synthetic reproduction", cdseg::end_to_end},
      {"metrics oracle", cdseg::metrics_oracle},
      {"determinism", cdseg::determinism},
      {"cache transparency", cdseg::cache_transparency},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
