// Copyright 2026 The ctclassify Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctcls/errors.hpp"
#include "ctcls/metrics.hpp"
#include "ctcls/rng.hpp"

using namespace ctcls;

namespace {

// Independent single-pass oracle: counts and all four rates computed in one
// loop straight from the definitions. Kept free of any library code so it
// can disagree with the implementation.
struct OracleMetrics {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, accuracy = 0, f1 = 0;
  bool precision_undefined = false, recall_undefined = false,
       f1_undefined = false;
};

OracleMetrics brute_force(const std::vector<double>& p,
                          const std::vector<double>& y, double threshold) {
  OracleMetrics o;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool predicted = p[i] >= threshold;
    const bool actual = y[i] >= 0.5;
    if (predicted && actual) {
      ++o.tp;
    } else if (predicted) {
      ++o.fp;
    } else if (actual) {
      ++o.fn;
    } else {
      ++o.tn;
    }
  }
  if (o.tp + o.fp > 0) {
    o.precision = static_cast<double>(o.tp) / static_cast<double>(o.tp + o.fp);
  } else {
    o.precision_undefined = true;
  }
  if (o.tp + o.fn > 0) {
    o.recall = static_cast<double>(o.tp) / static_cast<double>(o.tp + o.fn);
  } else {
    o.recall_undefined = true;
  }
  o.accuracy = static_cast<double>(o.tp + o.tn) /
               static_cast<double>(o.tp + o.fp + o.fn + o.tn);
  if (o.precision + o.recall == 0.0) {
    o.f1_undefined = true;
  } else {
    o.f1 = 2.0 * o.precision * o.recall / (o.precision + o.recall);
  }
  return o;
}

std::pair<std::vector<double>, std::vector<double>> random_batch(
    std::mt19937_64& rng, std::size_t n) {
  std::vector<double> p(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = uniform_real(rng, 0.0, 1.0);
    // Mix in degenerate batches so zero-denominator paths get exercised.
    y[i] = bernoulli(rng, 0.5) ? 1.0 : 0.0;
  }
  return {p, y};
}

}  // namespace

TEST_CASE("f1 reproduces the published fixtures") {
  CHECK(std::abs(f1_score(0.9140, 0.9068) - 0.9104) < 5e-5);
  CHECK(std::abs(f1_score(0.8636, 0.8143) - 0.8382) < 5e-5);
}

TEST_CASE("f1 fixed point: P == R == x gives x") {
  for (const double x : {0.0, 0.1, 0.25, 0.5, 0.9140, 1.0}) {
    CHECK(f1_score(x, x) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("f1 symmetry, monotonicity, arithmetic-mean bound") {
  auto rng = make_rng(11);
  for (int i = 0; i < 500; ++i) {
    const double p = uniform_real(rng, 0.0, 1.0);
    const double r = uniform_real(rng, 0.0, 1.0);
    CHECK(f1_score(p, r) == f1_score(r, p));
    CHECK(f1_score(p, r) <= (p + r) / 2.0 + 1e-12);
    // Monotone in each argument.
    const double bump = uniform_real(rng, 0.0, 1.0 - r);
    CHECK(f1_score(p, r + bump) >= f1_score(p, r) - 1e-12);
  }
  // Equality in the bound holds iff P == R.
  CHECK(f1_score(0.6, 0.6) == doctest::Approx(0.6));
  CHECK(f1_score(0.4, 0.8) < (0.4 + 0.8) / 2.0);
}

TEST_CASE("f1 of zero precision and recall is 0 (undefined denominator)") {
  CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("confusion counts: exact predictions have no fp/fn") {
  const std::vector<double> y = {1, 0, 1, 1, 0};
  const ConfusionCounts c = confusion_counts(y, y, 0.5);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  CHECK(c.tp == 3);
  CHECK(c.tn == 2);
}

TEST_CASE("confusion counts: p equal to the threshold classifies positive") {
  const std::vector<double> p = {0.5};
  const std::vector<double> y = {1.0};
  const ConfusionCounts c = confusion_counts(p, y, 0.5);
  CHECK(c.tp == 1);
  CHECK(c.total() == 1);
}

TEST_CASE("confusion counts match the brute-force tally on random batches") {
  auto rng = make_rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + uniform_index(rng, 1000);
    const auto [p, y] = random_batch(rng, n);
    const ConfusionCounts c = confusion_counts(p, y, 0.5);
    const OracleMetrics o = brute_force(p, y, 0.5);
    CHECK(c.tp == o.tp);
    CHECK(c.fp == o.fp);
    CHECK(c.fn == o.fn);
    CHECK(c.tn == o.tn);
    CHECK(c.total() == static_cast<long long>(n));
  }
}

TEST_CASE("confusion counts reject mismatched lengths") {
  const std::vector<double> p = {0.5, 0.5};
  const std::vector<double> y = {1.0};
  CHECK_THROWS_AS(confusion_counts(p, y, 0.5), ShapeMismatch);
}

TEST_CASE("rates reconstruct the epoch-6 validation row") {
  // 70 positives, 70 negatives: precision 1.0000 and recall 12/70 = 0.1714
  // pin tp=12, fp=0, fn=58, tn=70.
  const MetricValues m = rates({12, 0, 58, 70});
  CHECK(m.precision == 1.0);
  CHECK(m.recall == doctest::Approx(0.1714).epsilon(5e-5));
  CHECK(m.accuracy == doctest::Approx(82.0 / 140.0));
  CHECK_FALSE(m.precision_undefined);
  CHECK_FALSE(m.recall_undefined);
}

TEST_CASE("zero denominators flag instead of throwing") {
  const MetricValues m = rates({0, 0, 3, 5});
  CHECK(m.precision == 0.0);
  CHECK(m.precision_undefined);
  CHECK_FALSE(m.recall_undefined);

  const MetricValues all_neg = metrics_from_counts({0, 0, 0, 5});
  CHECK(all_neg.precision_undefined);
  CHECK(all_neg.recall_undefined);
  CHECK(all_neg.f1_undefined);
  CHECK(all_neg.f1 == 0.0);
  CHECK(all_neg.accuracy == 1.0);
}

TEST_CASE("rates on an empty evaluation throws") {
  CHECK_THROWS_AS(rates({0, 0, 0, 0}), EmptyEvaluation);
}

TEST_CASE("counts -> rates -> f1 equals the single-pass oracle exactly") {
  auto rng = make_rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = 1 + uniform_index(rng, 60);
    auto [p, y] = random_batch(rng, n);
    if (trial % 7 == 0) {  // force all-negative targets
      std::fill(y.begin(), y.end(), 0.0);
    }
    if (trial % 11 == 0) {  // force all-below-threshold predictions
      for (auto& v : p) {
        v *= 0.49;
      }
    }
    const MetricValues m = metrics_from_counts(confusion_counts(p, y, 0.5));
    const OracleMetrics o = brute_force(p, y, 0.5);
    CHECK(m.precision == o.precision);
    CHECK(m.recall == o.recall);
    CHECK(m.accuracy == o.accuracy);
    CHECK(m.f1 == o.f1);
    CHECK(m.precision_undefined == o.precision_undefined);
    CHECK(m.recall_undefined == o.recall_undefined);
    CHECK(m.f1_undefined == o.f1_undefined);
  }
}

TEST_CASE("f1 field is consistent with its closed form") {
  auto rng = make_rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionCounts c;
    c.tp = static_cast<long long>(uniform_index(rng, 50));
    c.fp = static_cast<long long>(uniform_index(rng, 50));
    c.fn = static_cast<long long>(uniform_index(rng, 50));
    c.tn = static_cast<long long>(uniform_index(rng, 50));
    if (c.total() == 0) {
      continue;
    }
    const MetricValues m = metrics_from_counts(c);
    if (!m.precision_undefined && !m.recall_undefined && !m.f1_undefined) {
      CHECK(std::abs(m.f1 - 2.0 * m.precision * m.recall /
                                (m.precision + m.recall)) <= 1e-12);
    }
  }
}

TEST_CASE("balanced-class accuracy identity") {
  // threshold 0.5, n positives and n negatives: accuracy = (tp+tn)/(2n).
  auto rng = make_rng(31);
  const std::size_t n = 40;
  std::vector<double> p, y;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    p.push_back(uniform_real(rng, 0.0, 1.0));
    y.push_back(i < n ? 1.0 : 0.0);
  }
  const ConfusionCounts c = confusion_counts(p, y, 0.5);
  const MetricValues m = rates(c);
  CHECK(m.accuracy ==
        static_cast<double>(c.tp + c.tn) / static_cast<double>(2 * n));
}
