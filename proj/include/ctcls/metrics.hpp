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

#ifndef CTCLS_METRICS_HPP
#define CTCLS_METRICS_HPP

#include <cstdint>
#include <span>

namespace ctcls {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

/// Rates in [0,1]. A zero denominator yields value 0.0 with the matching
/// undefined flag set instead of an exception; extreme skew is a legitimate
/// mid-training state and must not abort logging.
struct MetricValues {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

/// Tally thresholded predictions against {0,1} targets. A prediction is
/// positive iff p >= threshold (ties positive). Throws ShapeMismatch when
/// lengths differ.
ConfusionCounts confusion_counts(std::span<const double> probabilities,
                                 std::span<const double> targets,
                                 double threshold = 0.5);

/// precision = tp/(tp+fp), recall = tp/(tp+fn), accuracy = (tp+tn)/total.
/// Leaves f1 at 0 / unset. Throws EmptyEvaluation when total is zero.
MetricValues rates(const ConfusionCounts& c);

/// Harmonic mean 2PR/(P+R); 0.0 when P+R == 0.
double f1_score(double precision, double recall);

/// rates() plus the f1 field (and its flag) filled in.
MetricValues metrics_from_counts(const ConfusionCounts& c);

}  // namespace ctcls

#endif  // CTCLS_METRICS_HPP
