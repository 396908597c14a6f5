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

#include "ctcls/metrics.hpp"

#include <string>

#include "ctcls/errors.hpp"

namespace ctcls {

ConfusionCounts confusion_counts(std::span<const double> probabilities,
                                 std::span<const double> targets,
                                 double threshold) {
  if (probabilities.size() != targets.size()) {
    throw ShapeMismatch("confusion_counts: " +
                        std::to_string(probabilities.size()) +
                        " probabilities vs " + std::to_string(targets.size()) +
                        " targets");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const bool predicted = probabilities[i] >= threshold;
    const bool actual = targets[i] >= 0.5;
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted && !actual) {
      ++c.fp;
    } else if (!predicted && actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

MetricValues rates(const ConfusionCounts& c) {
  if (c.total() == 0) {
    throw EmptyEvaluation("rates: no samples evaluated");
  }
  MetricValues m;
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  } else {
    m.precision_undefined = true;
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    m.recall_undefined = true;
  }
  m.accuracy =
      static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) {
    return 0.0;
  }
  return 2.0 * precision * recall / (precision + recall);
}

MetricValues metrics_from_counts(const ConfusionCounts& c) {
  MetricValues m = rates(c);
  m.f1_undefined = (m.precision + m.recall == 0.0);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

}  // namespace ctcls
