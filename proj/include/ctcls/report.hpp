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

#ifndef CTCLS_REPORT_HPP
#define CTCLS_REPORT_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctcls/training.hpp"

namespace ctcls {

/// Operational definitions behind the qualitative training comments; both
/// constants are artifact definitions, configurable and disclosed in output
/// footnotes.
struct DiagnosisRule {
  /// Validation loss must stay above its prior best for at least this many
  /// epochs, through the end of the run, to call an overfit onset.
  int window = 3;
  /// "Converged" means final train loss < ratio x first-epoch train loss.
  double convergence_ratio = 0.5;
};

struct OverfitDiagnosis {
  bool converged = false;
  std::optional<int> overfit_onset_epoch;
  std::string comment;  // pure function of the fields plus total epochs
};

/// Classify a run. Onset = smallest epoch e such that every later epoch's
/// validation loss exceeds the best seen before e, the stretch is at least
/// `window` epochs long, and train loss falls across the first `window` of
/// them. Depends only on orderings and the convergence ratio, so rescaling
/// all losses by a positive constant changes nothing. Throws
/// InsufficientHistory for runs shorter than 2 epochs.
OverfitDiagnosis diagnose(const TrainingRun& run,
                          const DiagnosisRule& rule = {});

std::string diagnosis_comment(bool converged, std::optional<int> onset_epoch,
                              int total_epochs);

/// One line disclosing the rule constants, appended to diagnosis output.
std::string diagnosis_footnote(const DiagnosisRule& rule = {});

struct ComparisonRow {
  std::string model_name;
  double final_val_accuracy = 0.0;  // fraction in [0,1]
  OverfitDiagnosis diagnosis;
};

/// Epochs sampled for the report tables: 1, 1+stride, 1+2*stride, ...,
/// plus the final epoch.
std::vector<int> sampled_epochs(int total_epochs, int stride);

/// Loss & accuracy table: losses to 4 decimals, accuracies as percents to
/// 2 decimals, one "After Epoch N" row per sampled epoch.
std::string render_loss_accuracy_table(const TrainingRun& run, int stride = 5);

/// Precision & recall table, factors as rows and sampled epochs as columns,
/// values to 4 decimals.
std::string render_precision_recall_table(const TrainingRun& run,
                                          int stride = 5);

/// Writes loss_vs_epoch.png / accuracy_vs_epoch.png (train + validation
/// series, legend, axis labels) plus CSV sidecars carrying the exact plotted
/// values. Atomic writes.
void render_curves(const TrainingRun& run,
                   const std::filesystem::path& out_dir);

/// Model | Accuracy | Training Comment, accuracy as integer percent
/// (round half-up), rows in the given order.
std::string render_comparison(std::span<const ComparisonRow> rows);

nlohmann::ordered_json comparison_json(std::span<const ComparisonRow> rows);

/// Integer-percent formatting used by the comparison table (0.8429 -> 84).
int percent_round_half_up(double fraction);

}  // namespace ctcls

#endif  // CTCLS_REPORT_HPP
