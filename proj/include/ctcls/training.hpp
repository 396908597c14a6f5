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

#ifndef CTCLS_TRAINING_HPP
#define CTCLS_TRAINING_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctcls/augment.hpp"
#include "ctcls/dataset.hpp"
#include "ctcls/errors.hpp"
#include "ctcls/metrics.hpp"
#include "ctcls/model.hpp"

namespace ctcls {

/// Callback-style stop criterion: fire on a training-accuracy threshold, or
/// when validation loss stops improving for `patience` consecutive epochs.
struct StopRule {
  double train_accuracy_threshold = 0.91;
  int patience = 10;
  double min_delta = 0.0;  // improvement must exceed this to reset patience

  void validate() const;
};

enum class StopReason { Threshold, Patience, MaxEpochs };

std::string to_string(StopReason reason);
StopReason stop_reason_from_string(const std::string& s);

struct TrainConfig {
  double learning_rate = 3e-5;
  int batch_size = 32;
  double rmsprop_decay = 0.9;    // running mean-square decay rho
  double rmsprop_epsilon = 1e-7;
  int max_epochs = 100;
  StopRule stop;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double train_precision = 0.0;
  double train_recall = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double val_precision = 0.0;
  double val_recall = 0.0;
  double duration_seconds = 0.0;
};

struct TrainingRun {
  std::vector<EpochRecord> records;
  StopReason stop_reason = StopReason::MaxEpochs;
  TrainConfig config;
  double total_seconds = 0.0;
};

/// A NaN/Inf batch loss aborts training; the epochs completed so far ride
/// along for post-mortems.
class NonFiniteLoss : public TrainingError {
 public:
  NonFiniteLoss(const std::string& what, TrainingRun partial)
      : TrainingError(what), partial_run(std::move(partial)) {}
  TrainingRun partial_run;
};

/// Mean over the batch of -[y ln p + (1-y) ln(1-p)], probabilities clipped
/// into [1e-7, 1-1e-7]. Throws ShapeMismatch when lengths differ.
double binary_cross_entropy(std::span<const double> probabilities,
                            std::span<const double> targets);

/// One elementwise RMSprop update:
///   state <- rho·state + (1-rho)·grad²
///   param <- param - lr·grad / (sqrt(state) + eps)
/// Throws NonFiniteGradient (before any mutation) if a gradient is NaN/Inf.
void rmsprop_step(std::span<double> params, std::span<const double> grads,
                  std::span<double> state, const TrainConfig& config);

struct StopDecision {
  bool stop = false;
  StopReason reason = StopReason::MaxEpochs;
};

/// Pure function of the history: THRESHOLD when the latest train accuracy
/// reaches the rule's threshold, else PATIENCE when validation loss has not
/// improved by more than min_delta for `patience` consecutive epochs.
StopDecision early_stop_check(std::span<const EpochRecord> history,
                              const StopRule& rule);

enum class TimingMode {
  Wall,   // record wall-clock epoch durations
  Fixed,  // record 0.0 so artifacts are byte-reproducible
};

enum class NormalizeMode {
  Unit,       // pixels in [0,1] as loaded
  Symmetric,  // map to [-1,1] just before the model
};

struct TrainOptions {
  TimingMode timing = TimingMode::Wall;
  NormalizeMode normalize = NormalizeMode::Unit;
  /// Called after every optimizer step with (epoch, batch_index, batch_loss);
  /// the epoch's reported train_loss is the mean of these.
  std::function<void(int, int, double)> batch_observer;
  /// Progress lines (one per epoch) when set.
  std::ostream* log = nullptr;
};

/// The optimization loop: per epoch, iterate augmented training batches with
/// one RMSprop step each (training metrics are running aggregates over the
/// epoch's batches), then evaluate the full unaugmented validation set once.
/// Stops when the rule fires or max_epochs is reached. Deterministic for a
/// fixed (config, augment seed, data).
TrainingRun train(ClassifierModel& model, const DatasetManifest& data,
                  const AugmentConfig& augment, const TrainConfig& config,
                  const TrainOptions& options = {});

/// Held-out evaluation used at epoch end and by the evaluate command.
struct Evaluation {
  double loss = 0.0;
  MetricValues metrics;
  ConfusionCounts counts;
};
Evaluation evaluate_on(const ClassifierModel& model,
                       const std::vector<Tensor>& images,
                       std::span<const double> targets, int batch_size);

/// Columns: epoch,train_loss,train_acc,train_precision,train_recall,
/// val_loss,val_acc,val_precision,val_recall,seconds
void write_history_csv(const TrainingRun& run,
                       const std::filesystem::path& path);
std::string history_csv(const TrainingRun& run);

}  // namespace ctcls

#endif  // CTCLS_TRAINING_HPP
