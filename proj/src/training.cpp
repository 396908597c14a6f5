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

#include "ctcls/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"
#include "ctcls/rng.hpp"

namespace ctcls {

namespace {

constexpr double kBceClip = 1e-7;

Tensor normalized(const Tensor& image, NormalizeMode mode) {
  if (mode == NormalizeMode::Unit) {
    return image;
  }
  Tensor out = image;
  for (auto& v : out.values()) {
    v = v * 2.0 - 1.0;
  }
  return out;
}

std::string format_row(const EpochRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f", r.epoch,
                r.train_loss, r.train_accuracy, r.train_precision,
                r.train_recall, r.val_loss, r.val_accuracy, r.val_precision,
                r.val_recall, r.duration_seconds);
  return buf;
}

}  // namespace

void StopRule::validate() const {
  // Threshold 0 is a legal degenerate rule (stops after epoch 1).
  if (train_accuracy_threshold < 0.0 || train_accuracy_threshold > 1.0) {
    throw ConfigError("stop threshold must lie in [0, 1]");
  }
  if (patience < 1) {
    throw ConfigError("stop patience must be >= 1");
  }
  if (min_delta < 0.0) {
    throw ConfigError("stop min_delta must be nonnegative");
  }
}

void TrainConfig::validate() const {
  // Zero freezes the model (a supported diagnostic mode); negative is a bug.
  if (learning_rate < 0.0) {
    throw ConfigError("learning_rate must be nonnegative");
  }
  if (batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (rmsprop_decay <= 0.0 || rmsprop_decay >= 1.0) {
    throw ConfigError("rmsprop_decay must lie in (0, 1)");
  }
  if (rmsprop_epsilon <= 0.0) {
    throw ConfigError("rmsprop_epsilon must be positive");
  }
  if (max_epochs < 1) {
    throw ConfigError("max_epochs must be >= 1");
  }
  stop.validate();
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Threshold:
      return "THRESHOLD";
    case StopReason::Patience:
      return "PATIENCE";
    case StopReason::MaxEpochs:
      return "MAX_EPOCHS";
  }
  return "MAX_EPOCHS";
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "THRESHOLD") {
    return StopReason::Threshold;
  }
  if (s == "PATIENCE") {
    return StopReason::Patience;
  }
  if (s == "MAX_EPOCHS") {
    return StopReason::MaxEpochs;
  }
  throw ConfigError("unknown stop reason: " + s);
}

double binary_cross_entropy(std::span<const double> probabilities,
                            std::span<const double> targets) {
  if (probabilities.size() != targets.size()) {
    throw ShapeMismatch("binary_cross_entropy: " +
                        std::to_string(probabilities.size()) + " vs " +
                        std::to_string(targets.size()));
  }
  if (probabilities.empty()) {
    throw ShapeMismatch("binary_cross_entropy: empty batch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities[i], kBceClip, 1.0 - kBceClip);
    const double y = targets[i];
    sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return sum / static_cast<double>(probabilities.size());
}

void rmsprop_step(std::span<double> params, std::span<const double> grads,
                  std::span<double> state, const TrainConfig& config) {
  if (params.size() != grads.size() || params.size() != state.size()) {
    throw ShapeMismatch("rmsprop_step: params/grads/state sizes differ");
  }
  for (const double g : grads) {
    if (!std::isfinite(g)) {
      throw NonFiniteGradient("rmsprop_step: non-finite gradient");
    }
  }
  const double rho = config.rmsprop_decay;
  const double lr = config.learning_rate;
  const double eps = config.rmsprop_epsilon;
  for (std::size_t i = 0; i < params.size(); ++i) {
    state[i] = rho * state[i] + (1.0 - rho) * grads[i] * grads[i];
    params[i] -= lr * grads[i] / (std::sqrt(state[i]) + eps);
  }
}

StopDecision early_stop_check(std::span<const EpochRecord> history,
                              const StopRule& rule) {
  if (history.empty()) {
    throw TrainingError("early_stop_check: empty history");
  }
  if (history.back().train_accuracy >= rule.train_accuracy_threshold) {
    return {true, StopReason::Threshold};
  }
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (const EpochRecord& r : history) {
    if (r.val_loss < best - rule.min_delta) {
      best = r.val_loss;
      stale = 0;
    } else {
      ++stale;
    }
  }
  if (stale >= rule.patience) {
    return {true, StopReason::Patience};
  }
  return {false, StopReason::MaxEpochs};
}

Evaluation evaluate_on(const ClassifierModel& model,
                       const std::vector<Tensor>& images,
                       std::span<const double> targets, int batch_size) {
  if (images.empty()) {
    throw EmptyEvaluation("evaluate_on: no samples");
  }
  if (images.size() != targets.size()) {
    throw ShapeMismatch("evaluate_on: images vs targets length");
  }
  std::vector<double> probs;
  probs.reserve(images.size());
  for (std::size_t start = 0; start < images.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(start + static_cast<std::size_t>(batch_size), images.size());
    std::vector<Tensor> chunk(images.begin() + start, images.begin() + end);
    const auto p = model.forward(chunk, /*training=*/false);
    probs.insert(probs.end(), p.begin(), p.end());
  }
  Evaluation ev;
  ev.loss = binary_cross_entropy(probs, targets);
  ev.counts = confusion_counts(probs, targets, 0.5);
  ev.metrics = metrics_from_counts(ev.counts);
  return ev;
}

TrainingRun train(ClassifierModel& model, const DatasetManifest& data,
                  const AugmentConfig& augment, const TrainConfig& config,
                  const TrainOptions& options) {
  config.validate();
  if (data.train_samples.empty()) {
    throw EmptyDataset("train: no training samples");
  }
  if (data.val_samples.empty()) {
    throw EmptyDataset("train: no validation samples");
  }
  const Shape in = model.input_shape();

  BatchStream stream(data.train_samples, augment, config.batch_size, in.h,
                     in.w);

  // Validation images are only resized/normalized, never augmented.
  std::vector<Tensor> val_images;
  std::vector<double> val_targets;
  val_images.reserve(data.val_samples.size());
  for (const auto& s : data.val_samples) {
    val_images.push_back(
        normalized(load_sample(s, in.h, in.w), options.normalize));
    val_targets.push_back(target_of(s.label));
  }

  auto dropout_rng = make_rng(config.seed, 0xd20);
  std::vector<double> rms_state(model.head().all().size(), 0.0);

  TrainingRun run;
  run.config = config;
  const auto run_start = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    int batch_count = 0;
    ConfusionCounts train_counts;

    for (auto it = stream.epoch(epoch - 1); !it.done();) {
      Batch batch = it.next();
      if (options.normalize == NormalizeMode::Symmetric) {
        for (auto& img : batch.images) {
          img = normalized(img, options.normalize);
        }
      }
      const auto cache =
          model.forward_cached(batch.images, /*training=*/true, &dropout_rng);
      const double batch_loss =
          binary_cross_entropy(cache.probs, batch.targets);
      if (!std::isfinite(batch_loss)) {
        throw NonFiniteLoss(
            "non-finite training loss at epoch " + std::to_string(epoch),
            run);
      }
      train_counts += confusion_counts(cache.probs, batch.targets, 0.5);
      const auto grads = model.gradients(cache, batch.targets);
      rmsprop_step(model.head().all(), grads, rms_state, config);
      loss_sum += batch_loss;
      ++batch_count;
      if (options.batch_observer) {
        options.batch_observer(epoch, batch_count - 1, batch_loss);
      }
    }

    const MetricValues train_metrics = metrics_from_counts(train_counts);
    const Evaluation val =
        evaluate_on(model, val_images, val_targets, config.batch_size);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / batch_count;
    rec.train_accuracy = train_metrics.accuracy;
    rec.train_precision = train_metrics.precision;
    rec.train_recall = train_metrics.recall;
    rec.val_loss = val.loss;
    rec.val_accuracy = val.metrics.accuracy;
    rec.val_precision = val.metrics.precision;
    rec.val_recall = val.metrics.recall;
    if (options.timing == TimingMode::Wall) {
      rec.duration_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        epoch_start)
              .count();
    }
    run.records.push_back(rec);

    if (options.log != nullptr) {
      *options.log << "epoch " << epoch << ": train_loss=" << rec.train_loss
                   << " train_acc=" << rec.train_accuracy
                   << " val_loss=" << rec.val_loss
                   << " val_acc=" << rec.val_accuracy << "\n";
    }

    const StopDecision decision = early_stop_check(run.records, config.stop);
    if (decision.stop) {
      run.stop_reason = decision.reason;
      break;
    }
    run.stop_reason = StopReason::MaxEpochs;
  }

  if (options.timing == TimingMode::Wall) {
    run.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      run_start)
            .count();
  }
  return run;
}

std::string history_csv(const TrainingRun& run) {
  std::string out =
      "epoch,train_loss,train_acc,train_precision,train_recall,"
      "val_loss,val_acc,val_precision,val_recall,seconds\n";
  for (const EpochRecord& r : run.records) {
    out += format_row(r);
    out += "\n";
  }
  return out;
}

void write_history_csv(const TrainingRun& run,
                       const std::filesystem::path& path) {
  write_file_atomic(path, history_csv(run));
}

}  // namespace ctcls
