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
#include <limits>
#include <vector>

#include "ctcls/errors.hpp"
#include "ctcls/rng.hpp"
#include "ctcls/synth.hpp"
#include "ctcls/training.hpp"

using namespace ctcls;

namespace {

BackboneSpec tiny_spec(int size = 16, std::uint64_t seed = 3) {
  BackboneSpec spec;
  spec.architecture = "tiny_cnn";
  spec.weights = "RANDOM";
  spec.truncation_node = "block1";
  spec.input_h = size;
  spec.input_w = size;
  spec.random_seed = seed;
  return spec;
}

EpochRecord epoch_with(int epoch, double train_acc, double val_loss) {
  EpochRecord r;
  r.epoch = epoch;
  r.train_accuracy = train_acc;
  r.val_loss = val_loss;
  return r;
}

AugmentConfig no_augment() {
  AugmentConfig a;
  a.zoom_range = 0.0;
  a.shear_deg = 0.0;
  a.shift_range = 0.0;
  a.hflip = false;
  return a;
}

}  // namespace

TEST_CASE("binary cross-entropy fixtures") {
  CHECK(binary_cross_entropy(std::vector{0.5}, std::vector{1.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Perfect predictions clip to 1e-7.
  CHECK(binary_cross_entropy(std::vector{1.0, 0.0}, std::vector{1.0, 0.0}) <=
        1.1e-7);
  CHECK(binary_cross_entropy(std::vector{0.9, 0.2}, std::vector{1.0, 0.0}) ==
        doctest::Approx(0.164252).epsilon(1e-5));
  CHECK(binary_cross_entropy(std::vector{0.9, 0.2}, std::vector{1.0, 0.0}) ==
        doctest::Approx((-std::log(0.9) - std::log(0.8)) / 2.0)
            .epsilon(1e-15));
}

TEST_CASE("binary cross-entropy rejects mismatched shapes") {
  CHECK_THROWS_AS(
      binary_cross_entropy(std::vector{0.5, 0.5}, std::vector{1.0}),
      ShapeMismatch);
}

TEST_CASE("rmsprop: zero gradients leave parameters fixed, decay the state") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  std::vector<double> p = {1.0, -2.0};
  std::vector<double> g = {0.0, 0.0};
  std::vector<double> s = {0.5, 0.25};
  rmsprop_step(p, g, s, cfg);
  CHECK(p == std::vector<double>{1.0, -2.0});
  CHECK(s[0] == doctest::Approx(0.45));
  CHECK(s[1] == doctest::Approx(0.225));
}

TEST_CASE("rmsprop scalar fixture") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.rmsprop_decay = 0.9;
  cfg.rmsprop_epsilon = 1e-7;
  std::vector<double> p = {1.0};
  std::vector<double> g = {2.0};
  std::vector<double> s = {0.0};
  rmsprop_step(p, g, s, cfg);
  CHECK(s[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p[0] == doctest::Approx(0.683772).epsilon(1e-6));
}

TEST_CASE("two successive steps match an independent recomputation") {
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  std::vector<double> p = {0.7, -1.3};
  std::vector<double> g = {0.4, -0.8};
  std::vector<double> s = {0.0, 0.0};
  rmsprop_step(p, g, s, cfg);
  rmsprop_step(p, g, s, cfg);

  // Straight-line oracle.
  for (int i = 0; i < 2; ++i) {
    double param = i == 0 ? 0.7 : -1.3;
    double grad = i == 0 ? 0.4 : -0.8;
    double state = 0.0;
    for (int step = 0; step < 2; ++step) {
      state = 0.9 * state + 0.1 * grad * grad;
      param -= 0.05 * grad / (std::sqrt(state) + 1e-7);
    }
    CHECK(p[i] == doctest::Approx(param).epsilon(1e-15));
    CHECK(s[i] == doctest::Approx(state).epsilon(1e-15));
  }
}

TEST_CASE("non-finite gradients abort the step without touching parameters") {
  TrainConfig cfg;
  std::vector<double> p = {1.0, 2.0};
  std::vector<double> g = {0.1, std::numeric_limits<double>::quiet_NaN()};
  std::vector<double> s = {0.0, 0.0};
  CHECK_THROWS_AS(rmsprop_step(p, g, s, cfg), NonFiniteGradient);
  CHECK(p == std::vector<double>{1.0, 2.0});
  CHECK(s == std::vector<double>{0.0, 0.0});
}

TEST_CASE("100 rmsprop steps reduce BCE monotonically after step 5") {
  // Two-sample toy problem: one positive, one negative feature row through
  // a 1-unit head emulated by plain logistic parameters.
  double weight = 0.3;
  double bias = -0.2;
  std::vector<double> state = {0.0, 0.0};
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  const double x0 = 1.0, y0 = 1.0;
  const double x1 = -0.5, y1 = 0.0;
  auto loss_now = [&]() {
    const double p0 = 1.0 / (1.0 + std::exp(-(weight * x0 + bias)));
    const double p1 = 1.0 / (1.0 + std::exp(-(weight * x1 + bias)));
    return binary_cross_entropy(std::vector{p0, p1}, std::vector{y0, y1});
  };
  double prev = loss_now();
  for (int step = 1; step <= 100; ++step) {
    const double p0 = 1.0 / (1.0 + std::exp(-(weight * x0 + bias)));
    const double p1 = 1.0 / (1.0 + std::exp(-(weight * x1 + bias)));
    std::vector<double> params = {weight, bias};
    const std::vector<double> grads = {
        ((p0 - y0) * x0 + (p1 - y1) * x1) / 2.0,
        ((p0 - y0) + (p1 - y1)) / 2.0};
    rmsprop_step(params, grads, state, cfg);
    weight = params[0];
    bias = params[1];
    const double now = loss_now();
    if (step > 5) {
      CHECK(now < prev);
    }
    prev = now;
  }
}

TEST_CASE("early stop: improving validation loss keeps training") {
  std::vector<EpochRecord> history = {epoch_with(1, 0.5, 1.0),
                                      epoch_with(2, 0.6, 0.8),
                                      epoch_with(3, 0.7, 0.6)};
  StopRule rule;
  const StopDecision d = early_stop_check(history, rule);
  CHECK_FALSE(d.stop);
}

TEST_CASE("early stop: 0.9140 training accuracy crosses the 0.91 threshold") {
  std::vector<EpochRecord> history;
  for (int e = 1; e <= 30; ++e) {
    history.push_back(epoch_with(e, 0.5 + 0.01 * e, 1.0 / e));
  }
  history.push_back(epoch_with(31, 0.9140, 0.4432));
  StopRule rule;
  rule.train_accuracy_threshold = 0.91;
  const StopDecision d = early_stop_check(history, rule);
  CHECK(d.stop);
  CHECK(d.reason == StopReason::Threshold);
}

TEST_CASE("early stop patience boundary") {
  StopRule rule;
  rule.patience = 4;
  rule.train_accuracy_threshold = 0.99;
  // Best at epoch 1, then flat: patience-1 stale epochs -> continue.
  std::vector<EpochRecord> history = {epoch_with(1, 0.5, 0.5)};
  for (int e = 2; e <= rule.patience; ++e) {
    history.push_back(epoch_with(e, 0.5, 0.5));
  }
  CHECK_FALSE(early_stop_check(history, rule).stop);
  // One more flat epoch reaches `patience` -> stop.
  history.push_back(epoch_with(rule.patience + 1, 0.5, 0.5));
  const StopDecision d = early_stop_check(history, rule);
  CHECK(d.stop);
  CHECK(d.reason == StopReason::Patience);
}

TEST_CASE("early stop honors min_delta and is pure") {
  StopRule rule;
  rule.patience = 2;
  rule.min_delta = 0.05;
  rule.train_accuracy_threshold = 0.99;
  // Improvements smaller than min_delta do not reset the counter.
  std::vector<EpochRecord> history = {epoch_with(1, 0.5, 0.50),
                                      epoch_with(2, 0.5, 0.48),
                                      epoch_with(3, 0.5, 0.46)};
  const StopDecision once = early_stop_check(history, rule);
  const StopDecision twice = early_stop_check(history, rule);
  CHECK(once.stop);
  CHECK(once.reason == StopReason::Patience);
  CHECK(twice.stop == once.stop);
  CHECK(twice.reason == once.reason);
}

TEST_CASE("training on a separable synthetic set reaches 95% accuracy") {
  SynthSpec spec;
  spec.train_per_class = 100;
  spec.val_per_class = 10;
  spec.image_size = 32;
  spec.seed = 5;
  const DatasetManifest data = make_synthetic_manifest(spec);

  ClassifierModel model =
      build_classifier(tiny_spec(32, 6), HeadSpec{1024, 0.2}, 7);
  TrainConfig cfg;
  cfg.learning_rate = 3e-5;
  cfg.batch_size = 32;
  cfg.max_epochs = 15;
  cfg.stop.train_accuracy_threshold = 1.0;  // stop only on perfection
  cfg.seed = 8;
  AugmentConfig aug = no_augment();
  aug.seed = 9;
  TrainOptions options;
  options.timing = TimingMode::Fixed;

  const TrainingRun run = train(model, data, aug, cfg, options);
  REQUIRE_FALSE(run.records.empty());
  double best = 0.0;
  for (const auto& r : run.records) {
    best = std::max(best, r.train_accuracy);
  }
  CHECK(best >= 0.95);
  // Trending upward: final accuracy above the first epoch's.
  CHECK(run.records.back().train_accuracy >
        run.records.front().train_accuracy);
}

TEST_CASE("a zero threshold stops after epoch 1 with reason THRESHOLD") {
  SynthSpec spec;
  spec.train_per_class = 8;
  spec.val_per_class = 4;
  spec.image_size = 16;
  const DatasetManifest data = make_synthetic_manifest(spec);
  ClassifierModel model =
      build_classifier(tiny_spec(16, 6), HeadSpec{8, 0.2}, 7);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  cfg.stop.train_accuracy_threshold = 0.0;
  TrainOptions options;
  options.timing = TimingMode::Fixed;
  const TrainingRun run =
      train(model, data, no_augment(), cfg, options);
  CHECK(run.records.size() == 1);
  CHECK(run.stop_reason == StopReason::Threshold);
}

TEST_CASE("training is bit-deterministic under a fixed seed") {
  SynthSpec spec;
  spec.train_per_class = 12;
  spec.val_per_class = 6;
  spec.image_size = 16;
  const DatasetManifest data = make_synthetic_manifest(spec);
  AugmentConfig aug;  // full augmentation on
  aug.seed = 13;
  TrainConfig cfg;
  cfg.max_epochs = 4;
  cfg.stop.train_accuracy_threshold = 1.0;
  cfg.seed = 14;
  TrainOptions options;
  options.timing = TimingMode::Fixed;

  auto run_once = [&]() {
    ClassifierModel model =
        build_classifier(tiny_spec(16, 15), HeadSpec{16, 0.2}, 16);
    return train(model, data, aug, cfg, options);
  };
  const TrainingRun a = run_once();
  const TrainingRun b = run_once();
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].train_loss == b.records[i].train_loss);
    CHECK(a.records[i].train_accuracy == b.records[i].train_accuracy);
    CHECK(a.records[i].val_loss == b.records[i].val_loss);
    CHECK(a.records[i].val_accuracy == b.records[i].val_accuracy);
    CHECK(a.records[i].train_precision == b.records[i].train_precision);
    CHECK(a.records[i].val_recall == b.records[i].val_recall);
  }
  CHECK(history_csv(a) == history_csv(b));
}

TEST_CASE("with lr=0 and no augmentation the epoch loss is constant") {
  SynthSpec spec;
  spec.train_per_class = 8;  // 16 samples, batch 8: equal-size batches
  spec.val_per_class = 4;
  spec.image_size = 16;
  const DatasetManifest data = make_synthetic_manifest(spec);
  ClassifierModel model =
      build_classifier(tiny_spec(16, 17), HeadSpec{8, 0.0}, 18);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;  // frozen model
  cfg.batch_size = 8;
  cfg.max_epochs = 3;
  cfg.stop.train_accuracy_threshold = 1.0;
  TrainOptions options;
  options.timing = TimingMode::Fixed;
  const TrainingRun run =
      train(model, data, no_augment(), cfg, options);
  REQUIRE(run.records.size() == 3);
  // Shuffling regroups batches, so equality holds up to fp reassociation.
  CHECK(run.records[1].train_loss ==
        doctest::Approx(run.records[0].train_loss).epsilon(1e-12));
  CHECK(run.records[2].train_loss ==
        doctest::Approx(run.records[0].train_loss).epsilon(1e-12));
  CHECK(run.records[1].val_loss == run.records[0].val_loss);
}

TEST_CASE("reported train loss is the mean of the per-batch losses") {
  SynthSpec spec;
  spec.train_per_class = 10;
  spec.val_per_class = 4;
  spec.image_size = 16;
  const DatasetManifest data = make_synthetic_manifest(spec);
  ClassifierModel model =
      build_classifier(tiny_spec(16, 19), HeadSpec{8, 0.2}, 20);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.max_epochs = 2;
  cfg.stop.train_accuracy_threshold = 1.0;
  cfg.seed = 21;

  std::vector<std::vector<double>> batch_losses(cfg.max_epochs + 1);
  TrainOptions options;
  options.timing = TimingMode::Fixed;
  options.batch_observer = [&](int epoch, int, double loss) {
    batch_losses[epoch].push_back(loss);
  };
  AugmentConfig aug;
  aug.seed = 22;
  const TrainingRun run = train(model, data, aug, cfg, options);
  for (const auto& r : run.records) {
    const auto& losses = batch_losses[r.epoch];
    REQUIRE_FALSE(losses.empty());
    double sum = 0.0;
    for (const double l : losses) {
      sum += l;
    }
    CHECK(r.train_loss == sum / static_cast<double>(losses.size()));
  }
}

TEST_CASE("history CSV carries the pinned column set") {
  TrainingRun run;
  run.records.push_back(epoch_with(1, 0.5, 0.4));
  const std::string csv = history_csv(run);
  CHECK(csv.find("epoch,train_loss,train_acc,train_precision,train_recall,"
                 "val_loss,val_acc,val_precision,val_recall,seconds\n") == 0);
  CHECK(csv.find("\n1,") != std::string::npos);
}

TEST_CASE("config validation enforces the documented ranges") {
  TrainConfig cfg;
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.rmsprop_decay = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.stop.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.stop.train_accuracy_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
