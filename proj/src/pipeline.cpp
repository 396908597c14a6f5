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

#include "ctcls/pipeline.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"

namespace ctcls {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

ScanOptions scan_options(const PipelineConfig& config) {
  ScanOptions opts;
  opts.class_map = config.dataset.class_map;
  opts.split_ratio = config.dataset.split_ratio;
  opts.split_seed = config.dataset.split_seed;
  return opts;
}

DatasetManifest scan_from_config(const PipelineConfig& config,
                                 std::ostream& out) {
  if (config.dataset.root.empty()) {
    throw ConfigError("dataset.root must be set for this command");
  }
  DatasetManifest manifest =
      scan_dataset(config.dataset.root, scan_options(config));
  for (const auto& w : manifest.warnings) {
    out << "warning: " << w << "\n";
  }
  return manifest;
}

nlohmann::ordered_json record_to_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},
          {"train_loss", r.train_loss},
          {"train_acc", r.train_accuracy},
          {"train_precision", r.train_precision},
          {"train_recall", r.train_recall},
          {"val_loss", r.val_loss},
          {"val_acc", r.val_accuracy},
          {"val_precision", r.val_precision},
          {"val_recall", r.val_recall},
          {"seconds", r.duration_seconds}};
}

EpochRecord record_from_json(const json& j) {
  EpochRecord r;
  r.epoch = j.at("epoch").get<int>();
  r.train_loss = j.at("train_loss").get<double>();
  r.train_accuracy = j.at("train_acc").get<double>();
  r.train_precision = j.at("train_precision").get<double>();
  r.train_recall = j.at("train_recall").get<double>();
  r.val_loss = j.at("val_loss").get<double>();
  r.val_accuracy = j.at("val_acc").get<double>();
  r.val_precision = j.at("val_precision").get<double>();
  r.val_recall = j.at("val_recall").get<double>();
  r.duration_seconds = j.at("seconds").get<double>();
  return r;
}

BackboneSpec backbone_spec(const PipelineConfig& config) {
  BackboneSpec spec = config.backbone;
  spec.input_h = config.dataset.input_h;
  spec.input_w = config.dataset.input_w;
  return spec;
}

TrainingRun load_run_json(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError("run snapshot " + path.string() + " is not valid JSON: " +
                  e.what());
  }
  return run_from_json(j);
}

int cmd_scan(const PipelineConfig& config, std::ostream& out) {
  const DatasetManifest manifest = scan_from_config(config, out);
  out << manifest.counts_json().dump(2) << "\n";
  ensure_dir(config.run_dir());
  write_json(config.run_dir() / "manifest.json", manifest.counts_json());
  return 0;
}

int cmd_train(const PipelineConfig& config, std::ostream& out) {
  const DatasetManifest manifest = scan_from_config(config, out);
  ClassifierModel model =
      build_classifier(backbone_spec(config), config.head, config.seed);

  TrainOptions options;
  options.timing =
      config.timing == TimingMode::Wall ? TimingMode::Wall : TimingMode::Fixed;
  options.normalize = config.dataset.normalize;
  options.log = &out;

  const TrainingRun run =
      train(model, manifest, config.augment, config.training, options);

  const fs::path dir = config.run_dir();
  ensure_dir(dir);
  write_json(dir / "manifest.json", manifest.counts_json());
  write_json(dir / "model_summary.json", model.summary());
  write_history_csv(run, dir / "history.csv");
  write_json(dir / "run.json", run_to_json(run, config));
  model.export_head().save(dir / "head.ctw");
  nlohmann::ordered_json model_ref;
  model_ref["backbone"] = {{"architecture", config.backbone.architecture},
                           {"weights", config.backbone.weights},
                           {"truncation_node", config.backbone.truncation_node},
                           {"frozen", config.backbone.frozen},
                           {"random_seed", config.backbone.random_seed},
                           {"input_size",
                            {config.dataset.input_h, config.dataset.input_w}}};
  model_ref["head"] = {{"dense_units", config.head.dense_units},
                       {"dropout_rate", config.head.dropout_rate}};
  model_ref["head_weights"] = "head.ctw";
  write_json(dir / "model.json", model_ref);

  out << "stopped after epoch " << run.records.back().epoch << " ("
      << to_string(run.stop_reason) << ")\n";
  return 0;
}

ClassifierModel load_saved_model(const PipelineConfig& config) {
  const fs::path dir = config.run_dir();
  json ref;
  try {
    ref = json::parse(read_file(dir / "model.json"));
  } catch (const json::exception& e) {
    throw IoError("model reference is not valid JSON: " +
                  std::string(e.what()));
  }
  BackboneSpec spec;
  const auto& b = ref.at("backbone");
  spec.architecture = b.at("architecture").get<std::string>();
  spec.weights = b.at("weights").get<std::string>();
  spec.truncation_node = b.at("truncation_node").get<std::string>();
  spec.frozen = b.at("frozen").get<bool>();
  spec.random_seed = b.at("random_seed").get<std::uint64_t>();
  spec.input_h = b.at("input_size")[0].get<int>();
  spec.input_w = b.at("input_size")[1].get<int>();
  HeadSpec head;
  head.dense_units = ref.at("head").at("dense_units").get<int>();
  head.dropout_rate = ref.at("head").at("dropout_rate").get<double>();

  ClassifierModel model = build_classifier(spec, head, config.seed);
  model.import_head(WeightsArchive::load(
      dir / ref.at("head_weights").get<std::string>()));
  return model;
}

int cmd_evaluate(const PipelineConfig& config, std::ostream& out) {
  const DatasetManifest manifest = scan_from_config(config, out);
  ClassifierModel model = load_saved_model(config);

  const Shape in = model.input_shape();
  std::vector<Tensor> images;
  std::vector<double> targets;
  for (const auto& s : manifest.val_samples) {
    Tensor t = load_sample(s, in.h, in.w);
    if (config.dataset.normalize == NormalizeMode::Symmetric) {
      for (auto& v : t.values()) {
        v = v * 2.0 - 1.0;
      }
    }
    images.push_back(std::move(t));
    targets.push_back(target_of(s.label));
  }
  const Evaluation ev =
      evaluate_on(model, images, targets, config.training.batch_size);

  nlohmann::ordered_json j;
  j["val_loss"] = ev.loss;
  j["val_acc"] = ev.metrics.accuracy;
  j["val_precision"] = ev.metrics.precision;
  j["val_recall"] = ev.metrics.recall;
  j["val_f1"] = ev.metrics.f1;
  j["counts"] = {{"tp", ev.counts.tp},
                 {"fp", ev.counts.fp},
                 {"fn", ev.counts.fn},
                 {"tn", ev.counts.tn}};
  out << j.dump(2) << "\n";
  ensure_dir(config.run_dir());
  write_json(config.run_dir() / "evaluate.json", j);
  return 0;
}

int cmd_report(const PipelineConfig& config, std::ostream& out) {
  const fs::path dir = config.run_dir();
  const TrainingRun run = load_run_json(dir / "run.json");

  const std::string loss_acc = render_loss_accuracy_table(run);
  const std::string prec_rec = render_precision_recall_table(run);
  const OverfitDiagnosis diag = diagnose(run);
  const std::string diagnosis_text =
      diag.comment + "\n" + diagnosis_footnote() + "\n";

  write_file_atomic(dir / "loss_accuracy.txt", loss_acc);
  write_file_atomic(dir / "precision_recall.txt", prec_rec);
  write_file_atomic(dir / "diagnosis.txt", diagnosis_text);
  render_curves(run, dir);

  out << "Loss & Accuracy\n" << loss_acc << "\n";
  out << "Precision & Recall\n" << prec_rec << "\n";
  out << diagnosis_text;
  return 0;
}

int cmd_compare(const PipelineConfig& config, std::ostream& out) {
  std::vector<ComparisonRow> rows;
  bool any_from_runs = false;
  for (const auto& run_path : config.compare.runs) {
    const TrainingRun run = load_run_json(run_path);
    ComparisonRow row;
    row.model_name = run_path.parent_path().filename().string();
    if (row.model_name.empty()) {
      row.model_name = run_path.string();
    }
    row.final_val_accuracy = run.records.back().val_accuracy;
    row.diagnosis = diagnose(run);
    rows.push_back(std::move(row));
    any_from_runs = true;
  }
  if (config.compare.fixtures) {
    for (auto& row : load_comparison_fixtures(*config.compare.fixtures)) {
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) {
    throw ConfigError(
        "compare needs run snapshots and/or a fixtures file in the config");
  }

  std::string table = render_comparison(rows);
  if (any_from_runs) {
    table += diagnosis_footnote() + "\n";
  }
  out << table;
  ensure_dir(config.run_dir());
  write_file_atomic(config.run_dir() / "comparison.txt", table);
  write_json(config.run_dir() / "comparison.json", comparison_json(rows));
  return 0;
}

}  // namespace

nlohmann::ordered_json run_to_json(const TrainingRun& run,
                                   const PipelineConfig& config) {
  nlohmann::ordered_json j;
  j["run_id"] = config.run_id;
  j["seed"] = config.seed;
  j["stop_reason"] = to_string(run.stop_reason);
  j["epochs"] = run.records.size();
  j["total_seconds"] = run.total_seconds;
  j["config"] = config.to_json();
  j["records"] = nlohmann::ordered_json::array();
  for (const EpochRecord& r : run.records) {
    j["records"].push_back(record_to_json(r));
  }
  return j;
}

TrainingRun run_from_json(const nlohmann::json& j) {
  TrainingRun run;
  run.stop_reason =
      stop_reason_from_string(j.at("stop_reason").get<std::string>());
  run.total_seconds = j.at("total_seconds").get<double>();
  const PipelineConfig config = PipelineConfig::from_json(j.at("config"));
  run.config = config.training;
  for (const auto& rec : j.at("records")) {
    run.records.push_back(record_from_json(rec));
  }
  if (run.records.empty()) {
    throw InsufficientHistory("run snapshot has no epoch records");
  }
  return run;
}

std::vector<ComparisonRow> load_comparison_fixtures(
    const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError("fixtures file " + path.string() + " is not valid JSON: " +
                  e.what());
  }
  std::vector<ComparisonRow> rows;
  for (const auto& r : j.at("rows")) {
    ComparisonRow row;
    row.model_name = r.at("model").get<std::string>();
    row.final_val_accuracy = r.at("accuracy").get<double>();
    row.diagnosis.comment = r.at("comment").get<std::string>();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ConfigError("fixtures file has no rows: " + path.string());
  }
  return rows;
}

int run_pipeline(const PipelineConfig& config, const std::string& command,
                 std::ostream& out) {
  config.validate();
  if (command == "scan") {
    return cmd_scan(config, out);
  }
  if (command == "train") {
    return cmd_train(config, out);
  }
  if (command == "evaluate") {
    return cmd_evaluate(config, out);
  }
  if (command == "report") {
    return cmd_report(config, out);
  }
  if (command == "compare") {
    return cmd_compare(config, out);
  }
  throw ConfigError("unknown command '" + command +
                    "'; expected scan|train|evaluate|report|compare");
}

}  // namespace ctcls
