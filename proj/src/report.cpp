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

#include "ctcls/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/fsio.hpp"

namespace ctcls {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string loss4(double v) { return fmt("%.4f", v); }
std::string rate4(double v) { return fmt("%.4f", v); }
std::string percent2(double v) { return fmt("%.2f", v * 100.0) + "%"; }

/// Rows of cells -> aligned text; the last column is not padded.
std::string layout_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) {
        line += " | ";
      }
      line += row[c];
      if (c + 1 < row.size()) {
        line.append(widths[c] - row[c].size(), ' ');
      }
    }
    out += line;
    out += "\n";
  }
  return out;
}

const EpochRecord& record_at(const TrainingRun& run, int epoch) {
  return run.records[static_cast<std::size_t>(epoch - 1)];
}

}  // namespace

std::vector<int> sampled_epochs(int total_epochs, int stride) {
  std::vector<int> epochs;
  for (int e = 1; e <= total_epochs; e += stride) {
    epochs.push_back(e);
  }
  if (epochs.empty() || epochs.back() != total_epochs) {
    epochs.push_back(total_epochs);
  }
  return epochs;
}

std::string diagnosis_comment(bool converged, std::optional<int> onset_epoch,
                              int total_epochs) {
  std::string comment = converged ? "Converged." : "Did not converge.";
  comment += " ";
  if (onset_epoch.has_value()) {
    comment += "Overfitting evident after " + std::to_string(*onset_epoch) +
               " epochs.";
  } else {
    comment += "Overfitting not evident after " +
               std::to_string(total_epochs) + " epochs.";
  }
  return comment;
}

std::string diagnosis_footnote(const DiagnosisRule& rule) {
  return "Comment rule (artifact definition): converged = final training "
         "loss < " +
         fmt("%.2f", rule.convergence_ratio) +
         "x the first epoch's; overfitting onset = validation loss above "
         "its prior best for >= " +
         std::to_string(rule.window) +
         " consecutive epochs through the end of the run while training "
         "loss falls.";
}

OverfitDiagnosis diagnose(const TrainingRun& run, const DiagnosisRule& rule) {
  const int n = static_cast<int>(run.records.size());
  if (n < 2) {
    throw InsufficientHistory("diagnose needs at least 2 epochs, got " +
                              std::to_string(n));
  }
  OverfitDiagnosis d;
  d.converged = record_at(run, n).train_loss <
                rule.convergence_ratio * record_at(run, 1).train_loss;

  for (int e = 2; e + rule.window - 1 <= n; ++e) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i < e; ++i) {
      best = std::min(best, record_at(run, i).val_loss);
    }
    bool sustained = true;
    for (int i = e; i <= n; ++i) {
      if (!(record_at(run, i).val_loss > best)) {
        sustained = false;
        break;
      }
    }
    if (!sustained) {
      continue;
    }
    if (record_at(run, e + rule.window - 1).train_loss <
        record_at(run, e).train_loss) {
      d.overfit_onset_epoch = e;
      break;
    }
  }
  d.comment = diagnosis_comment(d.converged, d.overfit_onset_epoch, n);
  return d;
}

std::string render_loss_accuracy_table(const TrainingRun& run, int stride) {
  if (run.records.empty()) {
    throw InsufficientHistory("render_loss_accuracy_table: empty run");
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Epoch", "Training Loss", "Validation Loss",
                  "Training Accuracy", "Validation Accuracy"});
  for (const int e :
       sampled_epochs(static_cast<int>(run.records.size()), stride)) {
    const EpochRecord& r = record_at(run, e);
    rows.push_back({"After Epoch " + std::to_string(e), loss4(r.train_loss),
                    loss4(r.val_loss), percent2(r.train_accuracy),
                    percent2(r.val_accuracy)});
  }
  return layout_table(rows);
}

std::string render_precision_recall_table(const TrainingRun& run,
                                          int stride) {
  if (run.records.empty()) {
    throw InsufficientHistory("render_precision_recall_table: empty run");
  }
  const auto epochs =
      sampled_epochs(static_cast<int>(run.records.size()), stride);
  std::vector<std::vector<std::string>> rows(5);
  rows[0].push_back("Factor");
  rows[1].push_back("Training Precision");
  rows[2].push_back("Validation Precision");
  rows[3].push_back("Training Recall");
  rows[4].push_back("Validation Recall");
  for (const int e : epochs) {
    const EpochRecord& r = record_at(run, e);
    rows[0].push_back("After Epoch " + std::to_string(e));
    rows[1].push_back(rate4(r.train_precision));
    rows[2].push_back(rate4(r.val_precision));
    rows[3].push_back(rate4(r.train_recall));
    rows[4].push_back(rate4(r.val_recall));
  }
  return layout_table(rows);
}

int percent_round_half_up(double fraction) {
  return static_cast<int>(std::llround(fraction * 100.0));
}

std::string render_comparison(std::span<const ComparisonRow> rows) {
  if (rows.empty()) {
    throw ConfigError("render_comparison: no rows");
  }
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Model", "Accuracy", "Training Comment"});
  for (const ComparisonRow& row : rows) {
    cells.push_back(
        {row.model_name,
         std::to_string(percent_round_half_up(row.final_val_accuracy)) + "%",
         row.diagnosis.comment});
  }
  return layout_table(cells);
}

nlohmann::ordered_json comparison_json(std::span<const ComparisonRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ComparisonRow& row : rows) {
    arr.push_back(
        {{"model", row.model_name},
         {"accuracy", row.final_val_accuracy},
         {"accuracy_percent", percent_round_half_up(row.final_val_accuracy)},
         {"comment", row.diagnosis.comment}});
  }
  return {{"rows", std::move(arr)}};
}

// -- curves -------------------------------------------------------------

namespace {

struct Series {
  std::string label;
  cv::Scalar color;  // BGR
  std::vector<double> values;
};

void write_plot_png(const std::filesystem::path& path,
                    const std::string& ylabel,
                    const std::vector<Series>& series) {
  const int width = 960;
  const int height = 640;
  const int margin_left = 90;
  const int margin_right = 40;
  const int margin_top = 50;
  const int margin_bottom = 70;
  const int plot_w = width - margin_left - margin_right;
  const int plot_h = height - margin_top - margin_bottom;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (const double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    const double pad = std::max(std::abs(hi), 1.0) * 0.1;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  const double x_span = n > 1 ? static_cast<double>(n - 1) : 1.0;

  auto px = [&](double epoch_idx) {
    return margin_left + static_cast<int>(std::lround(
                             epoch_idx / x_span * plot_w));
  };
  auto py = [&](double v) {
    return margin_top +
           static_cast<int>(std::lround((hi - v) / (hi - lo) * plot_h));
  };

  cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
  const cv::Scalar axis_color(60, 60, 60);
  const cv::Scalar grid_color(220, 220, 220);
  const auto font = cv::FONT_HERSHEY_SIMPLEX;

  // Horizontal grid + y tick labels.
  const int y_ticks = 6;
  for (int t = 0; t <= y_ticks; ++t) {
    const double v = lo + (hi - lo) * t / y_ticks;
    const int y = py(v);
    cv::line(canvas, {margin_left, y}, {width - margin_right, y}, grid_color,
             1);
    cv::putText(canvas, fmt("%.3g", v), {8, y + 4}, font, 0.45, axis_color, 1,
                cv::LINE_AA);
  }
  // X ticks on whole epochs.
  const int max_x_ticks = 10;
  const int step =
      std::max<int>(1, static_cast<int>((n + max_x_ticks - 1) / max_x_ticks));
  for (std::size_t e = 0; e < n; e += static_cast<std::size_t>(step)) {
    const int x = px(static_cast<double>(e));
    cv::line(canvas, {x, height - margin_bottom},
             {x, height - margin_bottom + 6}, axis_color, 1);
    cv::putText(canvas, std::to_string(e + 1), {x - 8, height - margin_bottom + 24},
                font, 0.45, axis_color, 1, cv::LINE_AA);
  }
  cv::rectangle(canvas, {margin_left, margin_top},
                {width - margin_right, height - margin_bottom}, axis_color, 1);

  for (const auto& s : series) {
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
      cv::line(canvas,
               {px(static_cast<double>(i)), py(s.values[i])},
               {px(static_cast<double>(i + 1)), py(s.values[i + 1])}, s.color,
               2, cv::LINE_AA);
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      cv::circle(canvas, {px(static_cast<double>(i)), py(s.values[i])}, 3,
                 s.color, cv::FILLED, cv::LINE_AA);
    }
  }

  // Legend, top-right inside the plot box.
  int ly = margin_top + 22;
  for (const auto& s : series) {
    const int lx = width - margin_right - 180;
    cv::line(canvas, {lx, ly - 5}, {lx + 28, ly - 5}, s.color, 2, cv::LINE_AA);
    cv::putText(canvas, s.label, {lx + 36, ly}, font, 0.5, axis_color, 1,
                cv::LINE_AA);
    ly += 22;
  }

  cv::putText(canvas, "Epoch", {width / 2 - 24, height - 18}, font, 0.55,
              axis_color, 1, cv::LINE_AA);
  cv::putText(canvas, ylabel, {14, margin_top - 18}, font, 0.55, axis_color,
              1, cv::LINE_AA);
  cv::putText(canvas, ylabel + " vs Epoch", {margin_left, 28}, font, 0.6,
              axis_color, 1, cv::LINE_AA);

  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", canvas, buf)) {
    throw IoError("PNG encode failed for " + path.string());
  }
  write_file_atomic(path, buf);
}

std::string sidecar_csv(const char* col_a, const char* col_b,
                        const std::vector<double>& a,
                        const std::vector<double>& b) {
  std::string out = std::string("epoch,") + col_a + "," + col_b + "\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, a[i], b[i]);
    out += buf;
  }
  return out;
}

}  // namespace

void render_curves(const TrainingRun& run,
                   const std::filesystem::path& out_dir) {
  if (run.records.empty()) {
    throw InsufficientHistory("render_curves: empty run");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  std::vector<double> train_loss, val_loss, train_acc, val_acc;
  for (const EpochRecord& r : run.records) {
    train_loss.push_back(r.train_loss);
    val_loss.push_back(r.val_loss);
    train_acc.push_back(r.train_accuracy);
    val_acc.push_back(r.val_accuracy);
  }

  const cv::Scalar train_color(180, 119, 31);  // BGR
  const cv::Scalar val_color(14, 127, 255);
  write_plot_png(out_dir / "loss_vs_epoch.png", "Loss",
                 {{"train", train_color, train_loss},
                  {"validation", val_color, val_loss}});
  write_plot_png(out_dir / "accuracy_vs_epoch.png", "Accuracy",
                 {{"train", train_color, train_acc},
                  {"validation", val_color, val_acc}});
  write_file_atomic(out_dir / "loss_vs_epoch.csv",
                    sidecar_csv("train_loss", "val_loss", train_loss,
                                val_loss));
  write_file_atomic(out_dir / "accuracy_vs_epoch.csv",
                    sidecar_csv("train_acc", "val_acc", train_acc, val_acc));
}

}  // namespace ctcls
