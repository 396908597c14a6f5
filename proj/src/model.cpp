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

#include "ctcls/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "ctcls/errors.hpp"
#include "ctcls/rng.hpp"

namespace ctcls {

namespace {

constexpr double kBatchNormEpsilon = 1e-3;
// Keeps forward outputs strictly inside (0,1) at double precision.
constexpr double kProbFloor = 1e-12;
// RANDOM backbones exist to feed a trainable head in tests and synthetic
// runs. Plain Glorot kernels under ReLU decay the activations layer by
// layer, leaving features too small to train a head at realistic learning
// rates, so random kernels are drawn with a widened limit.
constexpr double kRandomKernelGain = 3.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Pad {
  int top = 0;
  int left = 0;
};

Pad same_padding(const Shape& in, const Shape& out, int kh, int kw, int sh,
                 int sw) {
  const int pad_h = std::max((out.h - 1) * sh + kh - in.h, 0);
  const int pad_w = std::max((out.w - 1) * sw + kw - in.w, 0);
  return {pad_h / 2, pad_w / 2};
}

Tensor eval_conv(const LayerDef& l, const Shape& out_shape, const Tensor& in,
                 const LayerWeights& w) {
  Tensor out(out_shape.h, out_shape.w, out_shape.c);
  const int cin = in.channels();
  const Pad pad = l.pad == Padding::Same
                      ? same_padding(in.shape(), out_shape, l.kh, l.kw, l.sh,
                                     l.sw)
                      : Pad{};
  for (int oy = 0; oy < out_shape.h; ++oy) {
    for (int ox = 0; ox < out_shape.w; ++ox) {
      for (int ky = 0; ky < l.kh; ++ky) {
        const int iy = oy * l.sh - pad.top + ky;
        if (iy < 0 || iy >= in.height()) {
          continue;
        }
        for (int kx = 0; kx < l.kw; ++kx) {
          const int ix = ox * l.sw - pad.left + kx;
          if (ix < 0 || ix >= in.width()) {
            continue;
          }
          const double* kernel_at =
              w.kernel.data() +
              (static_cast<std::size_t>(ky) * l.kw + kx) * cin * out_shape.c;
          for (int ic = 0; ic < cin; ++ic) {
            const double v = in.at(iy, ix, ic);
            const double* krow = kernel_at + static_cast<std::size_t>(ic) *
                                                 out_shape.c;
            double* orow = &out.at(oy, ox, 0);
            for (int oc = 0; oc < out_shape.c; ++oc) {
              orow[oc] += v * krow[oc];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor eval_pool(const LayerDef& l, const Shape& out_shape, const Tensor& in,
                 bool is_max) {
  Tensor out(out_shape.h, out_shape.w, out_shape.c);
  const Pad pad = l.pad == Padding::Same
                      ? same_padding(in.shape(), out_shape, l.kh, l.kw, l.sh,
                                     l.sw)
                      : Pad{};
  for (int oy = 0; oy < out_shape.h; ++oy) {
    for (int ox = 0; ox < out_shape.w; ++ox) {
      for (int c = 0; c < out_shape.c; ++c) {
        double acc = is_max ? -std::numeric_limits<double>::infinity() : 0.0;
        int count = 0;
        for (int ky = 0; ky < l.kh; ++ky) {
          const int iy = oy * l.sh - pad.top + ky;
          if (iy < 0 || iy >= in.height()) {
            continue;
          }
          for (int kx = 0; kx < l.kw; ++kx) {
            const int ix = ox * l.sw - pad.left + kx;
            if (ix < 0 || ix >= in.width()) {
              continue;
            }
            const double v = in.at(iy, ix, c);
            acc = is_max ? std::max(acc, v) : acc + v;
            ++count;
          }
        }
        // Average pooling divides by the count of in-bounds taps.
        out.at(oy, ox, c) = is_max ? acc : acc / count;
      }
    }
  }
  return out;
}

Tensor eval_batchnorm(const Tensor& in, const LayerWeights& w) {
  Tensor out(in.height(), in.width(), in.channels());
  std::vector<double> inv_std(in.channels());
  for (int c = 0; c < in.channels(); ++c) {
    inv_std[c] = 1.0 / std::sqrt(w.variance[c] + kBatchNormEpsilon);
  }
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      for (int c = 0; c < in.channels(); ++c) {
        out.at(y, x, c) = (in.at(y, x, c) - w.mean[c]) * inv_std[c] + w.beta[c];
      }
    }
  }
  return out;
}

std::vector<double> glorot_uniform(std::size_t n, double fan_in,
                                   double fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<double> out(n);
  for (auto& v : out) {
    v = uniform_real(rng, -limit, limit);
  }
  return out;
}

void check_dims(const NamedTensor& t, const std::vector<std::uint32_t>& want) {
  if (t.dims != want) {
    std::string got, expect;
    for (const auto d : t.dims) {
      got += (got.empty() ? "" : "x") + std::to_string(d);
    }
    for (const auto d : want) {
      expect += (expect.empty() ? "" : "x") + std::to_string(d);
    }
    throw WeightsMismatch("tensor '" + t.name + "' has shape " + got +
                          "; architecture expects " + expect);
  }
}

std::vector<LayerWeights> instantiate_weights(const ArchGraph& g,
                                              int up_to_index,
                                              const BackboneSpec& spec) {
  std::vector<LayerWeights> weights(g.layers().size());
  const bool random = spec.weights == "RANDOM";
  WeightsArchive archive;
  if (!random) {
    archive = WeightsArchive::load(spec.weights);
  }
  for (int i = 0; i <= up_to_index; ++i) {
    const LayerDef& l = g.layers()[i];
    if (l.kind == OpKind::Conv2D) {
      const Shape in = g.output_shape(l.inputs.front());
      const std::size_t n =
          static_cast<std::size_t>(l.kh) * l.kw * in.c * l.filters;
      if (random) {
        auto rng = make_rng(spec.random_seed, static_cast<std::uint64_t>(i));
        const double rf = static_cast<double>(l.kh) * l.kw;
        const double g2 = kRandomKernelGain * kRandomKernelGain;
        weights[i].kernel =
            glorot_uniform(n, rf * in.c / g2, rf * l.filters / g2, rng);
      } else {
        const NamedTensor& t = archive.require(l.name + "/kernel");
        check_dims(t, {static_cast<std::uint32_t>(l.kh),
                       static_cast<std::uint32_t>(l.kw),
                       static_cast<std::uint32_t>(in.c),
                       static_cast<std::uint32_t>(l.filters)});
        weights[i].kernel = t.values;
      }
    } else if (l.kind == OpKind::BatchNorm) {
      const int c = g.output_shape(i).c;
      if (random) {
        weights[i].beta.assign(c, 0.0);
        weights[i].mean.assign(c, 0.0);
        weights[i].variance.assign(c, 1.0);
      } else {
        const auto want = std::vector<std::uint32_t>{
            static_cast<std::uint32_t>(c)};
        const NamedTensor& beta = archive.require(l.name + "/beta");
        const NamedTensor& mean = archive.require(l.name + "/moving_mean");
        const NamedTensor& var = archive.require(l.name + "/moving_variance");
        check_dims(beta, want);
        check_dims(mean, want);
        check_dims(var, want);
        weights[i].beta = beta.values;
        weights[i].mean = mean.values;
        weights[i].variance = var.values;
      }
    }
  }
  return weights;
}

}  // namespace

void BackboneSpec::validate() const {
  if (architecture.empty()) {
    throw ConfigError("backbone architecture must be set");
  }
  if (input_h <= 0 || input_w <= 0) {
    throw ConfigError("backbone input size must be positive");
  }
  if (weights.empty()) {
    throw ConfigError("backbone weights must be a path or RANDOM");
  }
}

void HeadSpec::validate() const {
  if (dense_units < 1) {
    throw ConfigError("head dense_units must be >= 1");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("head dropout_rate must lie in [0, 1)");
  }
}

Backbone Backbone::registry(const std::string& architecture, int input_h,
                            int input_w) {
  Backbone b;
  b.graph_ = build_architecture(architecture, input_h, input_w);
  return b;
}

Backbone Backbone::from_spec(const BackboneSpec& spec) {
  spec.validate();
  Backbone b;
  b.graph_ = build_architecture(spec.architecture, spec.input_h, spec.input_w);
  const int trunc = b.graph_.index_of(spec.truncation_node);
  b.weights_ = std::make_shared<const std::vector<LayerWeights>>(
      instantiate_weights(b.graph_, trunc, spec));
  b.instantiated_up_to_ = trunc;
  return b;
}

const std::vector<LayerWeights>& Backbone::weights() const {
  if (!weights_) {
    throw ConfigError("backbone has no instantiated weights (registry only)");
  }
  return *weights_;
}

FeatureExtractor truncate_backbone(const Backbone& full,
                                   const std::string& node) {
  FeatureExtractor fx;
  fx.graph_ = full.graph_;
  fx.trunc_idx_ = full.graph_.index_of(node);
  fx.weights_ = full.weights_;
  fx.instantiated_up_to_ = full.instantiated_up_to_;
  if (fx.weights_ && fx.trunc_idx_ > fx.instantiated_up_to_) {
    throw ConfigError("backbone weights were instantiated only up to layer " +
                      std::to_string(fx.instantiated_up_to_) +
                      "; cannot truncate at '" + node + "'");
  }
  return fx;
}

Shape FeatureExtractor::feature_shape() const {
  return graph_.output_shape(trunc_idx_);
}

std::int64_t FeatureExtractor::param_count() const {
  return graph_.params_up_to(trunc_idx_);
}

Tensor FeatureExtractor::forward(const Tensor& image) const {
  if (!weights_) {
    throw ConfigError("feature extractor has no weights; build from a spec");
  }
  if (image.shape() != graph_.input_shape()) {
    throw ShapeMismatch("input image is " + image.shape().str() +
                        "; extractor expects " + graph_.input_shape().str());
  }
  std::vector<Tensor> outputs(static_cast<std::size_t>(trunc_idx_) + 1);
  for (int i = 0; i <= trunc_idx_; ++i) {
    const LayerDef& l = graph_.layers()[i];
    const Shape out_shape = graph_.output_shape(i);
    switch (l.kind) {
      case OpKind::Input:
        outputs[i] = image;
        break;
      case OpKind::Conv2D:
        outputs[i] = eval_conv(l, out_shape, outputs[l.inputs.front()],
                               (*weights_)[i]);
        break;
      case OpKind::BatchNorm:
        outputs[i] = eval_batchnorm(outputs[l.inputs.front()], (*weights_)[i]);
        break;
      case OpKind::ReLU: {
        Tensor t = outputs[l.inputs.front()];
        for (auto& v : t.values()) {
          v = std::max(0.0, v);
        }
        outputs[i] = std::move(t);
        break;
      }
      case OpKind::MaxPool:
        outputs[i] =
            eval_pool(l, out_shape, outputs[l.inputs.front()], true);
        break;
      case OpKind::AvgPool:
        outputs[i] =
            eval_pool(l, out_shape, outputs[l.inputs.front()], false);
        break;
      case OpKind::Concat: {
        Tensor t(out_shape.h, out_shape.w, out_shape.c);
        int base = 0;
        for (const int src : l.inputs) {
          const Tensor& s = outputs[src];
          for (int y = 0; y < s.height(); ++y) {
            for (int x = 0; x < s.width(); ++x) {
              for (int c = 0; c < s.channels(); ++c) {
                t.at(y, x, base + c) = s.at(y, x, c);
              }
            }
          }
          base += s.channels();
        }
        outputs[i] = std::move(t);
        break;
      }
    }
  }
  return std::move(outputs[trunc_idx_]);
}

std::vector<double> FeatureExtractor::forward_flat(const Tensor& image) const {
  return forward(image).values();
}

HeadParams::HeadParams(std::int64_t feature_dim, int units)
    : feature_dim_(feature_dim),
      units_(units),
      flat_(static_cast<std::size_t>(param_count(feature_dim, units)), 0.0) {}

ClassifierModel::ClassifierModel(FeatureExtractor extractor,
                                 HeadSpec head_spec, std::uint64_t init_seed)
    : extractor_(std::move(extractor)), head_spec_(head_spec) {
  head_spec_.validate();
  const std::int64_t feat = extractor_.feature_shape().flat();
  head_ = HeadParams(feat, head_spec_.dense_units);
  // Glorot-uniform weights, zero biases.
  auto rng = make_rng(init_seed, 0x4ead);
  const double units = head_spec_.dense_units;
  auto w1 = glorot_uniform(head_.w1().size(), static_cast<double>(feat),
                           units, rng);
  std::copy(w1.begin(), w1.end(), head_.w1().begin());
  auto w2 = glorot_uniform(head_.w2().size(), units, 1.0, rng);
  std::copy(w2.begin(), w2.end(), head_.w2().begin());
}

std::int64_t ClassifierModel::head_param_count() const {
  return HeadParams::param_count(head_.feature_dim(), head_.units());
}

std::int64_t ClassifierModel::backbone_param_count() const {
  return extractor_.param_count();
}

std::int64_t ClassifierModel::trainable_param_count() const {
  return head_param_count();
}

std::vector<std::vector<double>> ClassifierModel::features(
    const std::vector<Tensor>& batch) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(batch.size());
  for (const Tensor& image : batch) {
    rows.push_back(extractor_.forward_flat(image));
  }
  return rows;
}

ClassifierModel::Forward ClassifierModel::forward_from_features(
    std::vector<std::vector<double>> features, bool training,
    std::mt19937_64* rng) const {
  const auto batch = features.size();
  const int units = head_.units();
  const auto feat_dim = static_cast<std::size_t>(head_.feature_dim());
  const double drop = head_spec_.dropout_rate;
  const bool use_dropout = training && drop > 0.0;
  if (use_dropout && rng == nullptr) {
    throw TrainingError("training-mode forward needs an rng for dropout");
  }

  Forward f;
  f.training = training;
  f.features = std::move(features);
  f.hidden_pre.resize(batch);
  f.hidden.resize(batch);
  if (use_dropout) {
    f.drop_mask.resize(batch);
  }
  f.probs.resize(batch);

  const auto w1 = head_.w1();
  const auto b1 = head_.b1();
  const auto w2 = head_.w2();
  for (std::size_t i = 0; i < batch; ++i) {
    const auto& x = f.features[i];
    if (x.size() != feat_dim) {
      throw ShapeMismatch("feature row has " + std::to_string(x.size()) +
                          " values; head expects " + std::to_string(feat_dim));
    }
    std::vector<double> pre(b1.begin(), b1.end());
    for (std::size_t ff = 0; ff < feat_dim; ++ff) {
      const double v = x[ff];
      if (v == 0.0) {
        continue;
      }
      const double* wrow = w1.data() + ff * units;
      for (int u = 0; u < units; ++u) {
        pre[u] += v * wrow[u];
      }
    }
    std::vector<double> h(pre.size());
    for (std::size_t u = 0; u < pre.size(); ++u) {
      h[u] = std::max(0.0, pre[u]);
    }
    if (use_dropout) {
      // Inverted dropout: survivors scaled by 1/keep at train time.
      std::vector<std::uint8_t> mask(h.size());
      const double keep = 1.0 - drop;
      for (std::size_t u = 0; u < h.size(); ++u) {
        mask[u] = bernoulli(*rng, keep) ? 1 : 0;
        h[u] = mask[u] ? h[u] / keep : 0.0;
      }
      f.drop_mask[i] = std::move(mask);
    }
    double logit = head_.b2();
    for (int u = 0; u < units; ++u) {
      logit += h[u] * w2[u];
    }
    f.probs[i] = std::clamp(sigmoid(logit), kProbFloor, 1.0 - kProbFloor);
    f.hidden_pre[i] = std::move(pre);
    f.hidden[i] = std::move(h);
  }
  return f;
}

ClassifierModel::Forward ClassifierModel::forward_cached(
    const std::vector<Tensor>& batch, bool training,
    std::mt19937_64* rng) const {
  return forward_from_features(features(batch), training, rng);
}

std::vector<double> ClassifierModel::forward(const std::vector<Tensor>& batch,
                                             bool training,
                                             std::mt19937_64* rng) const {
  return forward_cached(batch, training, rng).probs;
}

std::vector<double> ClassifierModel::gradients(
    const Forward& cache, std::span<const double> targets) const {
  const auto batch = cache.probs.size();
  if (targets.size() != batch) {
    throw ShapeMismatch("gradients: " + std::to_string(batch) +
                        " probabilities vs " + std::to_string(targets.size()) +
                        " targets");
  }
  const int units = head_.units();
  const auto feat_dim = static_cast<std::size_t>(head_.feature_dim());
  const double keep = 1.0 - head_spec_.dropout_rate;
  const bool used_dropout = cache.training && head_spec_.dropout_rate > 0.0;

  HeadParams grads(head_.feature_dim(), units);
  auto gw1 = grads.w1();
  auto gb1 = grads.b1();
  auto gw2 = grads.w2();
  const auto w2 = head_.w2();

  for (std::size_t i = 0; i < batch; ++i) {
    // Mean BCE over the batch against the sigmoid logit.
    const double dlogit =
        (cache.probs[i] - targets[i]) / static_cast<double>(batch);
    for (int u = 0; u < units; ++u) {
      gw2[u] += dlogit * cache.hidden[i][u];
    }
    grads.b2() += dlogit;
    for (int u = 0; u < units; ++u) {
      double dh = dlogit * w2[u];
      if (used_dropout) {
        dh = cache.drop_mask[i][u] ? dh / keep : 0.0;
      }
      if (cache.hidden_pre[i][u] <= 0.0) {
        continue;
      }
      gb1[u] += dh;
      const auto& x = cache.features[i];
      for (std::size_t ff = 0; ff < feat_dim; ++ff) {
        gw1[ff * units + u] += dh * x[ff];
      }
    }
  }
  return std::vector<double>(grads.all().begin(), grads.all().end());
}

std::vector<std::pair<std::string, std::vector<double>>>
ClassifierModel::backbone_gradients() const {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  const ArchGraph& g = extractor_.graph();
  for (int i = 0; i <= extractor_.truncation_index(); ++i) {
    const std::int64_t n = g.layer_param_count(i);
    if (n > 0) {
      out.emplace_back(g.layers()[i].name,
                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    }
  }
  return out;
}

nlohmann::ordered_json ClassifierModel::summary() const {
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  const ArchGraph& g = extractor_.graph();
  for (int i = 0; i <= extractor_.truncation_index(); ++i) {
    const Shape s = g.output_shape(i);
    layers.push_back({{"name", g.layers()[i].name},
                      {"output_shape", {s.h, s.w, s.c}},
                      {"params", g.layer_param_count(i)},
                      {"trainable", false}});
  }
  const Shape feat = feature_shape();
  const int units = head_.units();
  layers.push_back({{"name", "flatten"},
                    {"output_shape", {feat.flat()}},
                    {"params", 0},
                    {"trainable", false}});
  layers.push_back(
      {{"name", "dense"},
       {"output_shape", {units}},
       {"params", feat.flat() * units + units},
       {"trainable", true}});
  layers.push_back({{"name", "dropout"},
                    {"output_shape", {units}},
                    {"params", 0},
                    {"trainable", false}});
  layers.push_back({{"name", "dense_1"},
                    {"output_shape", {1}},
                    {"params", units + 1},
                    {"trainable", true}});
  nlohmann::ordered_json j;
  j["layers"] = std::move(layers);
  j["total_params"] = backbone_param_count() + head_param_count();
  j["trainable_params"] = trainable_param_count();
  return j;
}

WeightsArchive ClassifierModel::export_head() const {
  WeightsArchive archive;
  const auto feat = static_cast<std::uint32_t>(head_.feature_dim());
  const auto units = static_cast<std::uint32_t>(head_.units());
  archive.add({"head/dense/kernel",
               {feat, units},
               {head_.w1().begin(), head_.w1().end()}});
  archive.add(
      {"head/dense/bias", {units}, {head_.b1().begin(), head_.b1().end()}});
  archive.add({"head/dense_1/kernel",
               {units, 1},
               {head_.w2().begin(), head_.w2().end()}});
  archive.add({"head/dense_1/bias", {1}, {head_.b2()}});
  return archive;
}

void ClassifierModel::import_head(const WeightsArchive& archive) {
  const auto feat = static_cast<std::uint32_t>(head_.feature_dim());
  const auto units = static_cast<std::uint32_t>(head_.units());
  const NamedTensor& w1 = archive.require("head/dense/kernel");
  check_dims(w1, {feat, units});
  const NamedTensor& b1 = archive.require("head/dense/bias");
  check_dims(b1, {units});
  const NamedTensor& w2 = archive.require("head/dense_1/kernel");
  check_dims(w2, {units, 1});
  const NamedTensor& b2 = archive.require("head/dense_1/bias");
  check_dims(b2, {1});
  std::copy(w1.values.begin(), w1.values.end(), head_.w1().begin());
  std::copy(b1.values.begin(), b1.values.end(), head_.b1().begin());
  std::copy(w2.values.begin(), w2.values.end(), head_.w2().begin());
  head_.b2() = b2.values.front();
}

std::int64_t head_param_count(const Shape& feature_shape,
                              const HeadSpec& head_spec) {
  return HeadParams::param_count(feature_shape.flat(),
                                 head_spec.dense_units);
}

ClassifierModel build_classifier(const BackboneSpec& backbone,
                                 const HeadSpec& head,
                                 std::uint64_t head_init_seed) {
  backbone.validate();
  head.validate();
  if (!backbone.frozen) {
    throw ConfigError(
        "backbone fine-tuning is not supported; set backbone.frozen = true");
  }
  const Backbone full = Backbone::from_spec(backbone);
  FeatureExtractor fx = truncate_backbone(full, backbone.truncation_node);
  return ClassifierModel(std::move(fx), head, head_init_seed);
}

}  // namespace ctcls
