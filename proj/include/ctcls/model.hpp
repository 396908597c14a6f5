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

#ifndef CTCLS_MODEL_HPP
#define CTCLS_MODEL_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ctcls/arch.hpp"
#include "ctcls/tensor.hpp"
#include "ctcls/weights.hpp"

namespace ctcls {

struct BackboneSpec {
  std::string architecture = "inception_v3";
  /// Path to a CTW1 archive, or "RANDOM" for a seeded random backbone.
  std::string weights = "RANDOM";
  std::string truncation_node = "mixed4";
  bool frozen = true;
  int input_h = 299;
  int input_w = 299;
  std::uint64_t random_seed = 0;  // used when weights == RANDOM

  void validate() const;
};

struct HeadSpec {
  int dense_units = 1024;
  double dropout_rate = 0.2;
  // Output layer is fixed for the binary task: dense(1) with sigmoid.

  void validate() const;
};

/// Weights of one backbone layer. Conv kernels are HWIO row-major
/// (kh, kw, in_channels, out_channels); batch norm keeps inference-form
/// statistics.
struct LayerWeights {
  std::vector<double> kernel;
  std::vector<double> beta;
  std::vector<double> mean;
  std::vector<double> variance;
};

class Backbone;
class FeatureExtractor;

/// Truncate `full` at `node` (any existing node; the input node yields an
/// identity extractor). Throws UnknownNode listing the valid truncation
/// points.
FeatureExtractor truncate_backbone(const Backbone& full,
                                   const std::string& node);

/// A backbone: the architecture graph plus (optionally) instantiated
/// weights. Structural queries never touch weights, so a registry-only
/// backbone answers shape and parameter questions for free.
class Backbone {
 public:
  /// Graph only; forward passes are unavailable.
  static Backbone registry(const std::string& architecture, int input_h,
                           int input_w);
  /// Instantiates weights for the layers up to and including the spec's
  /// truncation node (RANDOM or archive). Throws WeightsMismatch when an
  /// archive tensor is missing or shaped differently.
  static Backbone from_spec(const BackboneSpec& spec);

  const ArchGraph& graph() const { return graph_; }
  bool has_weights() const { return static_cast<bool>(weights_); }
  const std::vector<LayerWeights>& weights() const;

 private:
  ArchGraph graph_;
  std::shared_ptr<const std::vector<LayerWeights>> weights_;  // may be null
  int instantiated_up_to_ = -1;
  friend class FeatureExtractor;
  friend FeatureExtractor truncate_backbone(const Backbone&,
                                            const std::string&);
};

/// The sub-network up to and including a named node. Shares the backbone's
/// weights; layers past the node do not exist here (they are absent from
/// parameter counts and never evaluated).
class FeatureExtractor {
 public:
  Shape feature_shape() const;
  std::int64_t param_count() const;
  const ArchGraph& graph() const { return graph_; }
  int truncation_index() const { return trunc_idx_; }
  Shape input_shape() const { return graph_.input_shape(); }

  /// Evaluates the sub-network on one image. Requires weights.
  Tensor forward(const Tensor& image) const;
  /// forward() flattened to a feature row.
  std::vector<double> forward_flat(const Tensor& image) const;

 private:
  friend FeatureExtractor truncate_backbone(const Backbone&,
                                            const std::string&);
  ArchGraph graph_;
  std::shared_ptr<const std::vector<LayerWeights>> weights_;
  int trunc_idx_ = 0;
  int instantiated_up_to_ = -1;
};

/// Head parameters in one flat buffer:
///   [ w1 (F x U, row-major) | b1 (U) | w2 (U) | b2 ].
class HeadParams {
 public:
  HeadParams() = default;
  HeadParams(std::int64_t feature_dim, int units);

  static std::int64_t param_count(std::int64_t feature_dim, int units) {
    return feature_dim * units + units + units + 1;
  }

  std::int64_t feature_dim() const { return feature_dim_; }
  int units() const { return units_; }

  std::span<double> all() { return flat_; }
  std::span<const double> all() const { return flat_; }
  std::span<double> w1() { return {flat_.data(), w1_len()}; }
  std::span<const double> w1() const { return {flat_.data(), w1_len()}; }
  std::span<double> b1() { return {flat_.data() + w1_len(), size_u()}; }
  std::span<const double> b1() const {
    return {flat_.data() + w1_len(), size_u()};
  }
  std::span<double> w2() {
    return {flat_.data() + w1_len() + size_u(), size_u()};
  }
  std::span<const double> w2() const {
    return {flat_.data() + w1_len() + size_u(), size_u()};
  }
  double& b2() { return flat_.back(); }
  double b2() const { return flat_.back(); }

 private:
  std::size_t w1_len() const {
    return static_cast<std::size_t>(feature_dim_) * units_;
  }
  std::size_t size_u() const { return static_cast<std::size_t>(units_); }
  std::int64_t feature_dim_ = 0;
  int units_ = 0;
  std::vector<double> flat_;
};

/// Frozen feature extractor feeding the trainable head:
/// flatten -> dense(units, relu) -> dropout -> dense(1, sigmoid).
class ClassifierModel {
 public:
  ClassifierModel(FeatureExtractor extractor, HeadSpec head_spec,
                  std::uint64_t init_seed);

  const FeatureExtractor& extractor() const { return extractor_; }
  const HeadSpec& head_spec() const { return head_spec_; }
  Shape feature_shape() const { return extractor_.feature_shape(); }
  Shape input_shape() const { return extractor_.input_shape(); }

  HeadParams& head() { return head_; }
  const HeadParams& head() const { return head_; }

  std::int64_t head_param_count() const;
  std::int64_t backbone_param_count() const;
  /// Backbone is frozen, so this equals head_param_count().
  std::int64_t trainable_param_count() const;

  /// Flattened backbone features, one row per sample.
  std::vector<std::vector<double>> features(
      const std::vector<Tensor>& batch) const;

  /// Intermediate activations kept for the backward pass.
  struct Forward {
    std::vector<std::vector<double>> features;    // B x F
    std::vector<std::vector<double>> hidden_pre;  // B x U
    std::vector<std::vector<double>> hidden;      // B x U, post relu+dropout
    std::vector<std::vector<std::uint8_t>> drop_mask;  // B x U when training
    std::vector<double> probs;                    // B, strictly in (0,1)
    bool training = false;
    int batch() const { return static_cast<int>(probs.size()); }
  };

  /// Dropout is active only when `training`; its mask is drawn from `rng`
  /// (required in training mode when dropout_rate > 0), so a caller can
  /// replay the exact mask by reseeding.
  Forward forward_cached(const std::vector<Tensor>& batch, bool training,
                         std::mt19937_64* rng = nullptr) const;
  Forward forward_from_features(std::vector<std::vector<double>> features,
                                bool training,
                                std::mt19937_64* rng = nullptr) const;
  std::vector<double> forward(const std::vector<Tensor>& batch,
                              bool training = false,
                              std::mt19937_64* rng = nullptr) const;

  /// d(mean BCE)/d(head params), flat and aligned with head().all().
  std::vector<double> gradients(const Forward& cache,
                                std::span<const double> targets) const;

  /// Per-backbone-parameter gradients. Frozen parameters accumulate no
  /// gradient, so every entry is exactly zero; exposed so callers can
  /// assert the frozen contract.
  std::vector<std::pair<std::string, std::vector<double>>>
  backbone_gradients() const;

  /// Per-layer name, output shape, parameter count, trainable flag.
  nlohmann::ordered_json summary() const;

  WeightsArchive export_head() const;
  void import_head(const WeightsArchive& archive);

 private:
  FeatureExtractor extractor_;
  HeadSpec head_spec_;
  HeadParams head_;
};

/// Closed-form head parameter count from a declared feature shape.
std::int64_t head_param_count(const Shape& feature_shape,
                              const HeadSpec& head_spec);

/// Assemble the classifier from specs: truncated backbone (frozen) plus the
/// seeded Glorot-initialized head. Throws ConfigError when frozen == false
/// (backbone fine-tuning is unsupported), UnknownNode / WeightsMismatch per
/// the backbone spec.
ClassifierModel build_classifier(const BackboneSpec& backbone,
                                 const HeadSpec& head,
                                 std::uint64_t head_init_seed = 0);

}  // namespace ctcls

#endif  // CTCLS_MODEL_HPP
