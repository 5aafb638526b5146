// Copyright 2026 The yoyosim Authors.
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

#pragma once

// Gradient-boosted regression trees for binary classification.
//
// Each round fits one tree to the first and second derivatives of the
// logistic loss. Splits are found by exact greedy search over every distinct
// feature value; a split sends x <= threshold left, where the threshold is
// itself a training value, so decisions depend only on the order of values.
//
//   gain = 1/2 [ G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda) ] - gamma
//   leaf = -G / (H + lambda)
//   score(x) = sigmoid(base_score + eta * sum_t leaf_t(x))

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yoyo/features.hpp"

namespace yoyo {

struct GbtHyperParams {
  int num_trees = 10;
  int max_depth = 1;
  double learning_rate = 0.3;
  double lambda_l2 = 1.0;
  double gamma_leaf_penalty = 0.0;
  int min_samples_leaf = 10;
  int min_samples_split = 40;
  bool class_balancing = true;

  void validate() const {
    if (num_trees < 1) throw std::invalid_argument("gbt: num_trees must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("gbt: max_depth must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw std::invalid_argument("gbt: learning_rate must lie in (0, 1]");
    if (!(lambda_l2 >= 0.0)) throw std::invalid_argument("gbt: lambda_l2 must be >= 0");
    if (!(gamma_leaf_penalty >= 0.0))
      throw std::invalid_argument("gbt: gamma_leaf_penalty must be >= 0");
    if (min_samples_leaf < 1) throw std::invalid_argument("gbt: min_samples_leaf must be >= 1");
    if (min_samples_split < 2) throw std::invalid_argument("gbt: min_samples_split must be >= 2");
  }
};

/// Row-major feature matrix with binary labels.
struct LabeledData {
  std::size_t num_features = 0;
  std::vector<double> x;
  std::vector<Label> y;
  std::vector<std::string> feature_names;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const {
    return {x.data() + i * num_features, num_features};
  }
  double at(std::size_t i, std::size_t f) const { return x[i * num_features + f]; }
  void add(std::span<const double> features, Label label) {
    if (features.size() != num_features) throw std::invalid_argument("LabeledData: arity mismatch");
    x.insert(x.end(), features.begin(), features.end());
    y.push_back(label);
  }

  static LabeledData from(std::span<const FeatureVector> samples) {
    LabeledData d;
    d.num_features = kFeatureCount;
    d.feature_names = FeatureVector::names();
    for (const auto& s : samples) d.add(s.values, s.label);
    return d;
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double weight = 0.0;  // leaf output
  double gain = 0.0;    // split gain
  int samples = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
      const TreeNode& n = nodes[i];
      i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[i].weight;
  }
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct BoostedTreeModel {
  std::size_t num_features = 0;
  double base_score = 0.0;  // log-odds
  double learning_rate = 0.3;
  std::vector<RegressionTree> trees;
  std::vector<std::string> feature_names;

  double margin(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return base_score + learning_rate * sum;
  }
  friend bool operator==(const BoostedTreeModel&, const BoostedTreeModel&) = default;
};

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

namespace detail {
inline double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }
}  // namespace detail

/// Second-order split gain for a parent (g, h) divided into a left part (gl, hl).
inline double split_gain(double gl, double hl, double g, double h, const GbtHyperParams& p) {
  const double gr = g - gl;
  const double hr = h - hl;
  return 0.5 * (detail::leaf_score(gl, hl, p.lambda_l2) + detail::leaf_score(gr, hr, p.lambda_l2) -
                detail::leaf_score(g, h, p.lambda_l2)) -
         p.gamma_leaf_penalty;
}

/// Gains this close (relative) count as equal. The same partition reached
/// through different features sums its gradients in a different order.
inline constexpr double kGainTieTolerance = 1e-9;

/// Best (feature, threshold) over the samples in `rows`, or nothing when no
/// split honours min_samples_leaf with positive gain. Ties go to the lower
/// feature index, then the lower threshold.
inline std::optional<SplitCandidate> find_best_split(const LabeledData& data,
                                                     std::span<const std::size_t> rows,
                                                     std::span<const double> grad,
                                                     std::span<const double> hess,
                                                     const GbtHyperParams& params) {
  const std::size_t n = rows.size();
  const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
  if (n < static_cast<std::size_t>(params.min_samples_split) || n < 2 * min_leaf) return {};

  double g = 0.0, h = 0.0;
  for (std::size_t r : rows) {
    g += grad[r];
    h += hess[r];
  }

  std::vector<SplitCandidate> candidates;
  double top = 0.0;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < data.num_features; ++f) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.at(a, f) < data.at(b, f); });
    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      gl += grad[order[i]];
      hl += hess[order[i]];
      const double value = data.at(order[i], f);
      if (value == data.at(order[i + 1], f)) continue;
      const std::size_t left = i + 1;
      if (left < min_leaf || n - left < min_leaf) continue;
      const double gain = split_gain(gl, hl, g, h, params);
      if (gain <= 0.0) continue;
      candidates.push_back({f, value, gain, left});
      top = std::max(top, gain);
    }
  }
  // Candidates are already in (feature, threshold) order.
  for (const auto& c : candidates) {
    if (c.gain >= top * (1.0 - kGainTieTolerance)) return c;
  }
  return {};
}

namespace detail {

inline double leaf_weight(std::span<const std::size_t> rows, std::span<const double> grad,
                          std::span<const double> hess, double lambda) {
  double g = 0.0, h = 0.0;
  for (std::size_t r : rows) {
    g += grad[r];
    h += hess[r];
  }
  return h + lambda > 0.0 ? -g / (h + lambda) : 0.0;
}

inline int grow(RegressionTree& tree, const LabeledData& data, std::vector<std::size_t> rows,
                std::span<const double> grad, std::span<const double> hess,
                const GbtHyperParams& params, int depth) {
  const int index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({});
  tree.nodes[index].samples = static_cast<int>(rows.size());

  std::optional<SplitCandidate> split;
  if (depth < params.max_depth) split = find_best_split(data, rows, grad, hess, params);
  if (!split) {
    tree.nodes[index].weight = leaf_weight(rows, grad, hess, params.lambda_l2);
    return index;
  }

  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (data.at(r, split->feature) <= split->threshold ? left : right).push_back(r);
  }
  const int l = grow(tree, data, std::move(left), grad, hess, params, depth + 1);
  const int r = grow(tree, data, std::move(right), grad, hess, params, depth + 1);
  TreeNode& node = tree.nodes[index];
  node.feature = static_cast<int>(split->feature);
  node.threshold = split->threshold;
  node.gain = split->gain;
  node.left = l;
  node.right = r;
  return index;
}

}  // namespace detail

/// Per-sample weights: all ones, or n / (2 n_class) with class balancing.
inline std::vector<double> sample_weights(const LabeledData& data, bool class_balancing) {
  std::vector<double> w(data.size(), 1.0);
  if (!class_balancing) return w;
  const auto attacks = static_cast<double>(std::count(data.y.begin(), data.y.end(), Label::Attack));
  const double regulars = static_cast<double>(data.size()) - attacks;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double n_class = data.y[i] == Label::Attack ? attacks : regulars;
    w[i] = static_cast<double>(data.size()) / (2.0 * n_class);
  }
  return w;
}

/// Weighted mean logistic loss of `margins` against the labels.
inline double log_loss(const LabeledData& data, std::span<const double> margins,
                       std::span<const double> weights) {
  double loss = 0.0, total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double z = margins[i];
    // log(1 + e^z) - y z, written to stay finite for large |z|
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += weights[i] * (softplus - (data.y[i] == Label::Attack ? z : 0.0));
    total += weights[i];
  }
  return loss / total;
}

/// Fits the ensemble. `loss_history`, when given, receives the training loss
/// before the first round and after every round.
inline BoostedTreeModel train(const LabeledData& data, const GbtHyperParams& params,
                              std::vector<double>* loss_history = nullptr) {
  params.validate();
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  for (double v : data.x) {
    if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature value");
  }
  const auto attacks = std::count(data.y.begin(), data.y.end(), Label::Attack);
  if (attacks == 0 || attacks == static_cast<std::ptrdiff_t>(data.size()))
    throw std::invalid_argument("train: dataset must contain both classes");

  const std::vector<double> weights = sample_weights(data, params.class_balancing);
  double w_pos = 0.0, w_neg = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data.y[i] == Label::Attack ? w_pos : w_neg) += weights[i];

  BoostedTreeModel model;
  model.num_features = data.num_features;
  model.learning_rate = params.learning_rate;
  model.base_score = std::log(w_pos / w_neg);
  model.feature_names = data.feature_names;

  const std::size_t n = data.size();
  std::vector<double> margins(n, model.base_score), grad(n), hess(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (loss_history) loss_history->push_back(log_loss(data, margins, weights));

  for (int round = 0; round < params.num_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      const double y = data.y[i] == Label::Attack ? 1.0 : 0.0;
      grad[i] = weights[i] * (p - y);
      hess[i] = weights[i] * p * (1.0 - p);
    }
    RegressionTree tree;
    detail::grow(tree, data, all, grad, hess, params, 0);
    for (std::size_t i = 0; i < n; ++i) margins[i] += params.learning_rate * tree.predict(data.row(i));
    model.trees.push_back(std::move(tree));
    if (loss_history) loss_history->push_back(log_loss(data, margins, weights));
  }
  return model;
}

struct Prediction {
  Label label = Label::Regular;
  double score = 0.5;  // P(Attack)
};

inline Prediction predict(const BoostedTreeModel& model, std::span<const double> x) {
  if (x.size() != model.num_features)
    throw std::invalid_argument("predict: expected " + std::to_string(model.num_features) +
                                " features, got " + std::to_string(x.size()));
  const double score = sigmoid(model.margin(x));
  return {score >= 0.5 ? Label::Attack : Label::Regular, score};
}

inline Prediction predict(const BoostedTreeModel& model, const FeatureVector& fv) {
  return predict(model, std::span<const double>(fv.values));
}

struct FeatureImportance {
  std::size_t index = 0;
  std::string name;
  double score = 0.0;  // total split gain, rescaled so the top feature is 10
};

/// Features ranked by total split gain, descending; ties keep index order.
inline std::vector<FeatureImportance> feature_importance(const BoostedTreeModel& model) {
  std::vector<double> gain(model.num_features, 0.0);
  for (const auto& tree : model.trees)
    for (const auto& node : tree.nodes)
      if (!node.is_leaf()) gain[node.feature] += node.gain;
  const double top = gain.empty() ? 0.0 : *std::max_element(gain.begin(), gain.end());

  std::vector<FeatureImportance> ranked;
  for (std::size_t f = 0; f < model.num_features; ++f) {
    const std::string name =
        f < model.feature_names.size() ? model.feature_names[f] : "f" + std::to_string(f);
    ranked.push_back({f, name, top > 0.0 ? 10.0 * gain[f] / top : 0.0});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return ranked;
}

// ---------------------------------------------------------------------------
// JSON tree dump

inline nlohmann::ordered_json to_json(const BoostedTreeModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "yoyosim-gbt";
  j["version"] = 1;
  j["num_features"] = model.num_features;
  j["base_score"] = model.base_score;
  j["learning_rate"] = model.learning_rate;
  j["feature_names"] = model.feature_names;
  auto& trees = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
      nlohmann::ordered_json node;
      if (n.is_leaf()) {
        node["leaf"] = n.weight;
      } else {
        node["feature"] = n.feature;
        node["threshold"] = n.threshold;
        node["left"] = n.left;
        node["right"] = n.right;
        node["gain"] = n.gain;
      }
      node["samples"] = n.samples;
      nodes.push_back(std::move(node));
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return j;
}

inline BoostedTreeModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "yoyosim-gbt") throw std::runtime_error("model: unknown format");
  BoostedTreeModel m;
  m.num_features = j.at("num_features").get<std::size_t>();
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& jt : j.at("trees")) {
    RegressionTree tree;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode n;
      if (jn.contains("leaf")) {
        n.weight = jn.at("leaf").get<double>();
      } else {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.gain = jn.at("gain").get<double>();
        if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= m.num_features)
          throw std::runtime_error("model: split feature out of range");
      }
      n.samples = jn.value("samples", 0);
      tree.nodes.push_back(n);
    }
    const auto count = static_cast<int>(tree.nodes.size());
    for (const auto& n : tree.nodes) {
      if (!n.is_leaf() && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count))
        throw std::runtime_error("model: child index out of range");
    }
    if (tree.nodes.empty()) throw std::runtime_error("model: empty tree");
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace yoyo
