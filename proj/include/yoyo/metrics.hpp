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

#include <span>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "yoyo/features.hpp"

namespace yoyo {

struct EvalMetrics {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // False when the denominator was zero and the value was reported as 0.
  bool precision_defined = true;
  bool recall_defined = true;
};

inline double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

inline EvalMetrics metrics_from_counts(long tp, long tn, long fp, long fn) {
  if (tp < 0 || tn < 0 || fp < 0 || fn < 0) throw std::invalid_argument("negative count");
  const long total = tp + tn + fp + fn;
  if (total == 0) throw std::invalid_argument("metrics: no samples");
  EvalMetrics m{tp, tn, fp, fn};
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  m.precision_defined = tp + fp > 0;
  m.recall_defined = tp + fn > 0;
  m.precision = m.precision_defined ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = m.recall_defined ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

/// Confusion counts with Attack as the positive class.
inline EvalMetrics evaluate(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("evaluate: predictions and labels differ in length");
  if (labels.empty()) throw std::invalid_argument("evaluate: no samples");
  long tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] == Label::Attack;
    const bool actual = labels[i] == Label::Attack;
    if (predicted && actual) ++tp;
    else if (!predicted && !actual) ++tn;
    else if (predicted) ++fp;
    else ++fn;
  }
  return metrics_from_counts(tp, tn, fp, fn);
}

inline nlohmann::ordered_json to_json(const EvalMetrics& m) {
  return {{"tp", m.tp},
          {"tn", m.tn},
          {"fp", m.fp},
          {"fn", m.fn},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"precision_defined", m.precision_defined},
          {"recall_defined", m.recall_defined}};
}

}  // namespace yoyo
