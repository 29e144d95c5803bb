// Copyright 2026 The bioie Authors.
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

#include <cstddef>

#include "json.hpp"

namespace bioie {

// Harmonic mean of two percentages; 0 when both are 0.
inline double f1(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

// Precision/recall/F1 as percentages in [0, 100] plus raw counts.
struct PrfReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  static PrfReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PrfReport r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    if (tp + fp > 0) r.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) r.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
    r.f1 = bioie::f1(r.precision, r.recall);
    return r;
  }
};

inline void to_json(nlohmann::json& j, const PrfReport& r) {
  j = nlohmann::json{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
                     {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}};
}

}  // namespace bioie
