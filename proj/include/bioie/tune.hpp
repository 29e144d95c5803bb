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

// Random-search hyperparameter tuning for RotatE.

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/rotate.hpp"
#include "json.hpp"

namespace bioie::embed {

// Categorical choices plus a log-uniform learning-rate range. Fields not
// searched (batch size, epochs) come from the base config.
struct SearchSpace {
  std::vector<std::size_t> dims = {64, 128, 256};
  std::vector<double> gammas = {6.0, 12.0, 24.0};
  double lr_min = 1e-4;
  double lr_max = 1e-1;
  std::vector<std::size_t> negatives = {16, 64, 128};
  std::vector<double> alphas = {0.0, 0.5, 1.0};

  void validate() const {
    if (dims.empty() || gammas.empty() || negatives.empty() || alphas.empty()) {
      throw Error("search space: every categorical list needs at least one value");
    }
    if (!(lr_min > 0) || lr_max < lr_min) throw Error("search space: need 0 < lr_min <= lr_max");
  }
};

inline void to_json(nlohmann::json& j, const SearchSpace& s) {
  j = nlohmann::json{{"dims", s.dims}, {"gammas", s.gammas}, {"lr_min", s.lr_min},
                     {"lr_max", s.lr_max}, {"negatives", s.negatives}, {"alphas", s.alphas}};
}

inline void from_json(const nlohmann::json& j, SearchSpace& s) {
  SearchSpace d;
  s.dims = j.value("dims", d.dims);
  s.gammas = j.value("gammas", d.gammas);
  s.lr_min = j.value("lr_min", d.lr_min);
  s.lr_max = j.value("lr_max", d.lr_max);
  s.negatives = j.value("negatives", d.negatives);
  s.alphas = j.value("alphas", d.alphas);
}

// Validation result of one trained model.
struct TrialMetrics {
  double hit30 = 0.0;
  double mr = 0.0;
  nlohmann::json detail;
};

struct Trial {
  std::size_t index = 0;
  TrainConfig config;
  TrialMetrics metrics;
  double wall_seconds = 0.0;
};

struct TuneResult {
  TrainConfig best;
  std::size_t best_index = 0;
  std::vector<Trial> trials;
};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

// Draws n configs from the space. Trial i trains with seed base.seed + i.
inline std::vector<TrainConfig> sample_configs(const SearchSpace& space, const TrainConfig& base, std::size_t n,
                                               std::uint64_t seed) {
  space.validate();
  Rng rng(seed);
  std::vector<TrainConfig> out;
  for (std::size_t i = 0; i < n; ++i) {
    TrainConfig c = base;
    c.dim = pick(space.dims, rng);
    c.gamma = pick(space.gammas, rng);
    c.learning_rate = std::exp(rng.uniform(std::log(space.lr_min), std::log(space.lr_max)));
    c.negatives = pick(space.negatives, rng);
    c.adversarial_temperature = pick(space.alphas, rng);
    c.seed = base.seed + i;
    out.push_back(c);
  }
  return out;
}

using TrainFn = std::function<EmbeddingModel(const TrainConfig&)>;
using ValidateFn = std::function<TrialMetrics(const EmbeddingModel&)>;

// Trains every sampled config and keeps the one with the highest validation
// hit@30; lower MR breaks ties, then the earlier trial.
inline TuneResult tune(const TrainFn& train_fn, const ValidateFn& validate, const SearchSpace& space,
                       const TrainConfig& base, std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw Error("tune: n_trials must be >= 1");
  TuneResult out;
  const auto configs = sample_configs(space, base, n_trials, seed);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    EmbeddingModel m = train_fn(configs[i]);
    Trial trial{i, configs[i], validate(m), 0.0};
    trial.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.trials.push_back(std::move(trial));
    const auto& cur = out.trials.back().metrics;
    const auto& best = out.trials[out.best_index].metrics;
    if (i == 0 || cur.hit30 > best.hit30 || (cur.hit30 == best.hit30 && cur.mr < best.mr)) out.best_index = i;
  }
  out.best = out.trials[out.best_index].config;
  return out;
}

inline std::string trial_log_jsonl(const TuneResult& r) {
  std::string out;
  for (const auto& t : r.trials) {
    nlohmann::json j{{"trial", t.index},
                     {"config", t.config},
                     {"validation", {{"hit30", t.metrics.hit30}, {"mr", t.metrics.mr}, {"detail", t.metrics.detail}}},
                     {"wall_seconds", t.wall_seconds},
                     {"best", t.index == r.best_index}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace bioie::embed
