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

// The five-graph link prediction comparison: one DisGeNET split shared by
// every arm, each arm adding more PPI sources to the training graph.

#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/kg.hpp"
#include "bioie/lpeval.hpp"
#include "bioie/rotate.hpp"
#include "bioie/tune.hpp"
#include "json.hpp"

namespace bioie::experiment {

struct Inputs {
  kg::KnowledgeGraph disgenet;
  kg::KnowledgeGraph string;
  std::array<kg::KnowledgeGraph, 3> ie;  // v1, v2, v3
};

struct Options {
  kg::SplitSpec split;
  embed::TrainConfig train;
  std::size_t tune_trials = 0;  // 0 = train every arm with `train` as is
  embed::SearchSpace space;
};

struct ArmResult {
  std::string name;
  std::size_t n_train = 0;
  embed::TrainConfig config;
  lpeval::Evaluation eval;
  std::string split_digest;
  double wall_seconds = 0.0;
};

struct Result {
  kg::SplitResult split;
  std::string split_digest;
  std::vector<ArmResult> arms;  // table order: IE v3, v2, v1, STRING, DisGeNET
  std::size_t baseline = 3;     // "STRING + DisGeNET"
};

// Digest of the held-out sets an arm is evaluated on.
inline std::string held_out_digest(const kg::KnowledgeGraph& valid, const kg::KnowledgeGraph& test) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(kg::to_tsv(test), fnv1a(kg::to_tsv(valid)))));
  return buf;
}

inline kg::TripleSet triple_set(const kg::KnowledgeGraph& g) {
  kg::TripleSet s;
  for (const auto& [t, _] : g) s.insert(t);
  return s;
}

inline const std::vector<std::string>& arm_names() {
  static const std::vector<std::string> k = {"IE v3 + STRING + DisGeNET", "IE v2 + STRING + DisGeNET",
                                             "IE v1 + STRING + DisGeNET", "STRING + DisGeNET", "DisGeNET"};
  return k;
}

// Trains and evaluates one arm. The arm must be evaluated on exactly the
// shared held-out sets; a digest mismatch aborts the experiment.
inline ArmResult run_arm(const std::string& name, const kg::KnowledgeGraph& train, const kg::KnowledgeGraph& valid,
                         const kg::KnowledgeGraph& test, const std::string& expected_digest,
                         const std::vector<std::string>& genes, const kg::TripleSet& known, const Options& opt) {
  ArmResult arm;
  arm.name = name;
  arm.n_train = train.size();
  arm.split_digest = held_out_digest(valid, test);
  if (arm.split_digest != expected_digest) {
    throw Error("experiment: arm '" + name + "' is not evaluated on the shared split");
  }
  auto t0 = std::chrono::steady_clock::now();
  arm.config = opt.train;
  if (opt.tune_trials > 0) {
    const auto valid_triples = lpeval::triples_of(valid);
    auto train_fn = [&](const embed::TrainConfig& c) { return embed::train(train, c); };
    auto validate = [&](const embed::EmbeddingModel& m) {
      auto r = lpeval::evaluate(m, valid_triples, genes, &known).report;
      return embed::TrialMetrics{r.hit30, r.mr, r};
    };
    arm.config = embed::tune(train_fn, validate, opt.space, opt.train, opt.tune_trials, opt.train.seed).best;
  }
  const embed::EmbeddingModel model = embed::train(train, arm.config);
  arm.eval = lpeval::evaluate(model, lpeval::triples_of(test), genes, &known);
  arm.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return arm;
}

// Runs the five arms on a given split of the DisGeNET graph.
inline Result run_on_split(const Inputs& in, kg::SplitResult split, const Options& opt) {
  if (split.test.empty()) throw Error("experiment: the test split is empty");
  Result res;
  res.split = std::move(split);
  res.split_digest = held_out_digest(res.split.valid, res.split.test);

  // Candidate genes: every gene of the DisGeNET training graph, which each
  // arm contains, so pools are identical across arms.
  const std::vector<std::string> genes = lpeval::genes_of(res.split.train);
  const kg::TripleSet known = triple_set(in.disgenet);

  const kg::KnowledgeGraph& base = res.split.train;
  const kg::KnowledgeGraph with_string = kg::merge(base, in.string);
  std::vector<kg::KnowledgeGraph> trains = {kg::merge(with_string, in.ie[2]), kg::merge(with_string, in.ie[1]),
                                            kg::merge(with_string, in.ie[0]), with_string, base};
  for (std::size_t k = 0; k < trains.size(); ++k) {
    res.arms.push_back(
        run_arm(arm_names()[k], trains[k], res.split.valid, res.split.test, res.split_digest, genes, known, opt));
  }
  return res;
}

inline kg::SplitResult split_disgenet(const Inputs& in, const Options& opt) {
  if (in.disgenet.count(kg::Relation::kGeneDisease) == 0) {
    throw Error("experiment: DisGeNET graph has no gene_disease edges");
  }
  return kg::split(in.disgenet, opt.split, kg::Relation::kGeneDisease);
}

inline Result run(const Inputs& in, const Options& opt) { return run_on_split(in, split_disgenet(in, opt), opt); }

inline std::string pct_or_undefined(const std::optional<double>& x) {
  return x ? format_fixed(*x, 2) : std::string("undefined");
}

// Comparison table as TSV; the change columns compare each arm to the baseline arm.
inline std::string table_tsv(const Result& r) {
  std::string out = "graph\tMR\tMP\thit@30\thit@3\thit@1\tMR_reduction_%\tMP_lift_%\thit@30_lift_%\thit@3_lift_%\thit@1_lift_%\n";
  const auto& base = r.arms.at(r.baseline).eval.report;
  for (const auto& a : r.arms) {
    const auto& m = a.eval.report;
    const auto c = lpeval::relative_change(base, m);
    out += a.name + "\t" + format_fixed(m.mr, 3) + "\t" + format_fixed(m.mp, 3) + "\t" + format_fixed(m.hit30, 3) +
           "\t" + format_fixed(m.hit3, 3) + "\t" + format_fixed(m.hit1, 3) + "\t" + pct_or_undefined(c.mr_reduction) +
           "\t" + pct_or_undefined(c.mp_lift) + "\t" + pct_or_undefined(c.hit30_lift) + "\t" +
           pct_or_undefined(c.hit3_lift) + "\t" + pct_or_undefined(c.hit1_lift) + "\n";
  }
  return out;
}

inline std::string table_markdown(const Result& r) {
  std::string out = "| graph | MR | MP | hit@30 | hit@3 | hit@1 |\n|---|---|---|---|---|---|\n";
  for (const auto& a : r.arms) {
    const auto& m = a.eval.report;
    out += "| " + a.name + " | " + format_fixed(m.mr, 3) + " | " + format_fixed(m.mp, 3) + " | " +
           format_fixed(m.hit30, 3) + "% | " + format_fixed(m.hit3, 3) + "% | " + format_fixed(m.hit1, 3) + "% |\n";
  }
  return out;
}

inline nlohmann::json to_json(const Result& r) {
  nlohmann::json arms = nlohmann::json::array();
  const auto& base = r.arms.at(r.baseline).eval.report;
  for (const auto& a : r.arms) {
    arms.push_back({{"graph", a.name},
                    {"n_train_triples", a.n_train},
                    {"config", a.config},
                    {"metrics", a.eval.report},
                    {"relative_change_vs_baseline", lpeval::relative_change(base, a.eval.report)},
                    {"split_digest", a.split_digest},
                    {"wall_seconds", a.wall_seconds}});
  }
  return {{"baseline", r.arms.at(r.baseline).name},
          {"split",
           {{"train", r.split.train.size()},
            {"valid", r.split.valid.size()},
            {"test", r.split.test.size()},
            {"reassigned", r.split.reassigned},
            {"digest", r.split_digest}}},
          {"arms", arms}};
}

}  // namespace bioie::experiment
