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

// Filtered link-prediction evaluation: rank candidate genes per disease and
// aggregate MR, MP and hit@k.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/kg.hpp"
#include "bioie/rotate.hpp"
#include "json.hpp"

namespace bioie::lpeval {

struct RankedQuery {
  std::string disease;
  std::string gene;
  std::size_t pool = 1;
  std::size_t rank = 1;
};

struct EvalReport {
  double mr = 0.0;
  double mp = 0.0;
  double hit30 = 0.0;
  double hit3 = 0.0;
  double hit1 = 0.0;
  std::size_t n_queries = 0;

  bool operator==(const EvalReport&) const = default;
};

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"mr", r.mr}, {"mp", r.mp}, {"hit30", r.hit30}, {"hit3", r.hit3},
                     {"hit1", r.hit1}, {"n_queries", r.n_queries}};
}

inline void from_json(const nlohmann::json& j, EvalReport& r) {
  r.mr = j.at("mr").get<double>();
  r.mp = j.at("mp").get<double>();
  r.hit30 = j.at("hit30").get<double>();
  r.hit3 = j.at("hit3").get<double>();
  r.hit1 = j.at("hit1").get<double>();
  r.n_queries = j.at("n_queries").get<std::size_t>();
}

// 1 + (# strictly better) + ceil(ties / 2).
inline std::size_t rank_from_counts(std::size_t higher, std::size_t ties) { return 1 + higher + (ties + 1) / 2; }

struct RankResult {
  std::size_t rank = 1;
  std::size_t pool = 1;
};

// Ranks the true entity of `truth` on one side against the candidate ids.
// With `known` given, candidates whose corrupted triple is known (other than
// the truth itself) are filtered out of the pool.
inline RankResult rank_side(const embed::EmbeddingModel& m, const embed::IdTriple& truth, bool head_side,
                            std::span<const std::uint32_t> candidates, const embed::IdTripleSet* known) {
  const std::uint32_t target = head_side ? truth.head : truth.tail;
  const double s_true = embed::score(m, truth);
  std::size_t higher = 0, ties = 0, pool = 1;
  for (auto c : candidates) {
    if (c == target) continue;
    embed::IdTriple q = truth;
    (head_side ? q.head : q.tail) = c;
    if (known && known->count(q)) continue;
    ++pool;
    const double s = embed::score(m, q);
    if (s > s_true) ++higher;
    else if (s == s_true) ++ties;
  }
  return {rank_from_counts(higher, ties), pool};
}

namespace detail {

inline std::uint32_t require(const embed::Vocabulary& v, const std::string& name) {
  auto id = v.find(name);
  if (!id) throw Error("no embedding for entity '" + name + "'");
  return *id;
}

inline embed::IdTripleSet known_ids(const embed::EmbeddingModel& m, const kg::TripleSet& known) {
  embed::IdTripleSet out;
  for (const auto& t : known) {
    auto h = m.entities.find(t.head), tl = m.entities.find(t.tail);
    auto r = m.relations.find(std::string(kg::relation_name(t.relation)));
    if (h && tl && r) out.insert({*h, *r, *tl});
  }
  return out;
}

}  // namespace detail

// Scores every gene g as score(g, gene_disease, disease). With `known`, other
// genes already linked to the disease are filtered from the pool; pass
// nullptr for the raw setting.
inline RankedQuery rank_genes(const embed::EmbeddingModel& m, const std::string& disease, const std::string& true_gene,
                              std::span<const std::string> all_genes, const kg::TripleSet* known) {
  const std::uint32_t d = detail::require(m.entities, disease);
  const std::uint32_t g = detail::require(m.entities, true_gene);
  const std::uint32_t rel = m.relations.id(std::string(kg::relation_name(kg::Relation::kGeneDisease)));
  if (std::find(all_genes.begin(), all_genes.end(), true_gene) == all_genes.end()) {
    throw Error("true gene '" + true_gene + "' is not among the candidate genes");
  }
  std::vector<std::uint32_t> cand;
  cand.reserve(all_genes.size());
  for (const auto& name : all_genes) cand.push_back(detail::require(m.entities, name));
  std::optional<embed::IdTripleSet> kid;
  if (known) kid = detail::known_ids(m, *known);
  auto r = rank_side(m, {g, rel, d}, true, cand, kid ? &*kid : nullptr);
  return {disease, true_gene, r.pool, r.rank};
}

inline EvalReport summarize(const std::vector<RankedQuery>& queries) {
  EvalReport r;
  r.n_queries = queries.size();
  if (queries.empty()) return r;
  double mr = 0, mp = 0, h30 = 0, h3 = 0, h1 = 0;
  for (const auto& q : queries) {
    mr += static_cast<double>(q.rank);
    mp += 100.0 * (1.0 - static_cast<double>(q.rank - 1) / static_cast<double>(q.pool));
    h30 += q.rank <= 30 ? 1 : 0;
    h3 += q.rank <= 3 ? 1 : 0;
    h1 += q.rank <= 1 ? 1 : 0;
  }
  const double n = static_cast<double>(queries.size());
  r.mr = mr / n;
  r.mp = mp / n;
  r.hit30 = 100.0 * h30 / n;
  r.hit3 = 100.0 * h3 / n;
  r.hit1 = 100.0 * h1 / n;
  return r;
}

struct Evaluation {
  EvalReport report;
  std::vector<RankedQuery> queries;
};

// One query per gene_disease test triple, in sorted triple order. The pool
// ids and the filter set are resolved once for the whole run.
inline Evaluation evaluate(const embed::EmbeddingModel& m, const std::vector<kg::Triple>& test,
                           std::span<const std::string> all_genes, const kg::TripleSet* known) {
  if (test.empty()) throw Error("evaluate: empty test set");
  const std::uint32_t rel = m.relations.id(std::string(kg::relation_name(kg::Relation::kGeneDisease)));
  std::vector<std::uint32_t> cand;
  cand.reserve(all_genes.size());
  for (const auto& name : all_genes) cand.push_back(detail::require(m.entities, name));
  std::optional<embed::IdTripleSet> kid;
  if (known) kid = detail::known_ids(m, *known);

  Evaluation out;
  for (const auto& t : test) {
    if (t.relation != kg::Relation::kGeneDisease) continue;
    const std::uint32_t g = detail::require(m.entities, t.head);
    const std::uint32_t d = detail::require(m.entities, t.tail);
    if (std::find(cand.begin(), cand.end(), g) == cand.end()) {
      throw Error("true gene '" + t.head + "' is not among the candidate genes");
    }
    auto r = rank_side(m, {g, rel, d}, true, cand, kid ? &*kid : nullptr);
    out.queries.push_back({t.tail, t.head, r.pool, r.rank});
  }
  out.report = summarize(out.queries);
  return out;
}

inline std::vector<kg::Triple> triples_of(const kg::KnowledgeGraph& g) {
  std::vector<kg::Triple> out;
  for (const auto& [t, _] : g) out.push_back(t);
  return out;
}

// Gene entities ("gene:" prefix) of a graph, sorted.
inline std::vector<std::string> genes_of(const kg::KnowledgeGraph& g) {
  std::vector<std::string> out;
  for (const auto& e : g.entities()) {
    if (e.rfind(kg::kGenePrefix, 0) == 0) out.push_back(e);
  }
  return out;
}

inline std::string ranks_tsv(const std::vector<RankedQuery>& queries) {
  std::string out = "disease\tgene\trank\tpool\n";
  for (const auto& q : queries) {
    out += q.disease + "\t" + q.gene + "\t" + std::to_string(q.rank) + "\t" + std::to_string(q.pool) + "\n";
  }
  return out;
}

// Percentage change per metric: reduction for MR, lift for the others.
// nullopt where the baseline metric is 0.
struct RelativeChange {
  std::optional<double> mr_reduction;
  std::optional<double> mp_lift;
  std::optional<double> hit30_lift;
  std::optional<double> hit3_lift;
  std::optional<double> hit1_lift;
};

inline RelativeChange relative_change(const EvalReport& base, const EvalReport& treat) {
  auto lift = [](double b, double t) -> std::optional<double> {
    if (b == 0.0) return std::nullopt;
    return 100.0 * (t - b) / b;
  };
  RelativeChange c;
  if (base.mr != 0.0) c.mr_reduction = 100.0 * (base.mr - treat.mr) / base.mr;
  c.mp_lift = lift(base.mp, treat.mp);
  c.hit30_lift = lift(base.hit30, treat.hit30);
  c.hit3_lift = lift(base.hit3, treat.hit3);
  c.hit1_lift = lift(base.hit1, treat.hit1);
  return c;
}

inline void to_json(nlohmann::json& j, const RelativeChange& c) {
  auto v = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json("undefined"); };
  j = nlohmann::json{{"mr_reduction", v(c.mr_reduction)}, {"mp_lift", v(c.mp_lift)},
                     {"hit30_lift", v(c.hit30_lift)}, {"hit3_lift", v(c.hit3_lift)},
                     {"hit1_lift", v(c.hit1_lift)}};
}

}  // namespace bioie::lpeval
