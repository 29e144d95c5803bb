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

// Synthetic data with known ground truth: protein-name sentences for NER and
// RE, planted RotatE graphs, and a module-structured gene/disease fixture.

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/corpus.hpp"
#include "bioie/ner.hpp"
#include "bioie/relex.hpp"
#include "bioie/rotate.hpp"
#include "bioie/vectors.hpp"

namespace bioie::synthetic {

// Unique gene-symbol-like names such as "KRT12", "MAPK3B" or "IL-7R".
inline std::vector<std::string> protein_names(std::size_t n, std::uint64_t seed) {
  static const char* kStems[] = {"ARAP", "ARF", "MAPK", "KRT", "TP", "BRC", "CDK", "SMAD", "STAT", "JAK",
                                 "EGF", "FGF", "PIK", "RAB", "RHO", "SOX", "WNT", "NOTCH", "HSP", "CASP",
                                 "IL-", "TNF", "MYC", "ATG", "PRKD", "ULK", "GATA", "FOX", "KIF", "NFK"};
  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string name = kStems[rng.below(std::size(kStems))];
    name += std::to_string(1 + rng.below(19));
    if (rng.below(4) == 0) name += static_cast<char>('A' + rng.below(3));
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

namespace detail {

// Sentence templates over tokens; "P" marks a protein slot.
inline const std::vector<std::vector<std::string>>& ner_templates() {
  static const std::vector<std::vector<std::string>> k = {
      {"P", "binds", "P", "in", "human", "cells", "."},
      {"We", "found", "that", "P", "phosphorylates", "P", "."},
      {"Expression", "of", "P", "was", "reduced", "in", "mice", "."},
      {"The", "DNA", "binding", "domain", "of", "P", "is", "conserved", "."},
      {"P", "and", "P", "were", "measured", "by", "Western", "blot", "."},
      {"Knockdown", "of", "P", "in", "HeLa", "cells", "increased", "ATP", "levels", "."},
      {"These", "results", "suggest", "that", "P", "activates", "P", "and", "P", "."},
      {"RNA", "levels", "were", "normalized", "to", "GAPDH", "controls", "."},
      {"Mutations", "in", "P", "cause", "disease", "in", "patients", "."},
      {"(", "P", ")", "interacts", "with", "P", "in", "vitro", "."},
  };
  return k;
}

}  // namespace detail

// Sentences whose protein mentions are drawn from `names`; every other token
// is fixed template text, so the gold spans are known exactly. A quarter of
// mentions get a trailing "kinase" token to produce two-token spans.
inline std::vector<ner::AnnotatedSentence> ner_sentences(std::size_t n, const std::vector<std::string>& names,
                                                         std::uint64_t seed) {
  Rng rng(seed);
  const auto& tpl = detail::ner_templates();
  std::vector<ner::AnnotatedSentence> out;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = tpl[rng.below(tpl.size())];
    ner::AnnotatedSentence s;
    for (const auto& tok : t) {
      if (tok != "P") {
        s.tokens.push_back(tok);
        continue;
      }
      std::size_t start = s.tokens.size();
      s.tokens.push_back(names[rng.below(names.size())]);
      if (rng.below(4) == 0) s.tokens.push_back("kinase");
      s.spans.push_back({start, s.tokens.size()});
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Deterministic toy vectors: protein names lean positive on dimension 0,
// everything else negative; remaining dimensions are hash noise.
inline WordVectors toy_vectors(const std::vector<std::string>& proteins, const std::vector<std::string>& words,
                               std::size_t dim) {
  WordVectors wv(dim);
  auto make = [&](const std::string& w, double sign) {
    Rng rng(fnv1a(w));
    std::vector<double> v(dim);
    for (double& x : v) x = rng.uniform(-0.5, 0.5);
    v[0] = sign * (0.5 + 0.5 * rng.uniform());
    return v;
  };
  for (const auto& w : words) wv.add(to_lower(w), make(to_lower(w), -1.0));
  for (const auto& p : proteins) wv.add(p, make(p, +1.0));
  return wv;
}

inline std::vector<std::string> template_vocabulary() {
  std::set<std::string> words;
  for (const auto& t : detail::ner_templates()) {
    for (const auto& w : t) {
      if (w != "P") words.insert(w);
    }
  }
  for (const char* w : {"kinase", "and", "or", "whereas", "binds", "interacts", "with", "were", "studied",
                        "separately", "activates", "inhibits", "phosphorylates", "complex", "forms", "a",
                        "levels", "of", "compared", "to", "both", "measured", "in", "human", "cells", "."}) {
    words.insert(w);
  }
  return {words.begin(), words.end()};
}

// Candidate sentences whose label is decided by the connective word: an
// interaction trigger for positives, a neutral conjunction for negatives.
// With hedged_fraction > 0 that share of sentences uses hedged wording whose
// label is only probably positive, so the set is no longer separable.
inline std::vector<relex::LabeledCandidate> re_candidates(std::size_t n, const std::vector<std::string>& names,
                                                          std::uint64_t seed, double hedged_fraction = 0.0) {
  static const std::vector<std::vector<std::string>> kPos = {
      {"A", "binds", "B", "in", "human", "cells", "."},
      {"A", "interacts", "with", "B", "."},
      {"A", "phosphorylates", "B", "."},
      {"A", "and", "B", "forms", "a", "complex", "."},
      {"A", "activates", "B", "in", "human", "cells", "."},
  };
  static const std::vector<std::vector<std::string>> kNeg = {
      {"A", "and", "B", "were", "studied", "separately", "."},
      {"Levels", "of", "A", "were", "compared", "to", "B", "."},
      {"A", "or", "B", "were", "measured", "in", "human", "cells", "."},
      {"A", "whereas", "B", "levels", "were", "measured", "."},
  };
  static const std::vector<std::pair<std::vector<std::string>, double>> kHedged = {
      {{"A", "may", "bind", "B", "."}, 0.8},
      {{"A", "was", "co-purified", "with", "B", "."}, 0.6},
  };
  Rng rng(seed);
  std::vector<relex::LabeledCandidate> out;
  for (std::size_t k = 0; k < n; ++k) {
    bool label;
    const std::vector<std::string>* tp;
    if (hedged_fraction > 0 && rng.uniform() < hedged_fraction) {
      const auto& h = kHedged[rng.below(kHedged.size())];
      tp = &h.first;
      label = rng.uniform() < h.second;
    } else {
      label = rng.coin();
      const auto& tpls = label ? kPos : kNeg;
      tp = &tpls[rng.below(tpls.size())];
    }
    const auto& t = *tp;
    std::string a = names[rng.below(names.size())], b;
    do {
      b = names[rng.below(names.size())];
    } while (b == a);
    relex::LabeledCandidate lc;
    auto& c = lc.candidate;
    c.doc_id = "syn" + std::to_string(k);
    ner::TokenSpan sa, sb;
    for (const auto& tok : t) {
      if (tok == "A") {
        sa = {c.tokens.size(), c.tokens.size() + 1};
        c.tokens.push_back(a);
      } else if (tok == "B") {
        sb = {c.tokens.size(), c.tokens.size() + 1};
        c.tokens.push_back(b);
      } else {
        c.tokens.push_back(tok);
      }
    }
    c.a = ner::mentions_from_spans(c.tokens, {sa}).front();
    c.b = ner::mentions_from_spans(c.tokens, {sb}).front();
    lc.label = label;
    out.push_back(std::move(lc));
  }
  return out;
}

// --- planted RotatE graphs -------------------------------------------------

struct PlantedGraph {
  embed::EmbeddingModel truth;
  std::vector<embed::IdTriple> triples;  // ascending ground-truth distance
};

// Samples ground-truth embeddings and keeps the n_keep lowest-distance
// non-self-loop triples over all (h, r, t).
inline PlantedGraph planted_graph(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                                  std::size_t n_keep, std::uint64_t seed) {
  embed::TrainConfig cfg;
  cfg.dim = dim;
  cfg.gamma = 1.0;
  cfg.seed = seed;
  PlantedGraph pg{embed::init_model(n_entities, n_relations, cfg), {}};
  // Unit-modulus entities with random angles spread the distances out.
  Rng rng(seed + 1);
  for (std::uint32_t e = 0; e < n_entities; ++e) {
    auto row = pg.truth.entity_row(e);
    for (std::size_t i = 0; i < dim; ++i) {
      const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
      row[i] = std::cos(a);
      row[dim + i] = std::sin(a);
    }
  }
  std::vector<std::pair<double, embed::IdTriple>> all;
  for (std::uint32_t h = 0; h < n_entities; ++h) {
    for (std::uint32_t r = 0; r < n_relations; ++r) {
      for (std::uint32_t t = 0; t < n_entities; ++t) {
        if (h == t) continue;
        embed::IdTriple tr{h, r, t};
        all.emplace_back(embed::distance(pg.truth, tr), tr);
      }
    }
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < std::min(n_keep, all.size()); ++i) pg.triples.push_back(all[i].second);
  return pg;
}

// --- module-structured gene/disease fixture ---------------------------------

// Genes are partitioned into modules. Each module has one disease linked to
// all its genes; each gene also has a private disease whose only edge keeps
// the gene present in any training split. STRING-like PPIs are dense inside
// modules, so after a split a held-out (gene, module disease) link can only
// be inferred through PPI edges. `string_noise` cross-module STRING edges
// blur that signal.
struct ModuleFixture {
  std::vector<std::string> genes;
  std::vector<std::size_t> module_of;
  std::vector<std::array<std::string, 3>> disgenet;  // gene, disease, score
  std::vector<std::array<std::string, 3>> string_ppi;  // a, b, combined score
  std::vector<std::pair<std::size_t, std::size_t>> novel_ppi;  // in-module pairs absent from STRING
  std::vector<corpus::Abstract> abstracts;
};

inline ModuleFixture module_fixture(std::size_t n_modules, std::size_t genes_per_module, std::size_t string_per_module,
                                    std::size_t n_abstracts, std::uint64_t seed, std::size_t string_noise = 0) {
  ModuleFixture f;
  Rng rng(seed);
  f.genes = protein_names(n_modules * genes_per_module, seed);
  for (std::size_t g = 0; g < f.genes.size(); ++g) f.module_of.push_back(g / genes_per_module);

  for (std::size_t g = 0; g < f.genes.size(); ++g) {
    f.disgenet.push_back({f.genes[g], "MOD" + std::to_string(f.module_of[g]), format_fixed(rng.uniform(0.6, 1.0), 3)});
    f.disgenet.push_back({f.genes[g], "RARE_" + f.genes[g], format_fixed(rng.uniform(0.3, 0.6), 3)});
  }

  std::set<std::pair<std::size_t, std::size_t>> ppi;
  for (std::size_t m = 0; m < n_modules; ++m) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < genes_per_module; ++i) {
      for (std::size_t j = i + 1; j < genes_per_module; ++j) {
        pairs.emplace_back(m * genes_per_module + i, m * genes_per_module + j);
      }
    }
    rng.shuffle(pairs);
    const std::size_t keep = std::min(string_per_module, pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (k < keep) ppi.insert(pairs[k]);
      else f.novel_ppi.push_back(pairs[k]);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> known(ppi.begin(), ppi.end());
  const std::size_t n = f.genes.size();
  for (std::size_t k = 0, guard = 0; k < string_noise && n_modules > 1 && guard < 100 * string_noise; ++guard) {
    std::size_t x = rng.below(n), y = rng.below(n);
    if (f.module_of[x] == f.module_of[y]) continue;
    if (ppi.insert({std::min(x, y), std::max(x, y)}).second) ++k;
  }
  for (auto [a, b] : ppi) {
    f.string_ppi.push_back({f.genes[a], f.genes[b], std::to_string(400 + rng.below(600))});
  }

  // Abstracts: in-module pairs described with interaction triggers (a mix of
  // STRING-known and novel pairs), cross-module pairs with neutral wording.
  static const std::vector<std::string> kPos = {
      "{A} binds {B} in human cells.", "{A} interacts with {B}.", "{A} phosphorylates {B} in mice.",
      "We found that {A} activates {B}."};
  static const std::vector<std::string> kNeg = {"{A} and {B} were studied separately.",
                                                "Levels of {A} were compared to {B}."};
  static const std::vector<std::string> kHedged = {"{A} may bind {B}.", "{A} was co-purified with {B}."};
  auto fill = [](std::string s, const std::string& a, const std::string& b) {
    s.replace(s.find("{A}"), 3, a);
    s.replace(s.find("{B}"), 3, b);
    return s;
  };
  for (std::size_t d = 0; d < n_abstracts; ++d) {
    corpus::Abstract a;
    a.doc_id = "PMID" + std::to_string(100000 + d);
    a.title = "Protein interactions in human disease module " + std::to_string(d % n_modules);
    const std::size_t n_sent = 2 + rng.below(3);
    for (std::size_t s = 0; s < n_sent; ++s) {
      if (!a.body.empty()) a.body += " ";
      if (rng.below(3) == 0) {
        std::size_t x = rng.below(f.genes.size()), y;
        do {
          y = rng.below(f.genes.size());
        } while (f.module_of[y] == f.module_of[x]);
        a.body += fill(kNeg[rng.below(kNeg.size())], f.genes[x], f.genes[y]);
      } else {
        const bool novel = rng.coin() && !f.novel_ppi.empty();
        const auto& src = novel ? f.novel_ppi : known;
        auto [x, y] = src[rng.below(src.size())];
        const auto& wording = novel && rng.coin() ? kHedged : kPos;
        a.body += fill(wording[rng.below(wording.size())], f.genes[x], f.genes[y]);
      }
    }
    f.abstracts.push_back(std::move(a));
  }
  return f;
}

}  // namespace bioie::synthetic
