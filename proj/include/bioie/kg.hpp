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

// Typed edge graphs with provenance: loading from source dumps, merging,
// seeded splitting and overlap statistics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bioie/common.hpp"
#include "json.hpp"

namespace bioie::kg {

enum class Relation : std::uint8_t { kPpi = 0, kGeneDisease = 1 };

inline std::string_view relation_name(Relation r) { return r == Relation::kPpi ? "ppi" : "gene_disease"; }

inline Relation parse_relation(std::string_view s) {
  if (s == "ppi") return Relation::kPpi;
  if (s == "gene_disease") return Relation::kGeneDisease;
  throw Error("unknown relation '" + std::string(s) + "' (expected ppi or gene_disease)");
}

enum class Source : std::uint8_t { kDisgenet = 0, kString, kIeV1, kIeV2, kIeV3 };
inline constexpr std::array<std::string_view, 5> kSourceNames = {"disgenet", "string", "ie_v1", "ie_v2", "ie_v3"};

inline Source parse_source(std::string_view s) {
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (kSourceNames[i] == s) return static_cast<Source>(i);
  }
  throw Error("unknown source tag '" + std::string(s) + "'");
}

inline std::uint8_t source_bit(Source s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }

inline std::string sources_str(std::uint8_t mask) {
  std::string out;
  for (std::size_t i = 0; i < kSourceNames.size(); ++i) {
    if (mask & (1u << i)) {
      if (!out.empty()) out += ',';
      out += kSourceNames[i];
    }
  }
  return out;
}

// ppi triples are undirected and stored with head <= tail; gene_disease
// triples point gene -> disease.
struct Triple {
  std::string head;
  Relation relation = Relation::kPpi;
  std::string tail;

  auto operator<=>(const Triple&) const = default;
};

inline Triple make_triple(std::string head, Relation r, std::string tail) {
  if (head == tail) throw Error("self-loop on '" + head + "'");
  if (r == Relation::kPpi && tail < head) std::swap(head, tail);
  return {std::move(head), r, std::move(tail)};
}

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t h = fnv1a(t.head);
    h = fnv1a(relation_name(t.relation), h ^ 0x9e3779b97f4a7c15ULL);
    return static_cast<std::size_t>(fnv1a(t.tail, h ^ 0x517cc1b727220a95ULL));
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

struct EdgeInfo {
  std::uint8_t sources = 0;
  std::optional<double> confidence;

  bool operator==(const EdgeInfo&) const = default;
};

class KnowledgeGraph {
 public:
  using Map = std::map<Triple, EdgeInfo>;

  void add(const Triple& t, Source src, std::optional<double> confidence = std::nullopt) {
    add(t, EdgeInfo{source_bit(src), confidence});
  }

  void add(const Triple& t, const EdgeInfo& info) {
    if (info.sources == 0) throw Error("edge without provenance");
    auto [it, inserted] = edges_.try_emplace(t, info);
    if (inserted) return;
    it->second.sources |= info.sources;
    if (info.confidence) {
      it->second.confidence = it->second.confidence ? std::max(*it->second.confidence, *info.confidence)
                                                    : *info.confidence;
    }
  }

  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  bool contains(const Triple& t) const { return edges_.count(t) > 0; }
  const EdgeInfo* find(const Triple& t) const {
    auto it = edges_.find(t);
    return it == edges_.end() ? nullptr : &it->second;
  }
  const Map& edges() const { return edges_; }
  Map::const_iterator begin() const { return edges_.begin(); }
  Map::const_iterator end() const { return edges_.end(); }

  std::size_t count(Relation r) const {
    std::size_t n = 0;
    for (const auto& [t, _] : edges_) n += t.relation == r ? 1 : 0;
    return n;
  }

  std::set<std::string> entities() const {
    std::set<std::string> out;
    for (const auto& [t, _] : edges_) {
      out.insert(t.head);
      out.insert(t.tail);
    }
    return out;
  }

  bool operator==(const KnowledgeGraph&) const = default;

 private:
  Map edges_;
};

inline KnowledgeGraph merge(const std::vector<const KnowledgeGraph*>& graphs) {
  KnowledgeGraph out;
  for (const auto* g : graphs) {
    for (const auto& [t, info] : *g) out.add(t, info);
  }
  return out;
}

inline KnowledgeGraph merge(const KnowledgeGraph& a, const KnowledgeGraph& b) { return merge({&a, &b}); }

// --- source loading ------------------------------------------------------

enum class Schema { kStringPpi, kDisgenetGd, kIeTsv };

inline Schema parse_schema(std::string_view s) {
  if (s == "string_ppi") return Schema::kStringPpi;
  if (s == "disgenet_gd") return Schema::kDisgenetGd;
  if (s == "ie_tsv") return Schema::kIeTsv;
  throw Error("unknown edge schema '" + std::string(s) + "' (expected string_ppi, disgenet_gd or ie_tsv)");
}

inline constexpr std::string_view kGenePrefix = "gene:";
inline constexpr std::string_view kDiseasePrefix = "disease:";

inline std::string namespaced(std::string_view prefix, std::string_view raw) {
  if (raw.substr(0, prefix.size()) == prefix) return std::string(raw);
  return std::string(prefix) + std::string(raw);
}

// alias -> canonical, applied to raw ids before namespacing.
using AliasMap = std::unordered_map<std::string, std::string>;

inline AliasMap load_aliases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open alias map '" + path + "'");
  AliasMap m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() != 2) throw Error(path + ":" + std::to_string(line_no) + ": expected 'alias<TAB>canonical'");
    m[std::string(trim(f[0]))] = std::string(trim(f[1]));
  }
  return m;
}

struct LoadOptions {
  std::optional<double> min_score;  // in the schema's own score units
  const AliasMap* aliases = nullptr;
  std::optional<Source> source;     // provenance override; ie_tsv defaults to ie_v1
};

struct LoadResult {
  KnowledgeGraph graph;
  std::vector<RecordError> errors;
  std::size_t below_threshold = 0;
  std::size_t rows = 0;
};

// string_ppi:  protein_a  protein_b  combined_score (0-1000), confidence = score/1000
// disgenet_gd: gene_id    disease_id score (0-1)
// ie_tsv:      entity_a   entity_b   probability  doc_id  sentence_index
// '#' lines are comments; a first line whose score column is not numeric is
// treated as a header.
inline LoadResult load_edges(const std::string& path, Schema schema, const LoadOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge file '" + path + "'");
  LoadResult out;
  const Source src = opt.source ? *opt.source
                     : schema == Schema::kStringPpi  ? Source::kString
                     : schema == Schema::kDisgenetGd ? Source::kDisgenet
                                                     : Source::kIeV1;
  constexpr std::size_t min_cols = 3;
  auto alias = [&](std::string_view raw) {
    std::string s(trim(raw));
    if (opt.aliases) {
      if (auto it = opt.aliases->find(s); it != opt.aliases->end()) return it->second;
    }
    return s;
  };

  std::string line;
  std::size_t line_no = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() < min_cols) {
      out.errors.push_back({line_no, "expected at least " + std::to_string(min_cols) + " tab-separated columns"});
      first_data = false;
      continue;
    }
    double score = 0;
    try {
      score = parse_double(f[2]);
    } catch (const Error& e) {
      if (!first_data) out.errors.push_back({line_no, e.what()});
      first_data = false;
      continue;
    }
    first_data = false;
    ++out.rows;
    if (!std::isfinite(score)) {
      out.errors.push_back({line_no, "non-finite score"});
      continue;
    }
    if (opt.min_score && score < *opt.min_score) {
      ++out.below_threshold;
      continue;
    }
    std::string a = alias(f[0]), b = alias(f[1]);
    if (a.empty() || b.empty()) {
      out.errors.push_back({line_no, "empty node id"});
      continue;
    }
    try {
      if (schema == Schema::kDisgenetGd) {
        out.graph.add(make_triple(namespaced(kGenePrefix, a), Relation::kGeneDisease, namespaced(kDiseasePrefix, b)),
                      src, score);
      } else {
        double conf = schema == Schema::kStringPpi ? score / 1000.0 : score;
        out.graph.add(make_triple(namespaced(kGenePrefix, a), Relation::kPpi, namespaced(kGenePrefix, b)), src, conf);
      }
    } catch (const Error& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

// --- graph files ---------------------------------------------------------

// head  relation  tail  sources  confidence ('-' when absent); sorted.
inline std::string to_tsv(const KnowledgeGraph& g) {
  std::string out;
  for (const auto& [t, info] : g) {
    out += t.head;
    out += '\t';
    out += relation_name(t.relation);
    out += '\t';
    out += t.tail;
    out += '\t';
    out += sources_str(info.sources);
    out += '\t';
    out += info.confidence ? format_fixed(*info.confidence, 6) : "-";
    out += '\n';
  }
  return out;
}

inline void save_graph(const KnowledgeGraph& g, const std::string& path) { write_file(path, to_tsv(g)); }

inline KnowledgeGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph '" + path + "'");
  KnowledgeGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    try {
      if (f.size() != 5) throw Error("expected 5 columns");
      EdgeInfo info;
      for (auto s : split(f[3], ',')) info.sources |= source_bit(parse_source(trim(s)));
      if (trim(f[4]) != "-") info.confidence = parse_double(f[4]);
      g.add(make_triple(std::string(f[0]), parse_relation(f[1]), std::string(f[2])), info);
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return g;
}

// --- splitting -----------------------------------------------------------

struct SplitSpec {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

struct SplitResult {
  KnowledgeGraph train;
  KnowledgeGraph valid;
  KnowledgeGraph test;
  std::size_t reassigned = 0;  // valid/test triples moved to train for entity coverage
};

inline SplitSpec parse_ratios(std::string_view s, std::uint64_t seed) {
  auto parts = split(s, ',');
  if (parts.size() != 3) throw Error("ratios must be three comma-separated numbers");
  return {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]), seed};
}

// Splits the triples of one relation; all other triples go to train. Valid
// and test triples with an endpoint absent from train are moved to train.
inline SplitResult split(const KnowledgeGraph& g, const SplitSpec& spec, Relation relation) {
  if (spec.train < 0 || spec.valid < 0 || spec.test < 0) throw Error("split ratios must be >= 0");
  if (std::abs(spec.train + spec.valid + spec.test - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

  SplitResult out;
  std::vector<std::pair<const Triple*, const EdgeInfo*>> pool;
  for (const auto& [t, info] : g) {
    if (t.relation == relation) pool.emplace_back(&t, &info);
    else out.train.add(t, info);
  }
  const std::size_t n = pool.size();
  auto n_valid = static_cast<std::size_t>(std::llround(spec.valid * static_cast<double>(n)));
  auto n_test = static_cast<std::size_t>(std::llround(spec.test * static_cast<double>(n)));
  n_valid = std::min(n_valid, n);
  n_test = std::min(n_test, n - n_valid);

  Rng rng(spec.seed);
  rng.shuffle(pool);

  std::vector<std::pair<const Triple*, const EdgeInfo*>> held;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_valid + n_test) held.push_back(pool[i]);
    else out.train.add(*pool[i].first, *pool[i].second);
  }
  std::unordered_set<std::string> known;
  for (const auto& [t, _] : out.train) {
    known.insert(t.head);
    known.insert(t.tail);
  }
  // The known set only grows, so a triple that passes once keeps passing and
  // a single pass is enough.
  std::vector<char> moved(held.size(), 0);
  for (std::size_t i = 0; i < held.size(); ++i) {
    const Triple& t = *held[i].first;
    if (known.count(t.head) && known.count(t.tail)) continue;
    moved[i] = 1;
    ++out.reassigned;
    out.train.add(t, *held[i].second);
    known.insert(t.head);
    known.insert(t.tail);
  }
  for (std::size_t i = 0; i < held.size(); ++i) {
    if (moved[i]) continue;
    (i < n_valid ? out.valid : out.test).add(*held[i].first, *held[i].second);
  }
  return out;
}

// --- overlap -------------------------------------------------------------

struct OverlapReport {
  std::size_t n_extracted = 0;
  std::size_t n_reference = 0;
  std::size_t n_shared = 0;
  double pct_extracted_in_reference = 0.0;
};

inline void to_json(nlohmann::json& j, const OverlapReport& r) {
  j = nlohmann::json{{"n_extracted", r.n_extracted}, {"n_reference", r.n_reference},
                     {"n_shared", r.n_shared}, {"pct_extracted_in_reference", r.pct_extracted_in_reference}};
}

// Shares of ppi triples only.
inline OverlapReport overlap_stats(const KnowledgeGraph& extracted, const KnowledgeGraph& reference) {
  OverlapReport r;
  for (const auto& [t, _] : extracted) {
    if (t.relation != Relation::kPpi) continue;
    ++r.n_extracted;
    if (reference.contains(t)) ++r.n_shared;
  }
  r.n_reference = reference.count(Relation::kPpi);
  if (r.n_extracted > 0) {
    r.pct_extracted_in_reference = 100.0 * static_cast<double>(r.n_shared) / static_cast<double>(r.n_extracted);
  }
  return r;
}

}  // namespace bioie::kg
