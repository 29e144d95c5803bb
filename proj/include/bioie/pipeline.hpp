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

// End-to-end PPI extraction: corpus -> sentences -> tokens -> NER ->
// candidate pairs -> RE -> ppi triples.

#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bioie/corpus.hpp"
#include "bioie/kg.hpp"
#include "bioie/ner.hpp"
#include "bioie/relex.hpp"

namespace bioie::pipeline {

struct ExtractOptions {
  double threshold = 0.5;
  bool species_filter = true;
  corpus::Gazetteer gazetteer = corpus::default_gazetteer();
  const ner::SynonymMap* synonyms = nullptr;
  kg::Source source = kg::Source::kIeV1;
};

// One predicted interaction; entity_a <= entity_b.
struct ExtractionRow {
  std::string entity_a;
  std::string entity_b;
  double probability = 0.0;
  std::string doc_id;
  std::size_t sentence_index = 0;
};

struct ExtractionResult {
  std::vector<ExtractionRow> rows;
  kg::KnowledgeGraph graph;
  std::vector<RecordError> corpus_errors;
  std::size_t n_documents = 0;
  std::size_t n_documents_kept = 0;
  std::size_t n_sentences = 0;
  std::size_t n_candidates = 0;
};

inline void extract_abstract(const corpus::Abstract& abstract, const ner::NerModel& ner_model,
                             const relex::ReModel& re_model, const ExtractOptions& opt, ExtractionResult& out) {
  ++out.n_documents;
  if (opt.species_filter && !corpus::species_filter(abstract, opt.gazetteer)) return;
  ++out.n_documents_kept;
  const std::string text = abstract.text();
  for (const auto& sentence : corpus::sentence_split(abstract)) {
    ++out.n_sentences;
    const auto tokens = corpus::token_texts(corpus::tokenize(sentence.slice(text)));
    auto mentions = ner::tag(ner_model, tokens, sentence.index, opt.synonyms);
    if (mentions.size() < 2) continue;
    for (const auto& c : relex::generate_candidates(abstract.doc_id, sentence.index, tokens, mentions)) {
      ++out.n_candidates;
      const double p = relex::predict(re_model, c);
      if (p < opt.threshold) continue;
      ExtractionRow row{c.a.entity_id, c.b.entity_id, p, abstract.doc_id, sentence.index};
      if (row.entity_b < row.entity_a) std::swap(row.entity_a, row.entity_b);
      out.graph.add(kg::make_triple(kg::namespaced(kg::kGenePrefix, row.entity_a), kg::Relation::kPpi,
                                    kg::namespaced(kg::kGenePrefix, row.entity_b)),
                    opt.source, p);
      out.rows.push_back(std::move(row));
    }
  }
}

inline void check_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error("extraction threshold must lie in (0, 1)");
}

inline ExtractionResult extract_ppi(const std::vector<corpus::Abstract>& abstracts, const ner::NerModel& ner_model,
                                    const relex::ReModel& re_model, const ExtractOptions& opt = {}) {
  check_threshold(opt.threshold);
  ExtractionResult out;
  for (const auto& a : abstracts) extract_abstract(a, ner_model, re_model, opt, out);
  return out;
}

inline ExtractionResult extract_ppi(const std::string& corpus_path, corpus::Format format,
                                    const ner::NerModel& ner_model, const relex::ReModel& re_model,
                                    const ExtractOptions& opt = {}) {
  check_threshold(opt.threshold);
  ExtractionResult out;
  corpus::CorpusReader reader(corpus_path, format);
  while (auto a = reader.next()) extract_abstract(*a, ner_model, re_model, opt, out);
  out.corpus_errors = reader.errors();
  return out;
}

// Rebuilds labeled candidates from NER output instead of the gold mentions.
// Sentences are grouped by (doc_id, sentence_index, tokens); a model
// candidate is positive iff its two spans match a gold positive pair.
inline std::vector<relex::LabeledCandidate> with_model_mentions(const std::vector<relex::LabeledCandidate>& gold,
                                                                const ner::NerModel& ner_model,
                                                                const ner::SynonymMap* synonyms = nullptr) {
  using Key = std::tuple<std::string, std::size_t, std::vector<std::string>>;
  using SpanPair = std::pair<ner::TokenSpan, ner::TokenSpan>;
  std::map<Key, std::set<SpanPair>> sentences;
  for (const auto& lc : gold) {
    const auto& c = lc.candidate;
    auto& pos = sentences[Key{c.doc_id, c.sentence_index, c.tokens}];
    if (lc.label) pos.insert({c.a.span, c.b.span});
  }
  std::vector<relex::LabeledCandidate> out;
  for (const auto& [key, positives] : sentences) {
    const auto& [doc_id, index, tokens] = key;
    auto mentions = ner::tag(ner_model, tokens, index, synonyms);
    for (auto& c : relex::generate_candidates(doc_id, index, tokens, std::move(mentions))) {
      const bool label = positives.count({c.a.span, c.b.span}) > 0;
      out.push_back({std::move(c), label});
    }
  }
  return out;
}

// entity_a  entity_b  probability(4 dp)  doc_id  sentence_index
inline std::string extraction_tsv(const std::vector<ExtractionRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.entity_a + "\t" + r.entity_b + "\t" + format_fixed(r.probability, 4) + "\t" + r.doc_id + "\t" +
           std::to_string(r.sentence_index) + "\n";
  }
  return out;
}

}  // namespace bioie::pipeline
