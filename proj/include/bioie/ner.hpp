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

// Protein NER: BIO encoding, an averaged-perceptron tagger with greedy
// left-to-right decoding, and exact-span evaluation.

#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/prf.hpp"
#include "bioie/vectors.hpp"
#include "json.hpp"

namespace bioie::ner {

// Enum order doubles as the decoding tie-break: B < I < O.
enum class BioTag : std::uint8_t { B = 0, I = 1, O = 2 };
inline constexpr std::size_t kNumTags = 3;

inline char tag_char(BioTag t) { return "BIO"[static_cast<int>(t)]; }

// [start, end) token offsets.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const TokenSpan&) const = default;
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<TokenSpan> spans;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct EntityMention {
  std::size_t sentence_index = 0;
  TokenSpan span;
  std::string surface;
  std::string entity_id;

  bool operator==(const EntityMention&) const = default;
};

inline std::string span_str(TokenSpan s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

// Sorts spans and checks bounds and overlap.
inline std::vector<TokenSpan> validate_spans(std::vector<TokenSpan> spans, std::size_t n_tokens) {
  std::sort(spans.begin(), spans.end());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    if (s.start >= s.end || s.end > n_tokens) {
      throw Error("span " + span_str(s) + " is empty or out of bounds for " +
                  std::to_string(n_tokens) + " tokens");
    }
    if (k > 0 && spans[k - 1].end > s.start) {
      throw Error("spans " + span_str(spans[k - 1]) + " and " + span_str(s) + " overlap");
    }
  }
  return spans;
}

inline std::vector<BioTag> spans_to_bio(std::size_t n_tokens, const std::vector<TokenSpan>& spans) {
  std::vector<BioTag> tags(n_tokens, BioTag::O);
  for (const auto& s : validate_spans(spans, n_tokens)) {
    tags[s.start] = BioTag::B;
    for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = BioTag::I;
  }
  return tags;
}

inline std::vector<BioTag> spans_to_bio(const AnnotatedSentence& s) {
  return spans_to_bio(s.tokens.size(), s.spans);
}

// Any I that does not continue a B/I run becomes B.
inline void repair_bio(std::vector<BioTag>& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == BioTag::I && (i == 0 || tags[i - 1] == BioTag::O)) tags[i] = BioTag::B;
  }
}

inline bool is_valid_bio(const std::vector<BioTag>& tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == BioTag::I && (i == 0 || tags[i - 1] == BioTag::O)) return false;
  }
  return true;
}

// Decodes a tag stream to spans, repairing stray I tags first.
inline std::vector<TokenSpan> bio_to_spans(std::vector<BioTag> tags) {
  repair_bio(tags);
  std::vector<TokenSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] != BioTag::B) continue;
    std::size_t e = i + 1;
    while (e < tags.size() && tags[e] == BioTag::I) ++e;
    spans.push_back({i, e});
    i = e - 1;
  }
  return spans;
}

// Crude orthographic class: X upper, x lower, d digit, other bytes kept.
// Runs of one class are capped at two characters.
inline std::string word_shape(std::string_view word) {
  std::string shape;
  char last = 0;
  int run = 0;
  for (unsigned char c : word) {
    char s = std::isupper(c) ? 'X' : std::islower(c) ? 'x' : std::isdigit(c) ? 'd' : static_cast<char>(c);
    if (s == last) {
      if (++run > 2) continue;
    } else {
      last = s;
      run = 1;
    }
    shape += s;
  }
  return shape;
}

inline bool is_all_caps(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isupper(c); });
}

inline const std::vector<std::string>& default_templates() {
  static const std::vector<std::string> kTemplates = {
      "bias", "word", "shape", "prefix", "suffix", "has_digit", "has_hyphen", "all_caps",
      "prev_word", "next_word", "prev_tag", "prev2_tags", "vec_sign"};
  return kTemplates;
}

struct TokenFeatures {
  std::vector<std::uint64_t> ids;    // hashed sparse features, sorted
  std::vector<std::string> names;    // parallel to ids before hashing, sorted
  std::vector<double> dense;         // word vector of token i, zeros when OOV
};

// Feature set for token i given the two previous predicted tags
// (prev_tags[0] is tag i-1, prev_tags[1] is tag i-2; O beyond the start).
inline TokenFeatures token_features(std::span<const std::string> tokens, std::size_t i,
                                    std::array<BioTag, 2> prev_tags,
                                    const std::vector<std::string>& templates,
                                    const WordVectors& vectors) {
  if (i >= tokens.size()) throw Error("token_features: index out of range");
  const std::string& w = tokens[i];
  const std::string lw = to_lower(w);
  std::vector<std::string> names;
  auto emit = [&](std::string_view tmpl, std::string_view value) {
    names.push_back(std::string(tmpl) + "=" + std::string(value));
  };
  for (const auto& t : templates) {
    if (t == "bias") {
      emit(t, "");
    } else if (t == "word") {
      emit(t, lw);
    } else if (t == "shape") {
      emit(t, word_shape(w));
    } else if (t == "prefix") {
      for (std::size_t k = 1; k <= 3 && k <= w.size(); ++k) emit(t + std::to_string(k), w.substr(0, k));
    } else if (t == "suffix") {
      for (std::size_t k = 1; k <= 3 && k <= w.size(); ++k) emit(t + std::to_string(k), w.substr(w.size() - k));
    } else if (t == "has_digit") {
      emit(t, std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); }) ? "1" : "0");
    } else if (t == "has_hyphen") {
      emit(t, w.find('-') != std::string::npos ? "1" : "0");
    } else if (t == "all_caps") {
      emit(t, is_all_caps(w) ? "1" : "0");
    } else if (t == "prev_word") {
      emit(t, i == 0 ? "<s>" : to_lower(tokens[i - 1]));
    } else if (t == "next_word") {
      emit(t, i + 1 == tokens.size() ? "</s>" : to_lower(tokens[i + 1]));
    } else if (t == "prev_tag") {
      emit(t, std::string(1, tag_char(prev_tags[0])));
    } else if (t == "prev2_tags") {
      emit(t, std::string{tag_char(prev_tags[1]), tag_char(prev_tags[0])});
    } else if (t == "vec_sign") {
      if (const auto* v = vectors.find(w)) {
        for (std::size_t k = 0; k < v->size(); ++k) {
          if ((*v)[k] > 0) emit("v" + std::to_string(k), "+");
          else if ((*v)[k] < 0) emit("v" + std::to_string(k), "-");
        }
      }
    } else {
      throw Error("unknown NER feature template '" + t + "'");
    }
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  TokenFeatures f;
  f.ids.reserve(names.size());
  for (const auto& n : names) f.ids.push_back(fnv1a(n));
  f.names = std::move(names);
  f.dense.assign(vectors.dim(), 0.0);
  if (std::find(templates.begin(), templates.end(), "vec_sign") != templates.end()) {
    if (const auto* v = vectors.find(w)) f.dense = *v;
  }
  return f;
}

using TagScores = std::array<double, kNumTags>;

struct NerModel {
  static constexpr std::string_view kFormat = "bioie-ner/1";

  std::vector<std::string> templates = default_templates();
  std::unordered_map<std::uint64_t, TagScores> weights;
  std::vector<TagScores> dense_weights;  // one row per vector dimension
  WordVectors vectors;
  int epochs = 0;
  std::uint64_t seed = 0;

  TagScores score(const TokenFeatures& f) const {
    TagScores s{};
    for (auto id : f.ids) {
      if (auto it = weights.find(id); it != weights.end()) {
        for (std::size_t t = 0; t < kNumTags; ++t) s[t] += it->second[t];
      }
    }
    for (std::size_t k = 0; k < f.dense.size() && k < dense_weights.size(); ++k) {
      for (std::size_t t = 0; t < kNumTags; ++t) s[t] += dense_weights[k][t] * f.dense[k];
    }
    return s;
  }
};

namespace detail {

inline BioTag argmax(const TagScores& s) {
  std::size_t best = 0;
  for (std::size_t t = 1; t < kNumTags; ++t) {
    if (s[t] > s[best]) best = t;
  }
  return static_cast<BioTag>(best);
}

// Weight with lazily accumulated running sum for averaging.
struct AveragedParam {
  double w = 0.0;
  double total = 0.0;
  std::uint64_t stamp = 0;

  void add(double delta, std::uint64_t step) {
    total += static_cast<double>(step - stamp) * w;
    stamp = step;
    w += delta;
  }
  double average(std::uint64_t step) const {
    return step == 0 ? w : (total + static_cast<double>(step - stamp) * w) / static_cast<double>(step);
  }
};

}  // namespace detail

// Greedy decoding; the output is always a valid BIO sequence.
inline std::vector<BioTag> predict_tags(const NerModel& model, std::span<const std::string> tokens) {
  std::vector<BioTag> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::array<BioTag, 2> prev{i >= 1 ? out[i - 1] : BioTag::O, i >= 2 ? out[i - 2] : BioTag::O};
    BioTag t = detail::argmax(model.score(token_features(tokens, i, prev, model.templates, model.vectors)));
    if (t == BioTag::I && (i == 0 || out[i - 1] == BioTag::O)) t = BioTag::B;
    out.push_back(t);
  }
  return out;
}

inline NerModel train_ner(const std::vector<AnnotatedSentence>& train, int epochs, std::uint64_t seed,
                          const WordVectors& vectors = {},
                          const std::vector<std::string>& templates = default_templates()) {
  if (train.empty()) throw Error("train_ner: empty training set");
  if (epochs < 1) throw Error("train_ner: epochs must be >= 1");

  std::vector<std::vector<BioTag>> gold;
  gold.reserve(train.size());
  for (const auto& s : train) gold.push_back(spans_to_bio(s));

  std::unordered_map<std::uint64_t, std::array<detail::AveragedParam, kNumTags>> params;
  std::vector<std::array<detail::AveragedParam, kNumTags>> dense(vectors.dim());

  NerModel live;
  live.templates = templates;
  live.vectors = vectors;
  live.dense_weights.assign(vectors.dim(), TagScores{});

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& tokens = train[idx].tokens;
      std::vector<BioTag> hist;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::array<BioTag, 2> prev{i >= 1 ? hist[i - 1] : BioTag::O, i >= 2 ? hist[i - 2] : BioTag::O};
        TokenFeatures f = token_features(tokens, i, prev, templates, vectors);
        BioTag guess = detail::argmax(live.score(f));
        BioTag truth = gold[idx][i];
        ++step;
        if (guess != truth) {
          auto g = static_cast<std::size_t>(truth), p = static_cast<std::size_t>(guess);
          for (auto id : f.ids) {
            auto& row = params[id];
            row[g].add(1.0, step);
            row[p].add(-1.0, step);
            auto& w = live.weights[id];
            w[g] = row[g].w;
            w[p] = row[p].w;
          }
          for (std::size_t k = 0; k < f.dense.size(); ++k) {
            if (f.dense[k] == 0.0) continue;
            dense[k][g].add(f.dense[k], step);
            dense[k][p].add(-f.dense[k], step);
            live.dense_weights[k][g] = dense[k][g].w;
            live.dense_weights[k][p] = dense[k][p].w;
          }
        }
        if (guess == BioTag::I && (i == 0 || hist[i - 1] == BioTag::O)) guess = BioTag::B;
        hist.push_back(guess);
      }
    }
  }

  NerModel model;
  model.templates = templates;
  model.vectors = vectors;
  model.epochs = epochs;
  model.seed = seed;
  for (const auto& [id, row] : params) {
    TagScores avg{};
    bool nonzero = false;
    for (std::size_t t = 0; t < kNumTags; ++t) {
      avg[t] = row[t].average(step);
      nonzero = nonzero || avg[t] != 0.0;
    }
    if (nonzero) model.weights.emplace(id, avg);
  }
  model.dense_weights.assign(vectors.dim(), TagScores{});
  for (std::size_t k = 0; k < dense.size(); ++k) {
    for (std::size_t t = 0; t < kNumTags; ++t) model.dense_weights[k][t] = dense[k][t].average(step);
  }
  return model;
}

// alias -> canonical entity id.
using SynonymMap = std::unordered_map<std::string, std::string>;

inline SynonymMap load_synonyms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open synonym map '" + path + "'");
  SynonymMap m;
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

// Uppercased surface, mapped through the synonym table when present.
inline std::string link_entity(const std::string& surface, const SynonymMap* synonyms) {
  std::string up = to_upper(surface);
  if (synonyms) {
    if (auto it = synonyms->find(surface); it != synonyms->end()) return it->second;
    if (auto it = synonyms->find(up); it != synonyms->end()) return it->second;
  }
  return up;
}

inline std::string join_tokens(std::span<const std::string> tokens, TokenSpan s) {
  std::string out;
  for (std::size_t i = s.start; i < s.end; ++i) {
    if (i > s.start) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline std::vector<EntityMention> mentions_from_spans(std::span<const std::string> tokens,
                                                      const std::vector<TokenSpan>& spans,
                                                      std::size_t sentence_index = 0,
                                                      const SynonymMap* synonyms = nullptr) {
  std::vector<EntityMention> out;
  for (const auto& s : spans) {
    std::string surface = join_tokens(tokens, s);
    std::string id = link_entity(surface, synonyms);
    out.push_back({sentence_index, s, std::move(surface), std::move(id)});
  }
  return out;
}

inline std::vector<EntityMention> tag(const NerModel& model, std::span<const std::string> tokens,
                                      std::size_t sentence_index = 0,
                                      const SynonymMap* synonyms = nullptr) {
  if (tokens.empty()) return {};
  return mentions_from_spans(tokens, bio_to_spans(predict_tags(model, tokens)), sentence_index, synonyms);
}

// Counts exact-boundary matches of predicted against gold spans.
inline PrfReport score_spans(const std::vector<std::vector<TokenSpan>>& gold,
                             const std::vector<std::vector<TokenSpan>>& predicted) {
  if (gold.size() != predicted.size()) throw Error("score_spans: sentence count mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    std::set<TokenSpan> g(gold[k].begin(), gold[k].end());
    std::set<TokenSpan> p(predicted[k].begin(), predicted[k].end());
    for (const auto& s : p) (g.count(s) ? tp : fp)++;
    for (const auto& s : g) fn += p.count(s) ? 0 : 1;
  }
  return PrfReport::from_counts(tp, fp, fn);
}

inline PrfReport eval_ner(const NerModel& model, const std::vector<AnnotatedSentence>& test) {
  if (test.empty()) throw Error("eval_ner: empty test set");
  std::vector<std::vector<TokenSpan>> gold, pred;
  for (const auto& s : test) {
    gold.push_back(s.spans);
    pred.push_back(s.tokens.empty() ? std::vector<TokenSpan>{}
                                    : bio_to_spans(predict_tags(model, s.tokens)));
  }
  return score_spans(gold, pred);
}

// --- serialization -------------------------------------------------------

inline nlohmann::json model_to_json(const NerModel& m) {
  std::vector<std::pair<std::uint64_t, TagScores>> rows(m.weights.begin(), m.weights.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  nlohmann::json w = nlohmann::json::array();
  for (const auto& [id, s] : rows) w.push_back({id, s[0], s[1], s[2]});
  nlohmann::json dense = nlohmann::json::array();
  for (const auto& s : m.dense_weights) dense.push_back({s[0], s[1], s[2]});
  return {{"format", NerModel::kFormat}, {"templates", m.templates}, {"epochs", m.epochs},
          {"seed", m.seed}, {"weights", w}, {"dense_weights", dense}, {"vectors", m.vectors}};
}

inline NerModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != NerModel::kFormat) {
    throw Error("not a " + std::string(NerModel::kFormat) + " model");
  }
  NerModel m;
  m.templates = j.at("templates").get<std::vector<std::string>>();
  m.epochs = j.at("epochs").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& row : j.at("weights")) {
    TagScores s{row.at(1).get<double>(), row.at(2).get<double>(), row.at(3).get<double>()};
    for (double x : s) {
      if (!std::isfinite(x)) throw Error("non-finite NER weight");
    }
    m.weights.emplace(row.at(0).get<std::uint64_t>(), s);
  }
  for (const auto& row : j.at("dense_weights")) {
    m.dense_weights.push_back({row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()});
  }
  m.vectors = j.at("vectors").get<WordVectors>();
  return m;
}

inline std::string serialize(const NerModel& m) { return model_to_json(m).dump() + "\n"; }

inline void save_model(const NerModel& m, const std::string& path) { write_file(path, serialize(m)); }

inline NerModel load_model(const std::string& path) {
  try {
    return model_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad NER model '" + path + "': " + e.what());
  }
}

// --- annotation files ----------------------------------------------------

struct AnnotationContents {
  std::vector<AnnotatedSentence> sentences;
  std::vector<RecordError> errors;
};

// JSONL, one sentence per line: {"tokens": [...], "spans": [[s, e], ...]}.
inline AnnotationContents load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open annotations '" + path + "'");
  AnnotationContents out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      AnnotatedSentence s;
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
      for (const auto& sp : j.value("spans", nlohmann::json::array())) {
        s.spans.push_back({sp.at(0).get<std::size_t>(), sp.at(1).get<std::size_t>()});
      }
      s.spans = validate_spans(std::move(s.spans), s.tokens.size());
      out.sentences.push_back(std::move(s));
    } catch (const std::exception& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

inline std::string annotation_line(const AnnotatedSentence& s) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& sp : s.spans) spans.push_back({sp.start, sp.end});
  return nlohmann::json{{"tokens", s.tokens}, {"spans", spans}}.dump();
}

}  // namespace bioie::ner
