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

// Sentence-level relation extraction: candidate pairs, entity masking,
// engineered + word-vector features, and an L2-regularized logistic
// regression classifier.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/ner.hpp"
#include "bioie/prf.hpp"
#include "bioie/vectors.hpp"
#include "json.hpp"

namespace bioie::relex {

using ner::EntityMention;
using ner::TokenSpan;

inline constexpr std::string_view kMaskA = "@PROT-A$";
inline constexpr std::string_view kMaskB = "@PROT-B$";
inline constexpr std::string_view kMaskOther = "@PROT-O$";

// An unordered mention pair inside one sentence, stored with a.start < b.start.
struct RelationCandidate {
  std::string doc_id;
  std::size_t sentence_index = 0;
  EntityMention a;
  EntityMention b;
  std::vector<std::string> tokens;
  std::vector<TokenSpan> others;  // remaining protein mentions in the sentence

  bool operator==(const RelationCandidate&) const = default;
};

struct LabeledCandidate {
  RelationCandidate candidate;
  bool label = false;
};

// All pairs of distinct mentions; pairs that link to the same entity id are
// dropped.
inline std::vector<RelationCandidate> generate_candidates(const std::string& doc_id,
                                                          std::size_t sentence_index,
                                                          const std::vector<std::string>& tokens,
                                                          std::vector<EntityMention> mentions) {
  std::sort(mentions.begin(), mentions.end(),
            [](const EntityMention& x, const EntityMention& y) { return x.span < y.span; });
  std::vector<RelationCandidate> out;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    for (std::size_t j = i + 1; j < mentions.size(); ++j) {
      if (mentions[i].entity_id == mentions[j].entity_id) continue;
      RelationCandidate c{doc_id, sentence_index, mentions[i], mentions[j], tokens, {}};
      for (std::size_t k = 0; k < mentions.size(); ++k) {
        if (k != i && k != j) c.others.push_back(mentions[k].span);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Candidate with each mention collapsed to its placeholder token and all
// spans remapped onto the shortened sequence.
inline RelationCandidate masked(const RelationCandidate& c) {
  struct Slot {
    TokenSpan span;
    std::string_view mask;
    int which;  // 0 = a, 1 = b, 2 = other
    std::size_t other_index = 0;
  };
  std::vector<Slot> slots{{c.a.span, kMaskA, 0}, {c.b.span, kMaskB, 1}};
  for (std::size_t k = 0; k < c.others.size(); ++k) slots.push_back({c.others[k], kMaskOther, 2, k});
  std::sort(slots.begin(), slots.end(), [](const Slot& x, const Slot& y) { return x.span < y.span; });

  RelationCandidate out = c;
  out.tokens.clear();
  std::size_t pos = 0;
  for (const auto& s : slots) {
    if (s.span.start < pos) throw Error("mask_entities: overlapping mentions in candidate");
    for (; pos < s.span.start; ++pos) out.tokens.push_back(c.tokens[pos]);
    TokenSpan ns{out.tokens.size(), out.tokens.size() + 1};
    out.tokens.emplace_back(s.mask);
    if (s.which == 0) {
      out.a.span = ns;
      out.a.surface = std::string(s.mask);
    } else if (s.which == 1) {
      out.b.span = ns;
      out.b.surface = std::string(s.mask);
    } else {
      out.others[s.other_index] = ns;
    }
    pos = s.span.end;
  }
  for (; pos < c.tokens.size(); ++pos) out.tokens.push_back(c.tokens[pos]);
  return out;
}

inline std::vector<std::string> mask_entities(const RelationCandidate& c) { return masked(c).tokens; }

inline const std::vector<std::string>& default_triggers() {
  static const std::vector<std::string> kTriggers = {
      "binds", "bind", "binding", "bound", "interacts", "interact", "interaction", "interacting",
      "phosphorylates", "phosphorylated", "phosphorylation", "activates", "activated", "activation",
      "inhibits", "inhibited", "inhibition", "associates", "associated", "association", "complex",
      "regulates", "regulated", "recruits", "ubiquitinates", "cleaves", "stabilizes", "targets"};
  return kTriggers;
}

struct FeatureConfig {
  bool masking = true;
  int hash_bits = 16;
  std::size_t vector_dim = 0;
  int window = 3;
  std::vector<std::string> triggers = default_triggers();

  std::size_t sparse_dim() const { return std::size_t{1} << hash_bits; }
  std::size_t total_dim() const { return sparse_dim() + 3 * vector_dim; }

  bool operator==(const FeatureConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = nlohmann::json{{"masking", c.masking}, {"hash_bits", c.hash_bits}, {"vector_dim", c.vector_dim},
                     {"window", c.window}, {"triggers", c.triggers}};
}

inline void from_json(const nlohmann::json& j, FeatureConfig& c) {
  c.masking = j.at("masking").get<bool>();
  c.hash_bits = j.at("hash_bits").get<int>();
  c.vector_dim = j.at("vector_dim").get<std::size_t>();
  c.window = j.at("window").get<int>();
  c.triggers = j.at("triggers").get<std::vector<std::string>>();
}

// Named sparse features (sorted, unique) plus the dense block
// [mean(between) | mean(mention a) | mean(mention b)].
struct CandidateFeatures {
  std::vector<std::string> names;
  std::vector<double> dense;
};

inline std::string distance_bucket(std::size_t dist) {
  if (dist <= 3) return std::to_string(dist);
  if (dist <= 6) return "4-6";
  if (dist <= 10) return "7-10";
  return ">10";
}

namespace detail {

inline void accumulate_mean(const WordVectors& vectors, const std::vector<std::string>& tokens,
                            std::size_t begin, std::size_t end, std::size_t dim,
                            std::vector<double>& out, std::size_t offset) {
  std::size_t hits = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (const auto* v = vectors.find(tokens[i])) {
      for (std::size_t k = 0; k < dim; ++k) out[offset + k] += (*v)[k];
      ++hits;
    }
  }
  if (hits > 1) {
    for (std::size_t k = 0; k < dim; ++k) out[offset + k] /= static_cast<double>(hits);
  }
}

}  // namespace detail

inline CandidateFeatures candidate_features(const RelationCandidate& input, const WordVectors& vectors,
                                            const FeatureConfig& config) {
  if (vectors.dim() != config.vector_dim && !(vectors.empty() && config.vector_dim == 0)) {
    throw Error("candidate_features: word vector dimension " + std::to_string(vectors.dim()) +
                " does not match feature config dimension " + std::to_string(config.vector_dim));
  }
  const RelationCandidate c = config.masking ? masked(input) : input;
  const auto& toks = c.tokens;
  std::set<std::string> triggers(config.triggers.begin(), config.triggers.end());
  std::vector<std::string> names;

  const std::size_t btw_begin = c.a.span.end, btw_end = c.b.span.start;
  for (std::size_t i = btw_begin; i < btw_end; ++i) {
    std::string lw = to_lower(toks[i]);
    names.push_back("btw=" + lw);
    if (triggers.count(lw)) names.push_back("trig=" + lw);
  }
  names.push_back("dist=" + distance_bucket(btw_end - btw_begin + 1));

  const auto w = static_cast<std::size_t>(std::max(config.window, 0));
  auto window = [&](const TokenSpan& s, const std::string& tag) {
    for (std::size_t i = s.start >= w ? s.start - w : 0; i < s.start; ++i) {
      std::string lw = to_lower(toks[i]);
      names.push_back("wl" + tag + "=" + lw);
      if (triggers.count(lw) && (i < btw_begin || i >= btw_end)) names.push_back("trig_win=" + lw);
    }
    for (std::size_t i = s.end; i < std::min(toks.size(), s.end + w); ++i) {
      std::string lw = to_lower(toks[i]);
      names.push_back("wr" + tag + "=" + lw);
      if (triggers.count(lw) && (i < btw_begin || i >= btw_end)) names.push_back("trig_win=" + lw);
    }
  };
  window(c.a.span, "a");
  window(c.b.span, "b");

  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  CandidateFeatures f;
  f.names = std::move(names);
  const std::size_t d = config.vector_dim;
  f.dense.assign(3 * d, 0.0);
  if (d > 0) {
    detail::accumulate_mean(vectors, toks, btw_begin, btw_end, d, f.dense, 0);
    detail::accumulate_mean(vectors, toks, c.a.span.start, c.a.span.end, d, f.dense, d);
    detail::accumulate_mean(vectors, toks, c.b.span.start, c.b.span.end, d, f.dense, 2 * d);
  }
  return f;
}

// Sorted (index, value) pairs over FeatureConfig::total_dim().
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline SparseVector vectorize(const CandidateFeatures& f, const FeatureConfig& config) {
  const std::uint64_t mask = config.sparse_dim() - 1;
  std::map<std::uint32_t, double> acc;
  for (const auto& n : f.names) acc[static_cast<std::uint32_t>(fnv1a(n) & mask)] += 1.0;
  const auto base = static_cast<std::uint32_t>(config.sparse_dim());
  for (std::size_t k = 0; k < f.dense.size(); ++k) {
    if (f.dense[k] != 0.0) acc[base + static_cast<std::uint32_t>(k)] += f.dense[k];
  }
  return {acc.begin(), acc.end()};
}

struct ReModel {
  static constexpr std::string_view kFormat = "bioie-re/1";

  FeatureConfig config;
  std::vector<double> weights;  // size config.total_dim()
  double bias = 0.0;
  double threshold = 0.5;
  WordVectors vectors;

  double margin(const SparseVector& x) const {
    double s = bias;
    for (auto [i, v] : x) s += weights[i] * v;
    return s;
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline ReModel zero_model(const FeatureConfig& config, WordVectors vectors = {}) {
  ReModel m;
  m.config = config;
  m.weights.assign(config.total_dim(), 0.0);
  m.vectors = std::move(vectors);
  return m;
}

inline double predict(const ReModel& model, const RelationCandidate& c) {
  return sigmoid(model.margin(vectorize(candidate_features(c, model.vectors, model.config), model.config)));
}

// Featurizer config must equal the one the model was trained with.
inline double predict(const ReModel& model, const RelationCandidate& c, const FeatureConfig& featurizer) {
  if (!(featurizer == model.config)) throw Error("predict: feature config does not match the model's");
  return predict(model, c);
}

inline bool classify(const ReModel& model, const RelationCandidate& c) {
  return predict(model, c) >= model.threshold;
}

struct TrainHyper {
  double l2 = 1e-4;
  int epochs = 50;
  double lr = 0.5;
  std::size_t batch_size = 32;  // 0 = full batch
  std::uint64_t seed = 1;
};

struct Example {
  SparseVector x;
  bool y = false;
};

// Mean logistic loss over the examples plus (l2/2)·|w|², with its gradient.
struct Objective {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

inline Objective objective(const std::vector<double>& w, double b, const std::vector<Example>& data, double l2) {
  Objective o;
  o.grad_w.assign(w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& ex : data) {
    double z = b;
    for (auto [i, v] : ex.x) z += w[i] * v;
    o.loss += (softplus(z) - (ex.y ? z : 0.0)) * inv_n;
    double r = (sigmoid(z) - (ex.y ? 1.0 : 0.0)) * inv_n;
    for (auto [i, v] : ex.x) o.grad_w[i] += r * v;
    o.grad_b += r;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sq += w[i] * w[i];
    o.grad_w[i] += l2 * w[i];
  }
  o.loss += 0.5 * l2 * sq;
  return o;
}

inline std::vector<Example> featurize(const std::vector<LabeledCandidate>& data, const WordVectors& vectors,
                                      const FeatureConfig& config) {
  std::vector<Example> out;
  out.reserve(data.size());
  for (const auto& lc : data) {
    out.push_back({vectorize(candidate_features(lc.candidate, vectors, config), config), lc.label});
  }
  return out;
}

// Mini-batch gradient descent. L2 decay is applied through a global scale
// factor so each step only touches the coordinates present in the batch.
// epoch_losses, when given, receives the full objective after every epoch.
inline ReModel train_re(const std::vector<LabeledCandidate>& data, const FeatureConfig& config,
                        const TrainHyper& hyper, const WordVectors& vectors = {},
                        std::vector<double>* epoch_losses = nullptr) {
  std::size_t pos = 0;
  for (const auto& d : data) pos += d.label ? 1 : 0;
  if (pos == 0 || pos == data.size()) throw Error("train_re: training data must contain both labels");
  if (hyper.epochs < 1) throw Error("train_re: epochs must be >= 1");
  if (!(hyper.lr > 0)) throw Error("train_re: learning rate must be positive");
  if (hyper.lr * hyper.l2 >= 1.0) throw Error("train_re: lr * l2 must be < 1");

  const std::vector<Example> examples = featurize(data, vectors, config);
  std::vector<double> raw(config.total_dim(), 0.0);
  double scale = 1.0, bias = 0.0;

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t bs = hyper.batch_size == 0 ? examples.size() : hyper.batch_size;
  Rng rng(hyper.seed);
  std::unordered_map<std::uint32_t, double> g;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    if (hyper.batch_size != 0) rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const double inv = 1.0 / static_cast<double>(end - start);
      g.clear();
      double gb = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = examples[order[k]];
        double z = bias;
        for (auto [i, v] : ex.x) z += scale * raw[i] * v;
        double r = (sigmoid(z) - (ex.y ? 1.0 : 0.0)) * inv;
        for (auto [i, v] : ex.x) g[i] += r * v;
        gb += r;
      }
      scale *= 1.0 - hyper.lr * hyper.l2;
      for (auto [i, gi] : g) raw[i] -= hyper.lr * gi / scale;
      bias -= hyper.lr * gb;
      if (scale < 1e-6) {
        for (double& x : raw) x *= scale;
        scale = 1.0;
      }
    }
    if (epoch_losses) {
      std::vector<double> w(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) w[i] = scale * raw[i];
      double l2sq = 0.0;
      for (double x : w) l2sq += x * x;
      double loss = 0.0;
      for (const auto& ex : examples) {
        double z = bias;
        for (auto [i, v] : ex.x) z += w[i] * v;
        loss += softplus(z) - (ex.y ? z : 0.0);
      }
      epoch_losses->push_back(loss / static_cast<double>(examples.size()) + 0.5 * hyper.l2 * l2sq);
    }
  }

  ReModel model = zero_model(config, vectors);
  for (std::size_t i = 0; i < raw.size(); ++i) model.weights[i] = scale * raw[i];
  model.bias = bias;
  return model;
}

inline PrfReport eval_re(const ReModel& model, const std::vector<LabeledCandidate>& test) {
  if (test.empty()) throw Error("eval_re: empty test set");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& lc : test) {
    bool pred = classify(model, lc.candidate);
    if (pred && lc.label) ++tp;
    else if (pred) ++fp;
    else if (lc.label) ++fn;
  }
  return PrfReport::from_counts(tp, fp, fn);
}

// Picks the threshold maximizing validation F1 among the observed
// probabilities; ties go to the lower threshold (higher recall).
inline double tune_threshold(ReModel& model, const std::vector<LabeledCandidate>& valid) {
  if (valid.empty()) throw Error("tune_threshold: empty validation set");
  std::vector<std::pair<double, bool>> scored;
  for (const auto& lc : valid) scored.emplace_back(predict(model, lc.candidate), lc.label);
  std::set<double> cands{0.5};
  for (const auto& [p, y] : scored) cands.insert(std::clamp(p, 1e-9, 1.0 - 1e-9));
  double best_t = 0.5, best_f1 = -1.0;
  for (double t : cands) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [p, y] : scored) {
      bool pred = p >= t;
      if (pred && y) ++tp;
      else if (pred) ++fp;
      else if (y) ++fn;
    }
    double f = PrfReport::from_counts(tp, fp, fn).f1;
    if (f > best_f1) {  // ascending scan: equal F1 keeps the lower threshold
      best_f1 = f;
      best_t = t;
    }
  }
  model.threshold = best_t;
  return best_t;
}

// --- serialization -------------------------------------------------------

inline nlohmann::json model_to_json(const ReModel& m) {
  nlohmann::json w = nlohmann::json::array();
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    if (m.weights[i] != 0.0) w.push_back({i, m.weights[i]});
  }
  return {{"format", ReModel::kFormat}, {"config", m.config}, {"bias", m.bias},
          {"threshold", m.threshold}, {"weights", w}, {"vectors", m.vectors}};
}

inline ReModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != ReModel::kFormat) throw Error("not a " + std::string(ReModel::kFormat) + " model");
  ReModel m = zero_model(j.at("config").get<FeatureConfig>(), j.at("vectors").get<WordVectors>());
  m.bias = j.at("bias").get<double>();
  m.threshold = j.at("threshold").get<double>();
  for (const auto& row : j.at("weights")) {
    auto i = row.at(0).get<std::size_t>();
    if (i >= m.weights.size()) throw Error("RE weight index out of range");
    double v = row.at(1).get<double>();
    if (!std::isfinite(v)) throw Error("non-finite RE weight");
    m.weights[i] = v;
  }
  return m;
}

inline std::string serialize(const ReModel& m) { return model_to_json(m).dump() + "\n"; }

inline void save_model(const ReModel& m, const std::string& path) { write_file(path, serialize(m)); }

inline ReModel load_model(const std::string& path) {
  try {
    return model_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad RE model '" + path + "': " + e.what());
  }
}

// --- labeled candidate files ---------------------------------------------

struct CandidateContents {
  std::vector<LabeledCandidate> candidates;
  std::vector<RecordError> errors;
};

inline TokenSpan parse_span(const nlohmann::json& j) {
  return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

// JSONL {"doc_id", "tokens", "a": [s, e], "b": [s, e], "label": 0|1}, with
// optional "sentence_index" and "others" (spans of bystander mentions).
inline LabeledCandidate parse_labeled(const nlohmann::json& j) {
  LabeledCandidate lc;
  auto& c = lc.candidate;
  c.doc_id = j.value("doc_id", "");
  c.sentence_index = j.value("sentence_index", std::size_t{0});
  c.tokens = j.at("tokens").get<std::vector<std::string>>();
  TokenSpan a = parse_span(j.at("a")), b = parse_span(j.at("b"));
  if (b < a) std::swap(a, b);
  std::vector<TokenSpan> all{a, b};
  if (auto it = j.find("others"); it != j.end()) {
    for (const auto& s : *it) {
      c.others.push_back(parse_span(s));
      all.push_back(c.others.back());
    }
  }
  ner::validate_spans(all, c.tokens.size());
  c.a = ner::mentions_from_spans(c.tokens, {a}).front();
  c.b = ner::mentions_from_spans(c.tokens, {b}).front();
  const auto& lab = j.at("label");
  lc.label = lab.is_boolean() ? lab.get<bool>() : lab.get<int>() != 0;
  return lc;
}

inline CandidateContents load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open candidates '" + path + "'");
  CandidateContents out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.candidates.push_back(parse_labeled(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

inline std::string candidate_line(const LabeledCandidate& lc) {
  const auto& c = lc.candidate;
  nlohmann::json j{{"doc_id", c.doc_id},
                   {"sentence_index", c.sentence_index},
                   {"tokens", c.tokens},
                   {"a", {c.a.span.start, c.a.span.end}},
                   {"b", {c.b.span.start, c.b.span.end}},
                   {"label", lc.label ? 1 : 0}};
  if (!c.others.empty()) {
    nlohmann::json o = nlohmann::json::array();
    for (const auto& s : c.others) o.push_back({s.start, s.end});
    j["others"] = o;
  }
  return j.dump();
}

}  // namespace bioie::relex
