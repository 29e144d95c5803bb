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

// RotatE knowledge graph embeddings.
//
// Entities are vectors in C^d, relations are element-wise rotations
// r_i = exp(i * theta_i), and a triple (h, r, t) is scored by
//
//   score = gamma - sum_i |h_i * r_i - t_i|
//
// Training minimizes the self-adversarial negative sampling loss
//
//   L = -log sigmoid(gamma - d(pos)) - sum_j w_j log sigmoid(d(neg_j) - gamma)
//
// with w = softmax(alpha * score(neg)) held constant during differentiation.
// Optimization is plain mini-batch SGD with a fixed learning rate.

#pragma once

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bioie/common.hpp"
#include "bioie/kg.hpp"
#include "json.hpp"

namespace bioie::embed {

// Bijective name <-> dense id table.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names) {
    for (auto& n : names) add(std::move(n));
  }

  std::uint32_t add(std::string name) {
    auto [it, inserted] = index_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(std::move(name));
    return it->second;
  }

  std::optional<std::uint32_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::uint32_t id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown entity or relation '" + name + "'");
    return it->second;
  }

  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const Vocabulary& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct TrainConfig {
  std::size_t dim = 64;
  double gamma = 12.0;
  double learning_rate = 0.05;
  std::size_t batch_size = 128;
  std::size_t negatives = 16;
  double adversarial_temperature = 1.0;
  int epochs = 100;
  std::uint64_t seed = 0;

  bool operator==(const TrainConfig&) const = default;

  void validate() const {
    if (dim == 0) throw Error("dim must be positive");
    if (!(gamma > 0)) throw Error("gamma must be positive");
    if (!(learning_rate > 0)) throw Error("learning_rate must be positive");
    if (batch_size == 0) throw Error("batch_size must be positive");
    if (negatives == 0) throw Error("negatives must be positive");
    if (adversarial_temperature < 0) throw Error("adversarial_temperature must be >= 0");
    if (epochs < 1) throw Error("epochs must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"dim", c.dim}, {"gamma", c.gamma}, {"learning_rate", c.learning_rate},
                     {"batch_size", c.batch_size}, {"negatives", c.negatives},
                     {"adversarial_temperature", c.adversarial_temperature}, {"epochs", c.epochs},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.dim = j.value("dim", d.dim);
  c.gamma = j.value("gamma", d.gamma);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.negatives = j.value("negatives", d.negatives);
  c.adversarial_temperature = j.value("adversarial_temperature", d.adversarial_temperature);
  c.epochs = j.value("epochs", d.epochs);
  c.seed = j.value("seed", d.seed);
}

struct IdTriple {
  std::uint32_t head = 0;
  std::uint32_t relation = 0;
  std::uint32_t tail = 0;

  auto operator<=>(const IdTriple&) const = default;
};

struct IdTripleHash {
  std::size_t operator()(const IdTriple& t) const {
    std::uint64_t k = (static_cast<std::uint64_t>(t.head) << 34) ^
                      (static_cast<std::uint64_t>(t.relation) << 24) ^ t.tail;
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

using IdTripleSet = std::unordered_set<IdTriple, IdTripleHash>;

// Entity row layout: d real parts followed by d imaginary parts.
struct EmbeddingModel {
  std::size_t dim = 0;
  double gamma = 12.0;
  Vocabulary entities;
  Vocabulary relations;
  std::vector<double> entity;  // n_entities x 2d
  std::vector<double> phase;   // n_relations x d, each in (-pi, pi]
  TrainConfig config;

  std::size_t n_entities() const { return entities.size(); }
  std::size_t n_relations() const { return relations.size(); }

  std::span<double> entity_row(std::uint32_t e) { return {entity.data() + std::size_t{e} * 2 * dim, 2 * dim}; }
  std::span<const double> entity_row(std::uint32_t e) const {
    return {entity.data() + std::size_t{e} * 2 * dim, 2 * dim};
  }
  std::span<double> phase_row(std::uint32_t r) { return {phase.data() + std::size_t{r} * dim, dim}; }
  std::span<const double> phase_row(std::uint32_t r) const { return {phase.data() + std::size_t{r} * dim, dim}; }

  void check(const IdTriple& t) const {
    if (t.head >= n_entities() || t.tail >= n_entities()) throw Error("entity id out of range");
    if (t.relation >= n_relations()) throw Error("relation id out of range");
  }

  bool operator==(const EmbeddingModel&) const = default;
};

// Entity components are drawn from [-gamma/(kInitScale*d), +gamma/(kInitScale*d)].
inline constexpr double kInitScale = 1.0;

inline EmbeddingModel init_model(Vocabulary entities, Vocabulary relations, const TrainConfig& config) {
  config.validate();
  if (entities.size() == 0 || relations.size() == 0) throw Error("init_model: need at least one entity and relation");
  EmbeddingModel m;
  m.dim = config.dim;
  m.gamma = config.gamma;
  m.config = config;
  m.entities = std::move(entities);
  m.relations = std::move(relations);
  Rng rng(config.seed);
  const double range = config.gamma / (kInitScale * static_cast<double>(config.dim));
  m.entity.resize(m.n_entities() * 2 * config.dim);
  for (double& x : m.entity) x = rng.uniform(-range, range);
  m.phase.resize(m.n_relations() * config.dim);
  // uniform in [-pi, pi), mapped to (-pi, pi]
  for (double& x : m.phase) x = wrap_phase(rng.uniform(-std::numbers::pi, std::numbers::pi));
  return m;
}

inline EmbeddingModel init_model(std::size_t n_entities, std::size_t n_relations, const TrainConfig& config) {
  Vocabulary e, r;
  for (std::size_t i = 0; i < n_entities; ++i) e.add("e" + std::to_string(i));
  for (std::size_t i = 0; i < n_relations; ++i) r.add("r" + std::to_string(i));
  return init_model(std::move(e), std::move(r), config);
}

// cos/sin of every relation phase, computed once per batch.
struct Rotations {
  std::size_t dim = 0;
  std::vector<double> cos, sin;

  explicit Rotations(const EmbeddingModel& m) : dim(m.dim), cos(m.phase.size()), sin(m.phase.size()) {
    for (std::size_t k = 0; k < m.phase.size(); ++k) {
      cos[k] = std::cos(m.phase[k]);
      sin[k] = std::sin(m.phase[k]);
    }
  }
  const double* c(std::uint32_t r) const { return cos.data() + static_cast<std::size_t>(r) * dim; }
  const double* s(std::uint32_t r) const { return sin.data() + static_cast<std::size_t>(r) * dim; }
};

inline double distance(const EmbeddingModel& m, const Rotations& rot, const IdTriple& t) {
  m.check(t);
  const std::size_t d = m.dim;
  auto h = m.entity_row(t.head), tl = m.entity_row(t.tail);
  const double* cs = rot.c(t.relation);
  const double* sn = rot.s(t.relation);
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double re = h[i] * cs[i] - h[d + i] * sn[i] - tl[i];
    const double im = h[i] * sn[i] + h[d + i] * cs[i] - tl[d + i];
    sum += std::sqrt(re * re + im * im);
  }
  return sum;
}

inline double distance(const EmbeddingModel& m, const IdTriple& t) {
  m.check(t);
  const std::size_t d = m.dim;
  auto h = m.entity_row(t.head), tl = m.entity_row(t.tail);
  auto th = m.phase_row(t.relation);
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double c = std::cos(th[i]), s = std::sin(th[i]);
    const double re = h[i] * c - h[d + i] * s - tl[i];
    const double im = h[i] * s + h[d + i] * c - tl[d + i];
    sum += std::sqrt(re * re + im * im);
  }
  return sum;
}

inline double distance(const EmbeddingModel& m, std::uint32_t h, std::uint32_t r, std::uint32_t t) {
  return distance(m, IdTriple{h, r, t});
}

inline double score(const EmbeddingModel& m, const IdTriple& t) { return m.gamma - distance(m, t); }

inline double score(const EmbeddingModel& m, std::uint32_t h, std::uint32_t r, std::uint32_t t) {
  return score(m, IdTriple{h, r, t});
}

enum class CorruptMode { kHead, kTail, kBoth };

inline constexpr int kMaxNegativeRetries = 64;

// Corrupts the head or tail with uniform draws from pool, redrawing while the
// result is forbidden or a self-loop. After kMaxNegativeRetries the last draw
// is accepted, unless no admissible replacement exists at all, which throws.
inline std::vector<IdTriple> negative_sample(const IdTriple& t, std::size_t k, CorruptMode mode,
                                             std::span<const std::uint32_t> pool, const IdTripleSet& forbidden,
                                             Rng& rng) {
  std::vector<IdTriple> out;
  if (k == 0) return out;
  if (pool.empty()) throw Error("negative_sample: empty entity pool");
  out.reserve(k);
  auto corrupt = [&](bool head, std::uint32_t e) {
    IdTriple c = t;
    (head ? c.head : c.tail) = e;
    return c;
  };
  auto admissible = [&](const IdTriple& c) { return c.head != c.tail && !forbidden.count(c); };
  for (std::size_t n = 0; n < k; ++n) {
    bool head = mode == CorruptMode::kHead || (mode == CorruptMode::kBoth && rng.coin());
    IdTriple c;
    int tries = 0;
    do {
      c = corrupt(head, pool[rng.below(pool.size())]);
    } while (!admissible(c) && ++tries < kMaxNegativeRetries);
    if (!admissible(c)) {
      bool any = false;
      for (auto e : pool) {
        if (admissible(corrupt(head, e))) {
          any = true;
          break;
        }
      }
      if (!any) throw Error("negative_sample: entity pool exhausted, no admissible corruption");
    }
    out.push_back(c);
  }
  return out;
}

// softmax(alpha * scores), shifted by the max for stability.
inline std::vector<double> adversarial_weights(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw Error("adversarial_weights: empty score list");
  double top = alpha * scores[0];
  for (double s : scores) top = std::max(top, alpha * s);
  std::vector<double> w(scores.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    w[j] = std::exp(alpha * scores[j] - top);
    sum += w[j];
  }
  for (double& x : w) x /= sum;
  return w;
}

// Sparse gradient over the rows touched by a batch.
struct Gradient {
  std::map<std::uint32_t, std::vector<double>> entity;    // row -> 2d
  std::map<std::uint32_t, std::vector<double>> relation;  // row -> d

  std::vector<double>& entity_row(std::uint32_t e, std::size_t d) {
    auto& v = entity[e];
    if (v.empty()) v.assign(2 * d, 0.0);
    return v;
  }
  std::vector<double>& relation_row(std::uint32_t r, std::size_t d) {
    auto& v = relation[r];
    if (v.empty()) v.assign(d, 0.0);
    return v;
  }
};

struct LossGrad {
  double loss = 0.0;
  Gradient grad;
};

namespace detail {

// grad += coef * d distance(t) / d params.
inline void add_distance_grad(const EmbeddingModel& m, const Rotations& rot, const IdTriple& t, double coef,
                              Gradient& g) {
  const std::size_t d = m.dim;
  auto h = m.entity_row(t.head), tl = m.entity_row(t.tail);
  const double* cs = rot.c(t.relation);
  const double* sn = rot.s(t.relation);
  auto& gh = g.entity_row(t.head, d);
  auto& gt = g.entity_row(t.tail, d);
  auto& gr = g.relation_row(t.relation, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double c = cs[i], s = sn[i];
    const double hr = h[i], hi = h[d + i];
    const double re = hr * c - hi * s - tl[i];
    const double im = hr * s + hi * c - tl[d + i];
    const double mod = std::sqrt(re * re + im * im);
    if (mod == 0.0) continue;  // subgradient 0 at the kink
    const double ur = coef * re / mod, ui = coef * im / mod;
    gh[i] += ur * c + ui * s;
    gh[d + i] += -ur * s + ui * c;
    gt[i] -= ur;
    gt[d + i] -= ui;
    gr[i] += ur * (-hr * s - hi * c) + ui * (hr * c - hi * s);
  }
}

inline double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

namespace detail {

// Loss and gradient for given negative weights, treated as constants.
inline double weighted_loss_grad(const EmbeddingModel& m, const Rotations& rot, const IdTriple& positive,
                                 std::span<const IdTriple> negatives, double dp, std::span<const double> dn,
                                 std::span<const double> w, double scale, Gradient& grad) {
  const double gamma = m.gamma;
  double loss = -log_sigmoid(gamma - dp);
  // dL/d(dp) = sigmoid(dp - gamma)
  add_distance_grad(m, rot, positive, scale * sigmoid(dp - gamma), grad);
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    loss -= w[j] * log_sigmoid(dn[j] - gamma);
    // dL/d(dn_j) = -w_j * sigmoid(gamma - dn_j)
    add_distance_grad(m, rot, negatives[j], -scale * w[j] * sigmoid(gamma - dn[j]), grad);
  }
  return loss;
}

}  // namespace detail

// Loss of one positive against its negatives; gradients are scaled by
// `scale` (1/batch size when accumulating a batch mean) and added to `grad`.
// The self-adversarial weights get no gradient.
inline double accumulate_loss_grad(const EmbeddingModel& m, const Rotations& rot, const IdTriple& positive,
                                   std::span<const IdTriple> negatives, double alpha, double scale,
                                   Gradient& grad) {
  if (negatives.empty()) throw Error("loss_and_grad: no negatives");
  const double dp = distance(m, rot, positive);
  std::vector<double> dn(negatives.size()), sn(negatives.size());
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    dn[j] = distance(m, rot, negatives[j]);
    sn[j] = m.gamma - dn[j];
  }
  const std::vector<double> w = adversarial_weights(sn, alpha);
  return detail::weighted_loss_grad(m, rot, positive, negatives, dp, dn, w, scale, grad);
}

inline LossGrad loss_and_grad(const EmbeddingModel& m, const IdTriple& positive,
                              std::span<const IdTriple> negatives, const TrainConfig& config) {
  LossGrad out;
  out.loss = accumulate_loss_grad(m, Rotations(m), positive, negatives, config.adversarial_temperature, 1.0, out.grad);
  return out;
}

// Self-adversarial weights of the negatives under the current model.
inline std::vector<double> negative_weights(const EmbeddingModel& m, std::span<const IdTriple> negatives,
                                            double alpha) {
  const Rotations rot(m);
  std::vector<double> sn;
  for (const auto& t : negatives) sn.push_back(m.gamma - distance(m, rot, t));
  return adversarial_weights(sn, alpha);
}

// Same loss with the negative weights fixed from outside; its gradient is
// the exact derivative, which makes it the target for finite differences.
inline LossGrad loss_and_grad_fixed(const EmbeddingModel& m, const IdTriple& positive,
                                    std::span<const IdTriple> negatives, std::span<const double> weights) {
  if (negatives.empty()) throw Error("loss_and_grad: no negatives");
  if (weights.size() != negatives.size()) throw Error("loss_and_grad: one weight per negative");
  const Rotations rot(m);
  std::vector<double> dn;
  for (const auto& t : negatives) dn.push_back(distance(m, rot, t));
  LossGrad out;
  out.loss = detail::weighted_loss_grad(m, rot, positive, negatives, distance(m, rot, positive), dn, weights, 1.0,
                                        out.grad);
  return out;
}

// One SGD step; phases are re-wrapped into (-pi, pi].
inline void apply_gradient(EmbeddingModel& m, const Gradient& g, double lr) {
  for (const auto& [e, v] : g.entity) {
    auto row = m.entity_row(e);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= lr * v[k];
  }
  for (const auto& [r, v] : g.relation) {
    auto row = m.phase_row(r);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = wrap_phase(row[k] - lr * v[k]);
  }
}

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
};

// Trains on id triples over the given vocabularies. Negatives corrupt head
// or tail (fair coin) with entities drawn from the whole vocabulary and
// filtered against the training triples.
inline EmbeddingModel train(const std::vector<IdTriple>& triples, Vocabulary entities, Vocabulary relations,
                            const TrainConfig& config, std::vector<EpochLog>* log = nullptr) {
  if (triples.empty()) throw Error("train: empty training graph");
  EmbeddingModel m = init_model(std::move(entities), std::move(relations), config);
  for (const auto& t : triples) m.check(t);

  IdTripleSet forbidden(triples.begin(), triples.end());
  std::vector<std::uint32_t> pool(m.n_entities());
  for (std::uint32_t e = 0; e < pool.size(); ++e) pool[e] = e;
  std::vector<IdTriple> order = triples;
  Rng rng(config.seed ^ 0x5deece66dULL);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      Gradient g;
      const Rotations rot(m);
      for (std::size_t i = start; i < end; ++i) {
        auto neg = negative_sample(order[i], config.negatives, CorruptMode::kBoth, pool, forbidden, rng);
        epoch_loss += accumulate_loss_grad(m, rot, order[i], neg, config.adversarial_temperature, scale, g);
      }
      apply_gradient(m, g, config.learning_rate);
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw Error("train: non-finite loss at epoch " + std::to_string(epoch));
    if (log) log->push_back({epoch, epoch_loss});
  }
  return m;
}

// Canonical relation vocabulary shared by every graph.
inline Vocabulary relation_vocabulary() {
  return Vocabulary({std::string(kg::relation_name(kg::Relation::kPpi)),
                     std::string(kg::relation_name(kg::Relation::kGeneDisease))});
}

inline Vocabulary entity_vocabulary(const kg::KnowledgeGraph& g) {
  auto ents = g.entities();
  return Vocabulary(std::vector<std::string>(ents.begin(), ents.end()));
}

inline std::vector<IdTriple> to_ids(const kg::KnowledgeGraph& g, const Vocabulary& e, const Vocabulary& r) {
  std::vector<IdTriple> out;
  out.reserve(g.size());
  for (const auto& [t, _] : g) {
    out.push_back({e.id(t.head), r.id(std::string(kg::relation_name(t.relation))), e.id(t.tail)});
  }
  return out;
}

inline EmbeddingModel train(const kg::KnowledgeGraph& g, const TrainConfig& config,
                            std::vector<EpochLog>* log = nullptr) {
  if (g.empty()) throw Error("train: empty training graph");
  Vocabulary e = entity_vocabulary(g), r = relation_vocabulary();
  auto ids = to_ids(g, e, r);
  return train(ids, std::move(e), std::move(r), config, log);
}

// --- checkpoints -----------------------------------------------------------
//
// Binary layout (host byte order, little-endian on supported targets):
//   "BIOIEKGE" | u32 version | u32 dim | u32 n_entities | u32 n_relations |
//   f64 gamma | names (u32 length + bytes) for entities then relations |
//   f64 entity[n_entities * 2 * dim] | f64 phase[n_relations * dim]

inline constexpr char kCheckpointMagic[8] = {'B', 'I', 'O', 'I', 'E', 'K', 'G', 'E'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void put(std::string& buf, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.append(p, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error("truncated checkpoint");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize(const EmbeddingModel& m) {
  std::string buf(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::put(buf, kCheckpointVersion);
  detail::put(buf, static_cast<std::uint32_t>(m.dim));
  detail::put(buf, static_cast<std::uint32_t>(m.n_entities()));
  detail::put(buf, static_cast<std::uint32_t>(m.n_relations()));
  detail::put(buf, m.gamma);
  for (const auto* v : {&m.entities, &m.relations}) {
    for (const auto& n : v->names()) {
      detail::put(buf, static_cast<std::uint32_t>(n.size()));
      buf += n;
    }
  }
  buf.append(reinterpret_cast<const char*>(m.entity.data()), m.entity.size() * sizeof(double));
  buf.append(reinterpret_cast<const char*>(m.phase.data()), m.phase.size() * sizeof(double));
  return buf;
}

inline EmbeddingModel deserialize(std::string data) {
  detail::Reader r(std::move(data));
  if (r.bytes(sizeof kCheckpointMagic) != std::string(kCheckpointMagic, sizeof kCheckpointMagic)) {
    throw Error("not a bioie embedding checkpoint");
  }
  if (r.get<std::uint32_t>() != kCheckpointVersion) throw Error("unsupported checkpoint version");
  EmbeddingModel m;
  m.dim = r.get<std::uint32_t>();
  const auto ne = r.get<std::uint32_t>(), nr = r.get<std::uint32_t>();
  m.gamma = r.get<double>();
  for (std::uint32_t i = 0; i < ne + nr; ++i) {
    std::string n = r.bytes(r.get<std::uint32_t>());
    (i < ne ? m.entities : m.relations).add(std::move(n));
  }
  if (m.entities.size() != ne || m.relations.size() != nr) throw Error("duplicate names in checkpoint");
  m.entity.resize(std::size_t{ne} * 2 * m.dim);
  m.phase.resize(std::size_t{nr} * m.dim);
  for (double& x : m.entity) x = r.get<double>();
  for (double& x : m.phase) x = r.get<double>();
  if (!r.done()) throw Error("trailing bytes in checkpoint");
  for (double x : m.entity) {
    if (!std::isfinite(x)) throw Error("non-finite value in checkpoint");
  }
  m.config.dim = m.dim;
  m.config.gamma = m.gamma;
  return m;
}

// Writes the binary checkpoint plus a "<path>.json" TrainConfig sidecar.
inline void save_checkpoint(const EmbeddingModel& m, const std::string& path) {
  write_file(path, serialize(m));
  write_file(path + ".json", nlohmann::json(m.config).dump(2) + "\n");
}

inline EmbeddingModel load_checkpoint(const std::string& path) {
  EmbeddingModel m = deserialize(read_file(path));
  std::ifstream side(path + ".json");
  if (side) {
    m.config = nlohmann::json::parse(side).get<TrainConfig>();
    m.config.dim = m.dim;
    m.config.gamma = m.gamma;
  }
  return m;
}

}  // namespace bioie::embed
