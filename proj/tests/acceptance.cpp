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


// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Usage: bioie_acceptance <bioie-cli> <toy-data-dir> <work-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bioie/kg.hpp"
#include "bioie/lpeval.hpp"
#include "bioie/ner.hpp"
#include "bioie/prf.hpp"
#include "bioie/relex.hpp"
#include "bioie/rotate.hpp"
#include "bioie/synthetic.hpp"
#include "oracles/brute_lp.hpp"

namespace fs = std::filesystem;
using namespace bioie;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[" << what << "] ";
    }
  }
};

std::string g_cli, g_toy, g_work;

// --- 1 ---------------------------------------------------------------------
void metric_arithmetic(Outcome& o) {
  struct Case {
    double p, r, want;
  };
  for (const auto& c : {Case{78.41, 73.87, 76.08}, Case{43.24, 45.71, 44.44}, Case{41.17, 50.00, 45.16},
                        Case{31.37, 68.57, 43.04}, Case{29.87, 70.00, 41.88}}) {
    const double got = f1(c.p, c.r);
    o.detail << format_fixed(got, 3) << " ";
    o.require(std::abs(got - c.want) <= 0.01, "f1 " + format_fixed(c.want, 2));
  }
}

// --- 2 ---------------------------------------------------------------------
void relative_change(Outcome& o) {
  const lpeval::EvalReport base{1952.084, 0, 31.139, 13.879, 0, 1};
  const lpeval::EvalReport v3{1418.397, 0, 37.367, 15.302, 0, 1};
  const auto c = lpeval::relative_change(base, v3);
  o.require(c.mr_reduction && std::abs(*c.mr_reduction - 27.3) <= 0.1, "MR reduction");
  o.require(c.hit30_lift && std::abs(*c.hit30_lift - 20.0) <= 0.1, "hit@30 lift");
  o.require(c.hit3_lift && std::abs(*c.hit3_lift - 10.3) <= 0.1, "hit@3 lift");
  if (o.pass) {
    o.detail << "MR -" << format_fixed(*c.mr_reduction, 2) << "%, hit@30 +" << format_fixed(*c.hit30_lift, 2)
             << "%, hit@3 +" << format_fixed(*c.hit3_lift, 2) << "%";
  }
}

// --- 3 ---------------------------------------------------------------------
void rotate_correctness(Outcome& o) {
  constexpr double kRel = 1e-4, kStep = 1e-5;
  Rng rng(3);
  double worst = 0;
  for (int batch = 0; batch < 50; ++batch) {
    embed::TrainConfig c;
    c.dim = 4;
    c.gamma = rng.uniform(2, 12);
    c.adversarial_temperature = rng.uniform(0, 2);
    c.seed = static_cast<std::uint64_t>(batch);
    auto m = embed::init_model(6, 2, c);
    auto entity = [&] { return static_cast<std::uint32_t>(rng.below(6)); };
    embed::IdTriple pos{entity(), static_cast<std::uint32_t>(rng.below(2)), entity()};
    while (pos.tail == pos.head) pos.tail = entity();
    std::vector<embed::IdTriple> neg;
    for (std::size_t k = 0, n = 1 + rng.below(6); k < n; ++k) {
      auto q = pos;
      (rng.coin() ? q.head : q.tail) = entity();
      if (q.head != q.tail) neg.push_back(q);
    }
    if (neg.empty()) neg.push_back({pos.head, pos.relation, pos.head == 0 ? 1u : 0u});
    // the adversarial weights are constants for the gradient
    const auto lg = embed::loss_and_grad(m, pos, neg, c);
    const auto w = embed::negative_weights(m, neg, c.adversarial_temperature);
    auto check = [&](double analytic, double& param) {
      const double keep = param;
      param = keep + kStep;
      const double up = embed::loss_and_grad_fixed(m, pos, neg, w).loss;
      param = keep - kStep;
      const double down = embed::loss_and_grad_fixed(m, pos, neg, w).loss;
      param = keep;
      const double numeric = (up - down) / (2 * kStep);
      worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
    };
    for (const auto& [e, g] : lg.grad.entity) {
      for (std::size_t k = 0; k < g.size(); ++k) check(g[k], m.entity_row(e)[k]);
    }
    for (const auto& [r, g] : lg.grad.relation) {
      for (std::size_t k = 0; k < g.size(); ++k) check(g[k], m.phase_row(r)[k]);
    }
  }
  o.require(worst < kRel, "gradient");
  o.detail << "worst rel err " << worst << "; ";

  embed::TrainConfig c1;
  c1.dim = 1;
  auto m = embed::init_model(3, 1, c1);
  auto set = [&](std::uint32_t e, double re, double im) {
    m.entity_row(e)[0] = re;
    m.entity_row(e)[1] = im;
  };
  set(0, 1, 0);
  set(1, -1, 0);
  set(2, 1, 0);
  m.phase[0] = 0;
  const double id = embed::distance(m, 0, 0, 2);
  m.phase[0] = std::numbers::pi;
  const double half = embed::distance(m, 0, 0, 1);
  m.phase[0] = std::numbers::pi / 2;
  const double quarter = embed::distance(m, 0, 0, 2);
  o.require(std::abs(id) <= 1e-12, "identity rotation");
  o.require(std::abs(half) <= 1e-12, "half turn");
  o.require(std::abs(quarter - std::sqrt(2.0)) <= 1e-12, "sqrt(2)");
  o.detail << "identities " << id << ", " << half << ", " << quarter - std::sqrt(2.0);
}

// --- 4 ---------------------------------------------------------------------
void planted_recovery(Outcome& o) {
  constexpr std::size_t kEntities = 40, kRelations = 2, kTrain = 300, kHeld = 30;
  const auto pg = synthetic::planted_graph(kEntities, kRelations, 2, kTrain + kHeld, 1);
  Rng rng(7);
  auto triples = pg.triples;
  rng.shuffle(triples);
  const std::vector<embed::IdTriple> train(triples.begin(), triples.begin() + kTrain);
  const std::vector<embed::IdTriple> held(triples.begin() + kTrain, triples.end());

  embed::TrainConfig c;
  c.dim = 16;
  c.gamma = 6;
  c.learning_rate = 1.0;
  c.epochs = 400;
  c.negatives = 16;
  c.adversarial_temperature = 1.0;
  c.batch_size = 32;
  c.seed = 1;
  const auto m = embed::train(train, pg.truth.entities, pg.truth.relations, c);

  // filtered against every generated triple, both corruption sides
  const embed::IdTripleSet known(pg.triples.begin(), pg.triples.end());
  std::vector<std::uint32_t> cand(kEntities);
  for (std::uint32_t k = 0; k < kEntities; ++k) cand[k] = k;
  std::size_t h1 = 0, h10 = 0, n = 0;
  for (const auto& t : held) {
    for (bool head_side : {false, true}) {
      const auto r = lpeval::rank_side(m, t, head_side, cand, &known);
      h1 += r.rank <= 1;
      h10 += r.rank <= 10;
      ++n;
    }
  }
  const double hit1 = 100.0 * static_cast<double>(h1) / static_cast<double>(n);
  const double hit10 = 100.0 * static_cast<double>(h10) / static_cast<double>(n);
  o.require(held.size() == kHeld, "held-out size");
  o.require(hit1 >= 60.0, "hit@1");
  o.require(hit10 >= 90.0, "hit@10");
  o.detail << "hit@1 " << format_fixed(hit1, 2) << "%, hit@10 " << format_fixed(hit10, 2) << "%";
}

// --- 5 ---------------------------------------------------------------------
void eval_equivalence(Outcome& o) {
  std::size_t queries = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = oracle::random_lp_fixture(seed);
    kg::TripleSet known;
    for (const auto& [t, _] : f.known) known.insert(t);
    const auto ev = lpeval::evaluate(f.model, lpeval::triples_of(f.test), f.genes, &known);
    const auto pairs = oracle::pair_set(f.known);
    const auto bf = oracle::brute_evaluate(f.model, oracle::pairs_of(f.test), f.genes, &pairs);
    o.require(f.test.size() <= 30, "fixture size");
    o.require(oracle::same_metrics(bf, ev.report), "fixture " + std::to_string(seed));
    queries += bf.n;
  }
  o.detail << "20 fixtures, " << queries << " queries";
}

// --- 6 ---------------------------------------------------------------------
void ner_competence(Outcome& o) {
  const auto names = synthetic::protein_names(50, 77);
  const auto train = synthetic::ner_sentences(200, names, 1);
  const auto test = synthetic::ner_sentences(50, names, 2);
  const auto a = ner::train_ner(train, 10, 3);
  const auto b = ner::train_ner(train, 10, 3);
  const auto rep = ner::eval_ner(a, test);
  o.require(rep.f1 >= 95.0, "F1");
  o.require(ner::serialize(a) == ner::serialize(b), "determinism");
  o.detail << "F1 " << format_fixed(rep.f1, 2);
}

// --- 7 ---------------------------------------------------------------------
void re_soundness(Outcome& o) {
  relex::FeatureConfig small;
  small.hash_bits = 10;
  const auto data = relex::featurize(synthetic::re_candidates(50, synthetic::protein_names(30, 1), 2), {}, small);
  Rng rng(13);
  std::vector<double> w(small.total_dim());
  for (double& x : w) x = rng.uniform(-0.5, 0.5);
  const double b = 0.3, l2 = 1e-2, h = 1e-6;
  const auto obj = relex::objective(w, b, data, l2);
  double worst = 0;
  std::vector<std::uint32_t> active;
  for (const auto& ex : data)
    for (auto [i, v] : ex.x) active.push_back(i);
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  for (auto i : active) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    const double fd = (relex::objective(wp, b, data, l2).loss - relex::objective(wm, b, data, l2).loss) / (2 * h);
    worst = std::max(worst, std::abs(fd - obj.grad_w[i]) / std::max({std::abs(fd), std::abs(obj.grad_w[i]), 1e-8}));
  }
  o.require(worst < 1e-5, "gradient");

  const auto sep = synthetic::re_candidates(300, synthetic::protein_names(60, 5), 6);
  const auto model = relex::train_re(sep, relex::FeatureConfig{}, relex::TrainHyper{});
  std::size_t ok = 0;
  for (const auto& lc : sep) ok += relex::classify(model, lc.candidate) == lc.label;
  const double acc = 100.0 * static_cast<double>(ok) / static_cast<double>(sep.size());
  o.require(acc >= 99.0, "train accuracy");

  const auto names = synthetic::protein_names(40, 3);
  const relex::FeatureConfig on;
  Rng rr(4);
  std::size_t invariant = 0;
  const auto cands = synthetic::re_candidates(100, names, 17);
  for (const auto& lc : cands) {
    auto r = lc.candidate;
    for (auto* m : {&r.a, &r.b}) {
      std::string fresh = names[rr.below(names.size())] + "X";
      for (std::size_t k = m->span.start; k < m->span.end; ++k) r.tokens[k] = fresh;
      m->surface = m->entity_id = fresh;
    }
    invariant += relex::vectorize(relex::candidate_features(lc.candidate, {}, on), on) ==
                 relex::vectorize(relex::candidate_features(r, {}, on), on);
  }
  o.require(invariant == cands.size(), "masking invariance");
  o.detail << "grad rel err " << worst << ", train acc " << format_fixed(acc, 2) << "%, masking " << invariant << "/"
           << cands.size();
}

// --- 8 ---------------------------------------------------------------------
kg::KnowledgeGraph random_graph(Rng& rng, std::size_t n_entities, std::size_t n_edges) {
  static const kg::Source kSources[] = {kg::Source::kDisgenet, kg::Source::kString, kg::Source::kIeV1,
                                        kg::Source::kIeV2, kg::Source::kIeV3};
  kg::KnowledgeGraph g;
  for (std::size_t k = 0; k < n_edges; ++k) {
    const auto a = "gene:G" + std::to_string(rng.below(n_entities));
    const auto b = "gene:G" + std::to_string(rng.below(n_entities));
    const auto src = kSources[rng.below(5)];
    if (rng.coin()) {
      if (a != b) g.add(kg::make_triple(a, kg::Relation::kPpi, b), src, rng.uniform());
    } else {
      g.add(kg::make_triple(a, kg::Relation::kGeneDisease, "disease:D" + std::to_string(rng.below(4))), src,
            rng.uniform());
    }
  }
  return g;
}

void kg_algebra(Outcome& o) {
  using kg::merge;
  Rng rng(500);
  std::size_t merge_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_graph(rng, 12, rng.below(40));
    const auto b = random_graph(rng, 12, rng.below(40));
    std::size_t both = 0;
    for (const auto& [t, _] : a) both += b.contains(t);
    const bool ok = merge(a, a) == a && merge(a, kg::KnowledgeGraph{}) == a &&
                    merge(a, b).size() == a.size() + b.size() - both;
    merge_bad += !ok;
  }
  o.require(merge_bad == 0, "merge algebra");

  std::size_t split_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_graph(rng, 15, 20 + rng.below(60));
    const kg::SplitSpec spec{0.7, 0.2, 0.1, rng.below(1000)};
    const auto r = kg::split(g, spec, kg::Relation::kGeneDisease);
    const auto again = kg::split(g, spec, kg::Relation::kGeneDisease);
    bool ok = r.train == again.train && r.valid == again.valid && r.test == again.test;
    ok = ok && r.train.size() + r.valid.size() + r.test.size() == g.size();
    ok = ok && merge({&r.train, &r.valid, &r.test}) == g;
    for (const auto& [t, _] : r.valid) ok = ok && !r.train.contains(t) && !r.test.contains(t);
    for (const auto& [t, _] : r.test) ok = ok && !r.train.contains(t);
    const double n = static_cast<double>(g.count(kg::Relation::kGeneDisease));
    if (r.reassigned == 0) {
      ok = ok && std::abs(static_cast<double>(r.valid.size()) - spec.valid * n) <= 1.0;
      ok = ok && std::abs(static_cast<double>(r.test.size()) - spec.test * n) <= 1.0;
    }
    split_bad += !ok;
  }
  o.require(split_bad == 0, "split properties");

  kg::KnowledgeGraph ex, ref, other;
  for (int i = 0; i < 37; ++i) {
    ex.add(kg::make_triple("gene:A" + std::to_string(i), kg::Relation::kPpi, "gene:B" + std::to_string(i)),
           kg::Source::kIeV1);
  }
  for (int i = 0; i < 9; ++i) {
    ref.add(kg::make_triple("gene:A" + std::to_string(i), kg::Relation::kPpi, "gene:B" + std::to_string(i)),
            kg::Source::kString);
  }
  for (int i = 0; i < 20; ++i) {
    ref.add(kg::make_triple("gene:C" + std::to_string(i), kg::Relation::kPpi, "gene:D" + std::to_string(i)),
            kg::Source::kString);
  }
  other.add(kg::make_triple("gene:X", kg::Relation::kPpi, "gene:Y"), kg::Source::kString);
  const double self = kg::overlap_stats(ex, ex).pct_extracted_in_reference;
  const double disjoint = kg::overlap_stats(ex, other).pct_extracted_in_reference;
  const double recon = kg::overlap_stats(ex, ref).pct_extracted_in_reference;
  o.require(self == 100.0, "overlap self");
  o.require(disjoint == 0.0, "overlap disjoint");
  o.require(std::abs(recon - 24.32) < 0.005, "overlap 9/37");
  o.detail << "500 merge pairs, 200 splits, overlap " << self << "/" << disjoint << "/" << format_fixed(recon, 2);
}

// --- 9 ---------------------------------------------------------------------
bool sh(const std::string& cmd, Outcome& o) {
  const int rc = std::system((cmd + " >>" + g_work + "/log.txt 2>&1").c_str());
  if (rc != 0) o.require(false, "command failed: " + cmd.substr(0, cmd.find(' ', g_cli.size() + 1)));
  return rc == 0;
}

void end_to_end(Outcome& o) {
  fs::remove_all(g_work);
  fs::create_directories(g_work);
  const std::string toy = g_toy + "/", w = g_work + "/", cli = g_cli + " ";
  std::size_t abstracts = 0;
  const std::string corpus = read_file(toy + "corpus.jsonl");
  for (auto line : split(corpus, '\n')) abstracts += !trim(line).empty();
  o.require(abstracts <= 50, "at most 50 abstracts");

  if (!sh(cli + "ner-train --train " + toy + "ner_train.jsonl --vectors " + toy + "vectors.txt --seed 1 --out-dir " + w,
          o))
    return;
  if (!sh(cli + "re-train --train " + toy + "re_train.jsonl --valid " + toy + "re_valid.jsonl --vectors " + toy +
              "vectors.txt --seed 1 --out-dir " + w,
          o))
    return;
  const std::pair<const char*, const char*> versions[] = {{"1", "0.9"}, {"2", "0.7"}, {"3", "0.5"}};
  for (auto [v, t] : versions) {
    if (!sh(cli + "extract --corpus " + toy + "corpus.jsonl --ner-model " + w + "ner_model.json --re-model " + w +
                "re_model.json --threshold " + t + " --source ie_v" + v + " --out ie_v" + v + ".tsv --graph-out ie_v" +
                v + "_graph.tsv --out-dir " + w,
            o))
      return;
  }
  if (!sh(cli + "--config " + toy + "experiment.toml experiment --disgenet " + toy + "disgenet.tsv --string " + toy +
              "string.tsv --ie-v1 " + w + "ie_v1.tsv --ie-v2 " + w + "ie_v2.tsv --ie-v3 " + w +
              "ie_v3.tsv --out-dir " + w + "xp",
          o))
    return;

  const auto j = nlohmann::json::parse(read_file(w + "xp/experiment.json"));
  const auto& arms = j.at("arms");
  o.require(arms.size() == 5, "five arms");
  if (arms.size() != 5) return;
  // the largest arm's training graph plus the held-out triples
  std::size_t triples = arms[0]["n_train_triples"].get<std::size_t>() + j["split"]["valid"].get<std::size_t>() +
                        j["split"]["test"].get<std::size_t>();
  o.require(triples <= 1000, "at most 1000 triples");
  std::size_t lines = 0;
  const std::string table = read_file(w + "xp/table.tsv");
  for (auto line : split(table, '\n')) lines += !line.empty();
  o.require(lines == 6, "table shape");
  const double mr_string = arms[3]["metrics"]["mr"].get<double>();
  const double mr_dg = arms[4]["metrics"]["mr"].get<double>();
  o.require(arms[3]["graph"] == "STRING + DisGeNET" && arms[4]["graph"] == "DisGeNET", "arm order");
  o.require(mr_dg > mr_string, "DisGeNET MR worse than +STRING");
  std::cout << read_file(w + "xp/table.md");
  o.detail << triples << " triples, MR DisGeNET " << format_fixed(mr_dg, 3) << " vs +STRING " << format_fixed(mr_string, 3);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: bioie_acceptance <bioie-cli> <toy-data-dir> <work-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_toy = argv[2];
  g_work = argv[3];

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric arithmetic", 1, metric_arithmetic},
      {2, "relative change", 1, relative_change},
      {3, "RotatE gradient and distance identities", 10, rotate_correctness},
      {4, "planted-model recovery", 120, planted_recovery},
      {5, "evaluation vs brute force", 5, eval_equivalence},
      {6, "NER competence and determinism", 30, ner_competence},
      {7, "RE gradient, accuracy, masking", 60, re_soundness},
      {8, "KG algebra", 60, kg_algebra},
      {9, "end-to-end toy experiment", 300, end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= c.budget_seconds) o.require(false, "over time budget " + format_fixed(c.budget_seconds, 0) + " s");
    failed += !o.pass;
    std::printf("criterion %d %s: %s (%s; %.2f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
