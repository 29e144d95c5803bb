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

// bioie command line: one subcommand per pipeline stage plus the five-graph
// experiment. Every run writes <out-dir>/<subcommand>.manifest.json.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bioie/common.hpp"
#include "bioie/corpus.hpp"
#include "bioie/experiment.hpp"
#include "bioie/kg.hpp"
#include "bioie/lpeval.hpp"
#include "bioie/ner.hpp"
#include "bioie/pipeline.hpp"
#include "bioie/relex.hpp"
#include "bioie/rotate.hpp"
#include "bioie/tune.hpp"
#include "bioie/vectors.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bioie;

namespace {

// State of one subcommand run, serialized into its manifest.
struct Run {
  std::string subcommand;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  json inputs = json::object();
  json outputs = json::object();
  json results = json::object();
  std::vector<std::string> stage_errors;

  void input(const std::string& path) { inputs[path] = file_digest(path); }

  std::string out(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  void write(const std::string& path, std::string_view content) {
    write_file(path, content);
    outputs[path] = file_digest(path);
  }

  void record_errors(const std::string& path, const std::vector<RecordError>& errors) {
    for (const auto& e : errors) stage_errors.push_back(path + ":" + std::to_string(e.line) + ": " + e.message);
  }
};

using Handler = std::function<void(Run&)>;

// Value and origin of every option of a subcommand. CLI11 merges config
// file values into the results, so "cli" is decided from argv directly.
json resolved_config(const CLI::App* sub, const std::vector<std::string>& argv) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    std::string source = "default";
    if (opt->count() > 0) {
      source = "config";
      for (const auto& a : argv) {
        if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0) source = "cli";
      }
    }
    json value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_expected_max() > 1) value = res;
      else if (opt->get_type_size() == 0) value = opt->as<bool>();
      else value = res.empty() ? std::string() : res.back();
    } else if (opt->get_type_size() == 0) {
      value = false;
    } else {
      value = opt->get_default_str();
    }
    cfg[name] = {{"value", value}, {"source", source}};
  }
  return cfg;
}

void add_train_flags(CLI::App* sub, embed::TrainConfig& c) {
  sub->add_option("--dim", c.dim, "embedding dimension d")->check(CLI::PositiveNumber);
  sub->add_option("--gamma", c.gamma, "margin")->check(CLI::PositiveNumber);
  sub->add_option("--lr", c.learning_rate, "SGD learning rate")->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", c.batch_size, "positives per batch")->check(CLI::PositiveNumber);
  sub->add_option("--negatives", c.negatives, "negatives per positive")->check(CLI::PositiveNumber);
  sub->add_option("--alpha", c.adversarial_temperature, "self-adversarial temperature")->check(CLI::NonNegativeNumber);
  sub->add_option("--epochs", c.epochs, "training epochs")->check(CLI::PositiveNumber);
}

std::vector<relex::LabeledCandidate> load_candidates(Run& run, const std::string& path) {
  run.input(path);
  auto c = relex::load_candidates(path);
  run.record_errors(path, c.errors);
  if (c.candidates.empty()) throw Error("no usable candidates in '" + path + "'");
  return c.candidates;
}

std::vector<ner::AnnotatedSentence> load_annotations(Run& run, const std::string& path) {
  run.input(path);
  auto a = ner::load_annotations(path);
  run.record_errors(path, a.errors);
  if (a.sentences.empty()) throw Error("no usable sentences in '" + path + "'");
  return a.sentences;
}

kg::KnowledgeGraph load_graph(Run& run, const std::string& path) {
  run.input(path);
  return kg::load_graph(path);
}

kg::KnowledgeGraph load_source(Run& run, const std::string& path, kg::Schema schema, kg::LoadOptions opt = {}) {
  run.input(path);
  auto r = kg::load_edges(path, schema, opt);
  run.record_errors(path, r.errors);
  return r.graph;
}

struct MentionSource {
  std::string mode = "gold";
  std::string ner_model;
  std::string synonyms;
};

void add_mention_flags(CLI::App* sub, MentionSource& m) {
  sub->add_option("--mentions", m.mode, "candidate mentions: gold annotations or NER output")
      ->check(CLI::IsMember({"gold", "model"}));
  sub->add_option("--ner-model", m.ner_model, "NER model (required with --mentions model)");
  sub->add_option("--synonyms", m.synonyms, "alias<TAB>canonical entity map");
}

std::vector<relex::LabeledCandidate> apply_mentions(Run& run, const MentionSource& m,
                                                    std::vector<relex::LabeledCandidate> data) {
  if (m.mode == "gold") return data;
  if (m.ner_model.empty()) throw Error("--mentions model needs --ner-model");
  run.input(m.ner_model);
  const auto model = ner::load_model(m.ner_model);
  ner::SynonymMap syn;
  if (!m.synonyms.empty()) {
    run.input(m.synonyms);
    syn = ner::load_synonyms(m.synonyms);
  }
  return pipeline::with_model_mentions(data, model, m.synonyms.empty() ? nullptr : &syn);
}

std::size_t count_positive(const std::vector<relex::LabeledCandidate>& d) {
  std::size_t n = 0;
  for (const auto& x : d) n += x.label ? 1 : 0;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bioie: protein interaction extraction and knowledge graph link prediction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.option_defaults()->always_capture_default();

  Run run;
  std::map<std::string, Handler> handlers;
  std::vector<CLI::App*> subs;

  auto command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("--seed", run.seed, "random seed");
    sub->add_option("--out-dir", run.out_dir, "directory for outputs and the run manifest");
    subs.push_back(sub);
    return sub;
  };

  // --- ner-train ---------------------------------------------------------
  struct {
    std::string train, vectors, test, model_out = "ner_model.json";
    int epochs = 10;
    std::vector<std::string> templates = ner::default_templates();
  } nt;
  {
    auto* s = command("ner-train", "train the averaged-perceptron protein tagger");
    s->add_option("--train", nt.train, "annotated sentences (JSONL)")->required();
    s->add_option("--vectors", nt.vectors, "word vectors (text format)");
    s->add_option("--epochs", nt.epochs, "training epochs")->check(CLI::PositiveNumber);
    s->add_option("--templates", nt.templates, "feature templates")->delimiter(',');
    s->add_option("--test", nt.test, "optional held-out annotations to score after training");
    s->add_option("--model-out", nt.model_out, "model file name inside --out-dir");
    handlers["ner-train"] = [&](Run& r) {
      auto train = load_annotations(r, nt.train);
      WordVectors wv;
      if (!nt.vectors.empty()) {
        r.input(nt.vectors);
        wv = WordVectors::load(nt.vectors);
      }
      auto model = ner::train_ner(train, nt.epochs, r.seed, wv, nt.templates);
      r.write(r.out(nt.model_out), ner::serialize(model));
      r.results["n_train_sentences"] = train.size();
      r.results["train"] = ner::eval_ner(model, train);
      if (!nt.test.empty()) r.results["test"] = ner::eval_ner(model, load_annotations(r, nt.test));
    };
  }

  // --- ner-eval ----------------------------------------------------------
  struct {
    std::string model, test;
  } ne;
  {
    auto* s = command("ner-eval", "exact-span P/R/F1 of a tagger");
    s->add_option("--model", ne.model, "NER model")->required();
    s->add_option("--test", ne.test, "annotated sentences (JSONL)")->required();
    handlers["ner-eval"] = [&](Run& r) {
      r.input(ne.model);
      auto model = ner::load_model(ne.model);
      json rep = ner::eval_ner(model, load_annotations(r, ne.test));
      r.write(r.out("ner_eval.json"), rep.dump(2) + "\n");
      r.results = rep;
    };
  }

  // --- ner-tag -----------------------------------------------------------
  struct {
    std::string model, corpus, format = "jsonl", synonyms, out = "mentions.jsonl";
  } ng;
  {
    auto* s = command("ner-tag", "tag protein mentions in a corpus");
    s->add_option("--model", ng.model, "NER model")->required();
    s->add_option("--corpus", ng.corpus, "corpus file")->required();
    s->add_option("--format", ng.format, "corpus format")->check(CLI::IsMember({"jsonl", "tsv"}));
    s->add_option("--synonyms", ng.synonyms, "alias<TAB>canonical entity map");
    s->add_option("--out", ng.out, "output file name inside --out-dir");
    handlers["ner-tag"] = [&](Run& r) {
      r.input(ng.model);
      auto model = ner::load_model(ng.model);
      ner::SynonymMap syn;
      if (!ng.synonyms.empty()) {
        r.input(ng.synonyms);
        syn = ner::load_synonyms(ng.synonyms);
      }
      r.input(ng.corpus);
      corpus::CorpusReader reader(ng.corpus, corpus::parse_format(ng.format));
      std::string out;
      std::size_t n_docs = 0, n_mentions = 0;
      while (auto a = reader.next()) {
        ++n_docs;
        const std::string text = a->text();
        for (const auto& s : corpus::sentence_split(*a)) {
          auto tokens = corpus::token_texts(corpus::tokenize(s.slice(text)));
          for (const auto& m : ner::tag(model, tokens, s.index, ng.synonyms.empty() ? nullptr : &syn)) {
            ++n_mentions;
            out += json{{"doc_id", a->doc_id}, {"sentence_index", m.sentence_index},
                        {"span", {m.span.start, m.span.end}}, {"surface", m.surface},
                        {"entity_id", m.entity_id}}.dump() + "\n";
          }
        }
      }
      r.record_errors(ng.corpus, reader.errors());
      r.write(r.out(ng.out), out);
      r.results = {{"documents", n_docs}, {"mentions", n_mentions}};
    };
  }

  // --- re-train ----------------------------------------------------------
  struct {
    std::string train, valid, vectors, model_out = "re_model.json";
    bool no_masking = false;
    relex::TrainHyper hyper;
    relex::FeatureConfig features;
    MentionSource mentions;
  } rt;
  {
    auto* s = command("re-train", "train the logistic-regression relation classifier");
    s->add_option("--train", rt.train, "labeled candidates (JSONL)")->required();
    s->add_option("--valid", rt.valid, "labeled candidates for threshold tuning");
    s->add_option("--vectors", rt.vectors, "word vectors (text format)");
    s->add_flag("--no-masking", rt.no_masking, "keep entity surface forms");
    s->add_option("--hash-bits", rt.features.hash_bits, "log2 of the hashed feature space")->check(CLI::Range(8, 24));
    s->add_option("--window", rt.features.window, "context window around each mention")->check(CLI::NonNegativeNumber);
    s->add_option("--l2", rt.hyper.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
    s->add_option("--epochs", rt.hyper.epochs, "epochs")->check(CLI::PositiveNumber);
    s->add_option("--lr", rt.hyper.lr, "learning rate")->check(CLI::PositiveNumber);
    s->add_option("--batch-size", rt.hyper.batch_size, "mini-batch size, 0 for full batch");
    s->add_option("--model-out", rt.model_out, "model file name inside --out-dir");
    add_mention_flags(s, rt.mentions);
    handlers["re-train"] = [&](Run& r) {
      auto train = apply_mentions(r, rt.mentions, load_candidates(r, rt.train));
      WordVectors wv;
      if (!rt.vectors.empty()) {
        r.input(rt.vectors);
        wv = WordVectors::load(rt.vectors);
      }
      relex::FeatureConfig cfg = rt.features;
      cfg.masking = !rt.no_masking;
      cfg.vector_dim = wv.dim();
      relex::TrainHyper hyper = rt.hyper;
      hyper.seed = r.seed;
      std::vector<double> losses;
      auto model = relex::train_re(train, cfg, hyper, wv, &losses);
      if (!rt.valid.empty()) {
        auto valid = apply_mentions(r, rt.mentions, load_candidates(r, rt.valid));
        relex::tune_threshold(model, valid);
        r.results["valid"] = relex::eval_re(model, valid);
      }
      r.write(r.out(rt.model_out), relex::serialize(model));
      r.results["n_train"] = train.size();
      r.results["n_train_positive"] = count_positive(train);
      r.results["threshold"] = model.threshold;
      r.results["train"] = relex::eval_re(model, train);
      r.results["final_loss"] = losses.back();
    };
  }

  // --- re-eval -----------------------------------------------------------
  struct {
    std::string model, test;
    double threshold = 0;
    MentionSource mentions;
  } re;
  {
    auto* s = command("re-eval", "P/R/F1 of a relation classifier");
    s->add_option("--model", re.model, "RE model")->required();
    s->add_option("--test", re.test, "labeled candidates (JSONL)")->required();
    s->add_option("--threshold", re.threshold, "override the model threshold (0 keeps it)")
        ->check(CLI::Range(0.0, 1.0));
    add_mention_flags(s, re.mentions);
    handlers["re-eval"] = [&](Run& r) {
      r.input(re.model);
      auto model = relex::load_model(re.model);
      if (re.threshold > 0) model.threshold = re.threshold;
      auto test = apply_mentions(r, re.mentions, load_candidates(r, re.test));
      json rep = relex::eval_re(model, test);
      rep["threshold"] = model.threshold;
      r.write(r.out("re_eval.json"), rep.dump(2) + "\n");
      r.results = rep;
    };
  }

  // --- extract -----------------------------------------------------------
  struct {
    std::string corpus, format = "jsonl", ner_model, re_model, synonyms, gazetteer, source = "ie_v1";
    std::string out = "extracted.tsv", graph_out = "extracted_graph.tsv";
    double threshold = 0.5;
    bool no_species_filter = false;
  } ex;
  {
    auto* s = command("extract", "run NER + RE over a corpus and emit PPI edges");
    s->add_option("--corpus", ex.corpus, "corpus file")->required();
    s->add_option("--format", ex.format, "corpus format")->check(CLI::IsMember({"jsonl", "tsv"}));
    s->add_option("--ner-model", ex.ner_model, "NER model")->required();
    s->add_option("--re-model", ex.re_model, "RE model")->required();
    s->add_option("--threshold", ex.threshold, "keep candidates with probability >= threshold");
    s->add_option("--source", ex.source, "provenance tag")->check(CLI::IsMember({"ie_v1", "ie_v2", "ie_v3"}));
    s->add_option("--synonyms", ex.synonyms, "alias<TAB>canonical entity map");
    s->add_option("--gazetteer", ex.gazetteer, "species terms, one per line");
    s->add_flag("--no-species-filter", ex.no_species_filter, "keep every document");
    s->add_option("--out", ex.out, "extraction TSV name inside --out-dir");
    s->add_option("--graph-out", ex.graph_out, "graph TSV name inside --out-dir");
    handlers["extract"] = [&](Run& r) {
      pipeline::check_threshold(ex.threshold);
      r.input(ex.ner_model);
      r.input(ex.re_model);
      auto ner_model = ner::load_model(ex.ner_model);
      auto re_model = relex::load_model(ex.re_model);
      pipeline::ExtractOptions opt;
      opt.threshold = ex.threshold;
      opt.species_filter = !ex.no_species_filter;
      opt.source = kg::parse_source(ex.source);
      if (!ex.gazetteer.empty()) {
        r.input(ex.gazetteer);
        opt.gazetteer = corpus::load_gazetteer(ex.gazetteer);
      }
      ner::SynonymMap syn;
      if (!ex.synonyms.empty()) {
        r.input(ex.synonyms);
        syn = ner::load_synonyms(ex.synonyms);
        opt.synonyms = &syn;
      }
      r.input(ex.corpus);
      auto res = pipeline::extract_ppi(ex.corpus, corpus::parse_format(ex.format), ner_model, re_model, opt);
      r.record_errors(ex.corpus, res.corpus_errors);
      r.write(r.out(ex.out), pipeline::extraction_tsv(res.rows));
      r.write(r.out(ex.graph_out), kg::to_tsv(res.graph));
      r.results = {{"documents", res.n_documents}, {"documents_kept", res.n_documents_kept},
                   {"sentences", res.n_sentences}, {"candidates", res.n_candidates},
                   {"rows", res.rows.size()}, {"triples", res.graph.size()}};
    };
  }

  // --- kg-load -----------------------------------------------------------
  struct {
    std::string input, schema, aliases, source, out = "graph.tsv";
    double min_score = 0;
    bool has_min = false;
  } kl;
  {
    auto* s = command("kg-load", "load a STRING / DisGeNET / extraction TSV into a graph");
    s->add_option("--input", kl.input, "edge file")->required();
    s->add_option("--schema", kl.schema, "string_ppi, disgenet_gd or ie_tsv")->required();
    auto* ms = s->add_option("--min-score", kl.min_score, "drop rows below this score (source units)");
    s->add_option("--aliases", kl.aliases, "alias<TAB>canonical id map");
    s->add_option("--source", kl.source, "provenance override");
    s->add_option("--out", kl.out, "graph TSV name inside --out-dir");
    handlers["kg-load"] = [&, ms](Run& r) {
      kg::LoadOptions opt;
      if (ms->count() > 0) opt.min_score = kl.min_score;
      kg::AliasMap aliases;
      if (!kl.aliases.empty()) {
        r.input(kl.aliases);
        aliases = kg::load_aliases(kl.aliases);
        opt.aliases = &aliases;
      }
      if (!kl.source.empty()) opt.source = kg::parse_source(kl.source);
      const auto schema = kg::parse_schema(kl.schema);
      r.input(kl.input);
      auto res = kg::load_edges(kl.input, schema, opt);
      r.record_errors(kl.input, res.errors);
      r.write(r.out(kl.out), kg::to_tsv(res.graph));
      r.results = {{"rows", res.rows}, {"below_threshold", res.below_threshold}, {"triples", res.graph.size()},
                   {"errors", res.errors.size()}};
    };
  }

  // --- kg-merge ----------------------------------------------------------
  struct {
    std::vector<std::string> inputs;
    std::string out = "merged.tsv";
  } km;
  {
    auto* s = command("kg-merge", "union of graphs with provenance and max confidence");
    s->add_option("--inputs", km.inputs, "graph TSV files")->required();
    s->add_option("--out", km.out, "graph TSV name inside --out-dir");
    handlers["kg-merge"] = [&](Run& r) {
      std::vector<kg::KnowledgeGraph> gs;
      for (const auto& p : km.inputs) gs.push_back(load_graph(r, p));
      std::vector<const kg::KnowledgeGraph*> ptrs;
      for (const auto& g : gs) ptrs.push_back(&g);
      auto merged = kg::merge(ptrs);
      r.write(r.out(km.out), kg::to_tsv(merged));
      r.results = {{"triples", merged.size()}};
    };
  }

  // --- kg-split ----------------------------------------------------------
  struct {
    std::string input, ratios = "0.8,0.1,0.1", relation = "gene_disease";
  } ks;
  {
    auto* s = command("kg-split", "seeded train/valid/test split of one relation");
    s->add_option("--input", ks.input, "graph TSV")->required();
    s->add_option("--ratios", ks.ratios, "train,valid,test");
    s->add_option("--relation", ks.relation, "relation to split")->check(CLI::IsMember({"ppi", "gene_disease"}));
    handlers["kg-split"] = [&](Run& r) {
      auto g = load_graph(r, ks.input);
      auto res = kg::split(g, kg::parse_ratios(ks.ratios, r.seed), kg::parse_relation(ks.relation));
      r.write(r.out("train.tsv"), kg::to_tsv(res.train));
      r.write(r.out("valid.tsv"), kg::to_tsv(res.valid));
      r.write(r.out("test.tsv"), kg::to_tsv(res.test));
      r.results = {{"train", res.train.size()}, {"valid", res.valid.size()}, {"test", res.test.size()},
                   {"reassigned", res.reassigned}};
    };
  }

  // --- kg-overlap --------------------------------------------------------
  struct {
    std::string extracted, reference;
  } ko;
  {
    auto* s = command("kg-overlap", "share of extracted PPIs found in a reference graph");
    s->add_option("--extracted", ko.extracted, "graph TSV")->required();
    s->add_option("--reference", ko.reference, "graph TSV")->required();
    handlers["kg-overlap"] = [&](Run& r) {
      json rep = kg::overlap_stats(load_graph(r, ko.extracted), load_graph(r, ko.reference));
      r.write(r.out("overlap.json"), rep.dump(2) + "\n");
      r.results = rep;
    };
  }

  // --- embed-train -------------------------------------------------------
  embed::TrainConfig et_cfg;
  struct {
    std::string train, model_out = "model.bin";
  } et;
  {
    auto* s = command("embed-train", "train RotatE embeddings on a graph");
    s->add_option("--train", et.train, "graph TSV")->required();
    s->add_option("--model-out", et.model_out, "checkpoint name inside --out-dir");
    add_train_flags(s, et_cfg);
    handlers["embed-train"] = [&](Run& r) {
      auto g = load_graph(r, et.train);
      embed::TrainConfig cfg = et_cfg;
      cfg.seed = r.seed;
      std::vector<embed::EpochLog> log;
      auto model = embed::train(g, cfg, &log);
      const std::string path = r.out(et.model_out);
      embed::save_checkpoint(model, path);
      r.outputs[path] = file_digest(path);
      r.outputs[path + ".json"] = file_digest(path + ".json");
      std::string lines;
      for (const auto& e : log) lines += json{{"epoch", e.epoch}, {"mean_loss", e.mean_loss}}.dump() + "\n";
      r.write(r.out("train_log.jsonl"), lines);
      r.results = {{"entities", model.n_entities()}, {"triples", g.size()}, {"final_loss", log.back().mean_loss}};
    };
  }

  // --- tune --------------------------------------------------------------
  embed::TrainConfig tu_cfg;
  struct {
    std::string train, valid, space;
    std::size_t n_trials = 10;
  } tu;
  {
    auto* s = command("tune", "random search over RotatE hyperparameters");
    s->add_option("--train", tu.train, "graph TSV")->required();
    s->add_option("--valid", tu.valid, "graph TSV of validation triples")->required();
    s->add_option("--n-trials", tu.n_trials, "number of sampled configs")->check(CLI::PositiveNumber);
    s->add_option("--space", tu.space, "search space JSON (defaults otherwise)");
    add_train_flags(s, tu_cfg);
    handlers["tune"] = [&](Run& r) {
      auto train = load_graph(r, tu.train);
      auto valid = load_graph(r, tu.valid);
      embed::SearchSpace space;
      if (!tu.space.empty()) {
        r.input(tu.space);
        space = json::parse(read_file(tu.space)).get<embed::SearchSpace>();
      }
      embed::TrainConfig base = tu_cfg;
      base.seed = r.seed;
      const auto genes = lpeval::genes_of(train);
      const auto known = experiment::triple_set(kg::merge(train, valid));
      const auto vt = lpeval::triples_of(valid);
      auto train_fn = [&](const embed::TrainConfig& c) { return embed::train(train, c); };
      auto validate = [&](const embed::EmbeddingModel& m) {
        auto rep = lpeval::evaluate(m, vt, genes, &known).report;
        return embed::TrialMetrics{rep.hit30, rep.mr, rep};
      };
      auto res = embed::tune(train_fn, validate, space, base, tu.n_trials, r.seed);
      r.write(r.out("trials.jsonl"), embed::trial_log_jsonl(res));
      r.write(r.out("best_config.json"), json(res.best).dump(2) + "\n");
      r.results = {{"best_trial", res.best_index}, {"best", res.best},
                   {"space", space}, {"best_validation", res.trials[res.best_index].metrics.detail}};
    };
  }

  // --- lp-eval -----------------------------------------------------------
  struct {
    std::string model, test;
    std::vector<std::string> known;
    bool raw = false;
  } le;
  {
    auto* s = command("lp-eval", "rank genes per disease and report MR/MP/hit@k");
    s->add_option("--model", le.model, "RotatE checkpoint")->required();
    s->add_option("--test", le.test, "graph TSV of test triples")->required();
    s->add_option("--known", le.known, "graph TSVs of known triples used for filtering");
    s->add_flag("--raw", le.raw, "unfiltered ranking");
    handlers["lp-eval"] = [&](Run& r) {
      r.input(le.model);
      auto model = embed::load_checkpoint(le.model);
      auto test = load_graph(r, le.test);
      kg::KnowledgeGraph known = test;
      for (const auto& p : le.known) known = kg::merge(known, load_graph(r, p));
      std::vector<std::string> genes;
      for (const auto& n : model.entities.names()) {
        if (n.rfind(kg::kGenePrefix, 0) == 0) genes.push_back(n);
      }
      const auto ks_ = experiment::triple_set(known);
      auto ev = lpeval::evaluate(model, lpeval::triples_of(test), genes, le.raw ? nullptr : &ks_);
      json rep = ev.report;
      r.write(r.out("eval.json"), rep.dump(2) + "\n");
      r.write(r.out("ranks.tsv"), lpeval::ranks_tsv(ev.queries));
      r.results = rep;
      r.results["filtered"] = !le.raw;
    };
  }

  // --- experiment --------------------------------------------------------
  embed::TrainConfig xp_cfg;
  struct {
    std::string disgenet, string, ie_v1, ie_v2, ie_v3, ratios = "0.8,0.1,0.1", space;
    double string_min = 0;
    std::size_t tune_trials = 0;
  } xp;
  {
    auto* s = command("experiment", "five-graph link prediction comparison on one shared split");
    s->add_option("--disgenet", xp.disgenet, "gene-disease TSV (disgenet_gd schema)")->required();
    s->add_option("--string", xp.string, "PPI TSV (string_ppi schema)")->required();
    s->add_option("--ie-v1", xp.ie_v1, "extraction TSV of pipeline v1")->required();
    s->add_option("--ie-v2", xp.ie_v2, "extraction TSV of pipeline v2")->required();
    s->add_option("--ie-v3", xp.ie_v3, "extraction TSV of pipeline v3")->required();
    auto* sm = s->add_option("--string-min-score", xp.string_min, "minimum STRING combined score");
    s->add_option("--ratios", xp.ratios, "train,valid,test for the DisGeNET split");
    s->add_option("--tune-trials", xp.tune_trials, "random-search trials per arm (0 = no tuning)");
    s->add_option("--space", xp.space, "search space JSON");
    add_train_flags(s, xp_cfg);
    handlers["experiment"] = [&, sm](Run& r) {
      experiment::Inputs in;
      in.disgenet = load_source(r, xp.disgenet, kg::Schema::kDisgenetGd);
      kg::LoadOptions so;
      if (sm->count() > 0) so.min_score = xp.string_min;
      in.string = load_source(r, xp.string, kg::Schema::kStringPpi, so);
      const std::array<std::string, 3> ie_paths = {xp.ie_v1, xp.ie_v2, xp.ie_v3};
      for (std::size_t k = 0; k < 3; ++k) {
        kg::LoadOptions o;
        o.source = static_cast<kg::Source>(static_cast<int>(kg::Source::kIeV1) + static_cast<int>(k));
        in.ie[k] = load_source(r, ie_paths[k], kg::Schema::kIeTsv, o);
      }
      experiment::Options opt;
      opt.split = kg::parse_ratios(xp.ratios, r.seed);
      opt.train = xp_cfg;
      opt.train.seed = r.seed;
      opt.tune_trials = xp.tune_trials;
      if (!xp.space.empty()) {
        r.input(xp.space);
        opt.space = json::parse(read_file(xp.space)).get<embed::SearchSpace>();
      }

      // The split goes to disk first and every arm is evaluated on what is
      // read back, so the recorded digests are the sets actually used.
      auto split = experiment::split_disgenet(in, opt);
      fs::create_directories(fs::path(r.out_dir) / "split");
      for (auto [name, g] : {std::pair{"train", &split.train}, {"valid", &split.valid}, {"test", &split.test}}) {
        r.write(r.out(std::string("split/") + name + ".tsv"), kg::to_tsv(*g));
      }
      kg::SplitResult shared{kg::load_graph(r.out("split/train.tsv")), kg::load_graph(r.out("split/valid.tsv")),
                             kg::load_graph(r.out("split/test.tsv")), split.reassigned};
      const std::string valid_digest = file_digest(r.out("split/valid.tsv"));
      const std::string test_digest = file_digest(r.out("split/test.tsv"));

      auto res = experiment::run_on_split(in, std::move(shared), opt);
      json j = experiment::to_json(res);
      j["split"]["valid_file_digest"] = valid_digest;
      j["split"]["test_file_digest"] = test_digest;
      fs::create_directories(fs::path(r.out_dir) / "arms");
      for (std::size_t k = 0; k < res.arms.size(); ++k) {
        const std::string stem = "arms/" + std::to_string(k) + "_ranks.tsv";
        r.write(r.out(stem), lpeval::ranks_tsv(res.arms[k].eval.queries));
      }
      r.write(r.out("table.tsv"), experiment::table_tsv(res));
      r.write(r.out("table.md"), experiment::table_markdown(res));
      r.write(r.out("experiment.json"), j.dump(2) + "\n");
      r.results = j;
      std::cout << experiment::table_markdown(res);
    };
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs) {
    if (s->parsed()) sub = s;
  }
  run.subcommand = sub->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  std::string status = "ok", failure;
  try {
    fs::create_directories(run.out_dir);
    handlers.at(run.subcommand)(run);
    if (!run.stage_errors.empty()) status = "completed_with_errors";
  } catch (const std::exception& e) {
    status = "failed";
    failure = e.what();
    std::cerr << "bioie " << run.subcommand << ": " << failure << "\n";
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest = {{"subcommand", run.subcommand},
                   {"version", std::string(kVersion)},
                   {"seed", run.seed},
                   {"config_file", app.get_config_ptr()->count() ? app.get_config_ptr()->as<std::string>() : ""},
                   {"config", resolved_config(sub, args)},
                   {"inputs", run.inputs},
                   {"outputs", run.outputs},
                   {"results", run.results},
                   {"stage_errors", run.stage_errors},
                   {"status", status},
                   {"wall_seconds", wall}};
  if (!failure.empty()) manifest["failure"] = failure;
  for (const auto& e : run.stage_errors) std::cerr << "bioie " << run.subcommand << ": " << e << "\n";
  try {
    fs::create_directories(run.out_dir);
    write_file(run.out(run.subcommand + ".manifest.json"), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "bioie: cannot write manifest: " << e.what() << "\n";
    return 3;
  }
  if (status == "failed") return 1;
  return status == "ok" ? 0 : 2;
}
