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


#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "bioie/ner.hpp"
#include "bioie/prf.hpp"
#include "bioie/synthetic.hpp"
#include "test_util.hpp"

namespace {

using namespace bioie;
using namespace bioie::ner;
using B = BioTag;

TEST(Bio, SpansToBioExamples) {
  EXPECT_EQ(spans_to_bio({{"A", "binds", "B"}, {{0, 1}, {2, 3}}}), (std::vector<BioTag>{B::B, B::O, B::B}));
  EXPECT_EQ(spans_to_bio({{"growth", "factor", "receptor"}, {{0, 3}}}), (std::vector<BioTag>{B::B, B::I, B::I}));
  EXPECT_TRUE(spans_to_bio({{}, {}}).empty());
}

TEST(Bio, OverlapNamesBothSpans) {
  try {
    spans_to_bio(5, {{0, 3}, {2, 4}});
    FAIL() << "overlap accepted";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(0,3)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(2,4)"), std::string::npos) << msg;
  }
  EXPECT_THROW(spans_to_bio(3, {{1, 1}}), Error);
  EXPECT_THROW(spans_to_bio(3, {{2, 4}}), Error);
}

TEST(Bio, RepairRule) {
  EXPECT_EQ(bio_to_spans({B::O, B::I, B::I}), (std::vector<TokenSpan>{{1, 3}}));
  EXPECT_EQ(bio_to_spans({B::I, B::O, B::B, B::I, B::B}), (std::vector<TokenSpan>{{0, 1}, {2, 4}, {4, 5}}));
}

TEST(Bio, RoundTripThousandRandomAnnotations) {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.below(20);
    std::vector<TokenSpan> spans;
    for (std::size_t i = 0; i < n;) {
      if (rng.below(3) == 0) {
        std::size_t len = 1 + rng.below(3);
        std::size_t e = std::min(n, i + len);
        spans.push_back({i, e});
        i = e;
      } else {
        ++i;
      }
    }
    auto tags = spans_to_bio(n, spans);
    ASSERT_EQ(tags.size(), n);
    EXPECT_TRUE(is_valid_bio(tags));
    EXPECT_EQ(bio_to_spans(tags), spans);
  }
}

TEST(Features, WordShapeAndFlags) {
  EXPECT_EQ(word_shape("ARF6"), "XXd");
  EXPECT_EQ(word_shape("TP53"), "XXdd");
  EXPECT_EQ(word_shape("binds"), "xx");
  EXPECT_EQ(word_shape("IL-2R"), "XX-dX");
  EXPECT_EQ(word_shape("Smad3"), "Xxxd");

  const std::vector<std::string> toks = {"ARAP2", "binds", "ARF6", "."};
  auto f = token_features(toks, 2, {B::O, B::O}, default_templates(), {});
  auto has = [&](const std::string& n) { return std::binary_search(f.names.begin(), f.names.end(), n); };
  EXPECT_TRUE(has("shape=XXd"));
  EXPECT_TRUE(has("all_caps=0"));
  EXPECT_TRUE(has("has_digit=1"));
  EXPECT_TRUE(has("has_hyphen=0"));
  EXPECT_TRUE(has("word=arf6"));
  EXPECT_TRUE(has("prev_word=binds"));
  EXPECT_TRUE(has("next_word=."));
  EXPECT_TRUE(has("prefix3=ARF"));
  EXPECT_TRUE(has("suffix2=F6"));
  EXPECT_TRUE(has("prev2_tags=OO"));
  EXPECT_EQ(f.ids.size(), f.names.size());
}

TEST(Features, Deterministic) {
  const std::vector<std::string> toks = {"We", "found", "TP53", "binds", "MDM2"};
  auto a = token_features(toks, 2, {B::O, B::B}, default_templates(), {});
  auto b = token_features(toks, 2, {B::O, B::B}, default_templates(), {});
  EXPECT_EQ(a.ids, b.ids);
  EXPECT_EQ(a.names, b.names);
}

TEST(Features, OovTokenHasZeroVectorBlock) {
  WordVectors wv(3);
  wv.add("binds", {0.5, -0.25, 0.0});
  const std::vector<std::string> toks = {"QQXX9", "binds"};
  auto oov = token_features(toks, 0, {B::O, B::O}, default_templates(), wv);
  EXPECT_EQ(oov.dense, (std::vector<double>{0, 0, 0}));
  for (const auto& n : oov.names) EXPECT_NE(n[0], 'v') << n;
  auto hit = token_features(toks, 1, {B::O, B::O}, default_templates(), wv);
  EXPECT_EQ(hit.dense, (std::vector<double>{0.5, -0.25, 0.0}));
  EXPECT_TRUE(std::binary_search(hit.names.begin(), hit.names.end(), "v0=+"));
  EXPECT_TRUE(std::binary_search(hit.names.begin(), hit.names.end(), "v1=-"));
}

TEST(F1, ReferenceArithmetic) {
  EXPECT_NEAR(f1(78.41, 73.87), 76.08, 0.01);
  EXPECT_NEAR(f1(43.24, 45.71), 44.44, 0.01);
  EXPECT_EQ(f1(0, 0), 0.0);
}

TEST(F1, Properties) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    double p = rng.uniform(0, 100), r = rng.uniform(0, 100);
    EXPECT_LE(f1(p, r), std::max(p, r) + 1e-12);
    EXPECT_GE(f1(p, r), std::min(p, r) - 1e-12);
    EXPECT_NEAR(f1(p, p), p, 1e-12);
  }
}

TEST(Prf, HandCounts) {
  auto r = score_spans({{{0, 1}}}, {{{0, 1}, {2, 3}}});
  EXPECT_DOUBLE_EQ(r.precision, 50.0);
  EXPECT_DOUBLE_EQ(r.recall, 100.0);
  EXPECT_NEAR(r.f1, 66.67, 0.005);
  auto perfect = score_spans({{{0, 2}}, {}}, {{{0, 2}}, {}});
  EXPECT_EQ(perfect.f1, 100.0);
  EXPECT_EQ(perfect.fp + perfect.fn, 0u);
  // a boundary off by one counts as both an fp and an fn
  auto off = score_spans({{{0, 2}}}, {{{0, 1}}});
  EXPECT_EQ(off.tp, 0u);
  EXPECT_EQ(off.fp, 1u);
  EXPECT_EQ(off.fn, 1u);
}

std::vector<std::string> gazetteer_names() { return synthetic::protein_names(50, 77); }

TEST(Train, Preconditions) {
  EXPECT_THROW(train_ner({}, 5, 1), Error);
  auto data = synthetic::ner_sentences(5, gazetteer_names(), 1);
  EXPECT_THROW(train_ner(data, 0, 1), Error);
}

TEST(Train, SyntheticGazetteerCompetence) {
  const auto names = gazetteer_names();
  auto train = synthetic::ner_sentences(200, names, 1);
  auto test = synthetic::ner_sentences(50, names, 2);
  auto model = train_ner(train, 10, 3);
  auto report = eval_ner(model, test);
  EXPECT_GE(report.f1, 95.0);
  // tag reproduces the gold spans exactly on most sentences
  std::size_t gold = 0, exact = 0;
  for (const auto& s : test) {
    std::set<TokenSpan> pred;
    for (const auto& m : tag(model, s.tokens)) pred.insert(m.span);
    for (const auto& sp : s.spans) {
      ++gold;
      exact += pred.count(sp);
    }
  }
  EXPECT_GE(100.0 * static_cast<double>(exact) / static_cast<double>(gold), 95.0);
}

TEST(Train, DeterministicUnderSeed) {
  auto data = synthetic::ner_sentences(60, gazetteer_names(), 4);
  WordVectors wv = synthetic::toy_vectors(gazetteer_names(), synthetic::template_vocabulary(), 4);
  EXPECT_EQ(serialize(train_ner(data, 3, 11, wv)), serialize(train_ner(data, 3, 11, wv)));
  EXPECT_NE(serialize(train_ner(data, 3, 11)), serialize(train_ner(data, 3, 12)));
}

TEST(Tag, AlwaysValidBio) {
  NerModel fresh;
  EXPECT_TRUE(tag(fresh, std::vector<std::string>{}).empty());
  // a model that prefers I everywhere still decodes to valid spans
  NerModel rigged;
  rigged.weights[fnv1a("bias=")] = {0.0, 1.0, 0.0};
  Rng rng(1);
  auto data = synthetic::ner_sentences(30, gazetteer_names(), 9);
  auto trained = train_ner(data, 1, 1);
  for (const NerModel* m : {&fresh, &rigged, &trained}) {
    for (int k = 0; k < 50; ++k) {
      std::vector<std::string> toks;
      for (std::size_t n = 1 + rng.below(12); n > 0; --n) toks.push_back(rng.coin() ? "ARF6" : "binds");
      EXPECT_TRUE(is_valid_bio(predict_tags(*m, toks)));
    }
  }
  auto spans = tag(rigged, std::vector<std::string>{"a", "b", "c"});
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].span, (TokenSpan{0, 3}));
}

TEST(Tag, EntityLinkingThroughSynonyms) {
  NerModel m;
  m.weights[fnv1a("bias=")] = {0.0, 0.0, 1.0};
  m.weights[fnv1a("shape=XXd")] = {3.0, 0.0, 0.0};
  SynonymMap syn{{"ARF6", "ADP-ribosylation factor 6"}};
  auto mentions = tag(m, std::vector<std::string>{"ARF6", "binds", "arf6", "and", "CDK2"}, 4, &syn);
  ASSERT_EQ(mentions.size(), 2u);
  EXPECT_EQ(mentions[0].entity_id, "ADP-ribosylation factor 6");
  EXPECT_EQ(mentions[0].sentence_index, 4u);
  EXPECT_EQ(mentions[1].entity_id, "CDK2");
}

TEST(Model, SerializeRoundTrip) {
  auto data = synthetic::ner_sentences(40, gazetteer_names(), 6);
  WordVectors wv = synthetic::toy_vectors(gazetteer_names(), synthetic::template_vocabulary(), 3);
  auto model = train_ner(data, 2, 5, wv);
  bioie::testing::TempDir dir("ner");
  save_model(model, dir.file("m.json"));
  auto back = load_model(dir.file("m.json"));
  EXPECT_EQ(serialize(back), serialize(model));
  for (const auto& s : data) EXPECT_EQ(predict_tags(back, s.tokens), predict_tags(model, s.tokens));
}

TEST(Annotations, FileRoundTripAndErrors) {
  bioie::testing::TempDir dir("ann");
  AnnotatedSentence s{{"ARAP2", "binds", "ARF6", "."}, {{0, 1}, {2, 3}}};
  write_file(dir.file("a.jsonl"), annotation_line(s) + "\n{\"tokens\":[\"x\"],\"spans\":[[0,2]]}\nbroken\n");
  auto c = load_annotations(dir.file("a.jsonl"));
  ASSERT_EQ(c.sentences.size(), 1u);
  EXPECT_EQ(c.sentences[0], s);
  ASSERT_EQ(c.errors.size(), 2u);
  EXPECT_EQ(c.errors[0].line, 2u);
  EXPECT_EQ(c.errors[1].line, 3u);
}

}  // namespace
