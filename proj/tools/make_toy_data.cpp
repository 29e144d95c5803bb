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

// Writes the bundled toy data set (data/toy). Output is a pure function of
// the flags, so regenerating with the defaults reproduces the checked-in
// files byte for byte.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bioie/common.hpp"
#include "bioie/corpus.hpp"
#include "bioie/ner.hpp"
#include "bioie/relex.hpp"
#include "bioie/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bioie;

int main(int argc, char** argv) {
  CLI::App app{"generate the bioie toy data set"};
  std::string out_dir = "data/toy";
  std::uint64_t seed = 2026;
  std::size_t modules = 10, genes_per_module = 10, string_per_module = 10, abstracts = 44,
              string_noise = 40;
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--modules", modules, "disease modules");
  app.add_option("--genes-per-module", genes_per_module, "genes per module");
  app.add_option("--string-per-module", string_per_module, "STRING edges kept inside each module");
  app.add_option("--string-noise", string_noise, "cross-module STRING edges");
  app.add_option("--abstracts", abstracts, "human/mouse abstracts (plus 4 off-species ones)");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    auto path = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };
    const auto fx = synthetic::module_fixture(modules, genes_per_module, string_per_module, abstracts, seed,
                                               string_noise);

    std::string dg = "gene_id\tdisease_id\tscore\n";
    for (const auto& r : fx.disgenet) dg += r[0] + "\t" + r[1] + "\t" + r[2] + "\n";
    write_file(path("disgenet.tsv"), dg);

    std::string st = "protein_a\tprotein_b\tcombined_score\n";
    for (const auto& r : fx.string_ppi) st += r[0] + "\t" + r[1] + "\t" + r[2] + "\n";
    write_file(path("string.tsv"), st);

    // A few yeast/plant abstracts that the species filter must drop.
    std::vector<corpus::Abstract> docs = fx.abstracts;
    Rng rng(seed + 7);
    for (int k = 0; k < 4; ++k) {
      const auto& a = fx.genes[rng.below(fx.genes.size())];
      const auto& b = fx.genes[rng.below(fx.genes.size())];
      docs.push_back({"PMID9" + std::to_string(10000 + k), "Interaction screen in budding yeast",
                      a + " binds " + b + " in a yeast two-hybrid screen. Arabidopsis homologs were not tested."});
    }
    std::string corpus;
    for (const auto& d : docs) {
      corpus += nlohmann::json{{"doc_id", d.doc_id}, {"title", d.title}, {"body", d.body}}.dump() + "\n";
    }
    write_file(path("corpus.jsonl"), corpus);

    // NER and RE training data use the fixture genes plus unrelated names so
    // the tagger has to rely on more than memorized surface forms.
    std::vector<std::string> names = fx.genes;
    for (auto& n : synthetic::protein_names(60, seed + 11)) {
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    }
    std::string ner_train, ner_test;
    for (const auto& s : synthetic::ner_sentences(200, names, seed + 1)) ner_train += ner::annotation_line(s) + "\n";
    for (const auto& s : synthetic::ner_sentences(50, names, seed + 2)) ner_test += ner::annotation_line(s) + "\n";
    write_file(path("ner_train.jsonl"), ner_train);
    write_file(path("ner_test.jsonl"), ner_test);

    std::string re_train, re_valid;
    for (const auto& c : synthetic::re_candidates(300, names, seed + 3, 0.25)) re_train += relex::candidate_line(c) + "\n";
    for (const auto& c : synthetic::re_candidates(100, names, seed + 4, 0.25)) re_valid += relex::candidate_line(c) + "\n";
    write_file(path("re_train.jsonl"), re_train);
    write_file(path("re_valid.jsonl"), re_valid);

    const auto wv = synthetic::toy_vectors(names, synthetic::template_vocabulary(), 8);
    std::string vec;
    for (const auto& [tok, v] : wv.table()) {
      vec += tok;
      for (double x : v) vec += " " + format_fixed(x, 6);
      vec += "\n";
    }
    write_file(path("vectors.txt"), vec);

    std::cout << "wrote " << out_dir << ": " << fx.disgenet.size() << " gene-disease rows, " << fx.string_ppi.size()
              << " STRING rows, " << docs.size() << " abstracts\n";
  } catch (const std::exception& e) {
    std::cerr << "make_toy_data: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
