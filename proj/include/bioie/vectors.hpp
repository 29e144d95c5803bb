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

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bioie/common.hpp"
#include "json.hpp"

namespace bioie {

// Read-only pretrained word vectors. Lookup tries the exact token first, then
// its lowercased form.
class WordVectors {
 public:
  WordVectors() = default;
  explicit WordVectors(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  void add(const std::string& token, std::vector<double> v) {
    if (table_.empty() && dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) {
      throw Error("vector for '" + token + "' has dimension " + std::to_string(v.size()) +
                  ", expected " + std::to_string(dim_));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw Error("non-finite component in vector for '" + token + "'");
    }
    table_[token] = std::move(v);
  }

  // nullptr when out of vocabulary.
  const std::vector<double>* find(const std::string& token) const {
    if (auto it = table_.find(token); it != table_.end()) return &it->second;
    if (auto it = table_.find(to_lower(token)); it != table_.end()) return &it->second;
    return nullptr;
  }

  const std::map<std::string, std::vector<double>>& table() const { return table_; }

  bool operator==(const WordVectors&) const = default;

  // Text format: token followed by dim decimal floats, whitespace separated.
  // A leading "<count> <dim>" header line is tolerated.
  static WordVectors load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open word vectors '" + path + "'");
    WordVectors wv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ss(line);
      std::vector<std::string> fields;
      for (std::string f; ss >> f;) fields.push_back(f);
      if (fields.empty()) continue;
      if (line_no == 1 && fields.size() == 2 &&
          fields[0].find_first_not_of("0123456789") == std::string::npos &&
          fields[1].find_first_not_of("0123456789") == std::string::npos) {
        continue;
      }
      if (fields.size() < 2) {
        throw Error(path + ":" + std::to_string(line_no) + ": no vector components");
      }
      std::vector<double> v;
      v.reserve(fields.size() - 1);
      try {
        for (std::size_t i = 1; i < fields.size(); ++i) v.push_back(parse_double(fields[i]));
        wv.add(fields[0], std::move(v));
      } catch (const Error& e) {
        throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return wv;
  }

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<double>> table_;
};

inline void to_json(nlohmann::json& j, const WordVectors& wv) {
  j = nlohmann::json{{"dim", wv.dim()}, {"table", wv.table()}};
}

inline void from_json(const nlohmann::json& j, WordVectors& wv) {
  wv = WordVectors(j.at("dim").get<std::size_t>());
  for (auto& [tok, v] : j.at("table").items()) wv.add(tok, v.get<std::vector<double>>());
}

}  // namespace bioie
