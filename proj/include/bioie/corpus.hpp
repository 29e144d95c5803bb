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

// Abstract ingestion, rule-based sentence splitting and tokenization, and
// keyword species filtering.

#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bioie/common.hpp"
#include "json.hpp"

namespace bioie::corpus {

struct Abstract {
  std::string doc_id;
  std::string title;
  std::string body;

  // The text that sentence offsets index into.
  std::string text() const { return title + "\n" + body; }

  bool operator==(const Abstract&) const = default;
};

// [start, end) byte offsets into Abstract::text().
struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::string_view slice(std::string_view text) const {
    return text.substr(start, end - start);
  }
};

// [start, end) byte offsets within the sentence text.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  bool is_alpha = false;
  bool is_digit = false;
  bool is_punct = false;
};

enum class Format { kJsonl, kTsv };

inline Format parse_format(std::string_view name) {
  if (name == "jsonl") return Format::kJsonl;
  if (name == "tsv") return Format::kTsv;
  throw Error("unknown corpus format '" + std::string(name) + "' (expected jsonl or tsv)");
}

namespace detail {

inline std::string unescape_tsv(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\' && i + 1 < field.size()) {
      char next = field[i + 1];
      if (next == 't') { out += '\t'; ++i; continue; }
      if (next == 'n') { out += '\n'; ++i; continue; }
      if (next == '\\') { out += '\\'; ++i; continue; }
    }
    out += field[i];
  }
  return out;
}

}  // namespace detail

inline std::string escape_tsv(std::string_view field) {
  std::string out;
  for (char c : field) {
    if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else if (c == '\\') out += "\\\\";
    else out += c;
  }
  return out;
}

// Streams abstracts from a corpus file in file order. Malformed records are
// recorded in errors() with their line number and skipped.
class CorpusReader {
 public:
  CorpusReader(const std::string& path, Format format) : path_(path), format_(format), in_(path) {
    if (!in_) throw Error("cannot open corpus '" + path + "'");
  }

  std::optional<Abstract> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      std::optional<Abstract> rec = format_ == Format::kJsonl ? parse_jsonl(line) : parse_tsv(line);
      if (!rec) continue;
      if (!seen_.insert(rec->doc_id).second) {
        errors_.push_back({line_no_, "duplicate doc_id '" + rec->doc_id + "'"});
        continue;
      }
      return rec;
    }
    if (in_.bad()) throw Error("read error in corpus '" + path_ + "'");
    return std::nullopt;
  }

  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  std::optional<Abstract> parse_jsonl(const std::string& line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      errors_.push_back({line_no_, std::string("invalid JSON: ") + e.what()});
      return std::nullopt;
    }
    if (!j.is_object()) {
      errors_.push_back({line_no_, "record is not a JSON object"});
      return std::nullopt;
    }
    Abstract a;
    for (const char* key : {"doc_id", "title"}) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) {
        errors_.push_back({line_no_, std::string("missing or non-string '") + key + "'"});
        return std::nullopt;
      }
    }
    a.doc_id = j["doc_id"].get<std::string>();
    a.title = j["title"].get<std::string>();
    if (auto it = j.find("body"); it != j.end()) {
      if (!it->is_string()) {
        errors_.push_back({line_no_, "non-string 'body'"});
        return std::nullopt;
      }
      a.body = it->get<std::string>();
    }
    if (a.doc_id.empty()) {
      errors_.push_back({line_no_, "empty doc_id"});
      return std::nullopt;
    }
    return a;
  }

  std::optional<Abstract> parse_tsv(const std::string& line) {
    auto fields = split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      errors_.push_back({line_no_, "expected 2 or 3 tab-separated fields, got " +
                                       std::to_string(fields.size())});
      return std::nullopt;
    }
    Abstract a{detail::unescape_tsv(fields[0]), detail::unescape_tsv(fields[1]),
               fields.size() == 3 ? detail::unescape_tsv(fields[2]) : std::string()};
    if (a.doc_id.empty()) {
      errors_.push_back({line_no_, "empty doc_id"});
      return std::nullopt;
    }
    return a;
  }

  std::string path_;
  Format format_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::unordered_set<std::string> seen_;
  std::vector<RecordError> errors_;
};

struct CorpusContents {
  std::vector<Abstract> abstracts;
  std::vector<RecordError> errors;
};

inline CorpusContents read_corpus(const std::string& path, Format format) {
  CorpusReader reader(path, format);
  CorpusContents out;
  while (auto a = reader.next()) out.abstracts.push_back(std::move(*a));
  out.errors = reader.errors();
  return out;
}

// Tokens ending in '.' that do not end a sentence. Compared after stripping
// leading brackets, case-sensitively.
inline const std::set<std::string, std::less<>>& abbreviations() {
  static const std::set<std::string, std::less<>> kAbbrev = {
      "Fig.", "Figs.", "fig.", "figs.", "al.", "e.g.", "i.e.", "vs.", "cf.", "ca.",
      "approx.", "Dr.", "Prof.", "Eq.", "Eqs.", "No.", "Ref.", "Refs.", "resp.",
      "Tab.", "Suppl.", "Sect.", "Ch.", "Vol.", "St.", "Mr.", "Ms.", "Inc.", "Ltd.", "Co."};
  return kAbbrev;
}

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

inline bool is_closer(char c) {
  return c == ')' || c == ']' || c == '}' || c == '"' || c == '\'';
}

// Word immediately preceding and including text[dot].
inline std::string_view word_ending_at(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string_view w = text.substr(b, dot - b + 1);
  while (!w.empty() && (w.front() == '(' || w.front() == '[' || w.front() == '{')) w.remove_prefix(1);
  return w;
}

}  // namespace detail

// Sentence spans over raw text, trimmed of surrounding whitespace. Newlines
// are hard boundaries (titles rarely end in a period).
inline std::vector<std::pair<std::size_t, std::size_t>> split_spans(std::string_view text) {
  using detail::is_space;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  const std::size_t n = text.size();
  std::optional<std::size_t> start;

  auto close = [&](std::size_t end) {
    if (!start) return;
    while (end > *start && is_space(text[end - 1])) --end;
    if (end > *start) spans.emplace_back(*start, end);
    start.reset();
  };

  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c == '\n') {
      close(i);
      continue;
    }
    if (!start && !is_space(c)) start = i;
    if (!start || !detail::is_terminal(c)) continue;

    std::size_t j = i + 1;
    while (j < n && (detail::is_terminal(text[j]) || detail::is_closer(text[j]))) ++j;
    if (j == n) {
      close(j);
      i = j - 1;
      continue;
    }
    if (!is_space(text[j])) {
      i = j - 1;
      continue;
    }
    std::size_t k = j;
    while (k < n && is_space(text[k]) && text[k] != '\n') ++k;
    bool boundary = true;
    if (k < n && text[k] != '\n' && std::islower(static_cast<unsigned char>(text[k]))) boundary = false;
    if (boundary && c == '.' && j == i + 1 &&
        abbreviations().count(detail::word_ending_at(text, i)) > 0) {
      boundary = false;
    }
    if (boundary) close(j);
    i = j - 1;
  }
  close(n);
  return spans;
}

inline std::vector<Sentence> sentence_split(const Abstract& abstract) {
  const std::string text = abstract.text();
  std::vector<Sentence> out;
  for (auto [s, e] : split_spans(text)) out.push_back({abstract.doc_id, out.size(), s, e});
  return out;
}

namespace detail {

inline bool peel_leading(char c) {
  return c == '(' || c == '[' || c == '{' || c == '"' || c == '\'' || c == '<';
}

inline bool peel_trailing(char c) {
  switch (c) {
    case ')': case ']': case '}': case '"': case '\'': case '.': case ',':
    case ';': case ':': case '!': case '?': case '>':
      return true;
    default:
      return false;
  }
}

inline Token make_token(std::string_view text, std::size_t start, std::size_t end) {
  Token t;
  t.text = std::string(text.substr(start, end - start));
  t.start = start;
  t.end = end;
  t.is_alpha = t.is_digit = t.is_punct = true;
  for (unsigned char c : t.text) {
    if (!(std::isalpha(c) || c >= 0x80)) t.is_alpha = false;
    if (!std::isdigit(c)) t.is_digit = false;
    if (!std::ispunct(c)) t.is_punct = false;
  }
  return t;
}

}  // namespace detail

// Whitespace split, then leading/trailing punctuation is peeled into
// one-character tokens. Internal hyphens and slashes are kept.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && detail::is_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !detail::is_space(text[j])) ++j;

    std::size_t b = i, e = j;
    std::vector<Token> tail;
    while (b < e && detail::peel_leading(text[b])) {
      out.push_back(detail::make_token(text, b, b + 1));
      ++b;
    }
    while (e > b && detail::peel_trailing(text[e - 1])) {
      tail.push_back(detail::make_token(text, e - 1, e));
      --e;
    }
    if (e > b) out.push_back(detail::make_token(text, b, e));
    out.insert(out.end(), tail.rbegin(), tail.rend());
    i = j;
  }
  return out;
}

inline std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

using Gazetteer = std::set<std::string, std::less<>>;

inline Gazetteer default_gazetteer() {
  return {"human", "humans", "homo sapiens", "mouse", "mice", "murine", "mus musculus"};
}

// One lowercase term per line; '#' lines are comments.
inline Gazetteer load_gazetteer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer '" + path + "'");
  Gazetteer g;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    g.insert(to_lower(t));
  }
  if (g.empty()) throw Error("gazetteer '" + path + "' has no terms");
  return g;
}

namespace detail {

inline bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

inline bool contains_word(std::string_view haystack, std::string_view term) {
  if (term.empty()) return false;
  for (std::size_t pos = haystack.find(term); pos != std::string_view::npos;
       pos = haystack.find(term, pos + 1)) {
    bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    std::size_t after = pos + term.size();
    bool right_ok = after == haystack.size() || !is_word_char(haystack[after]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace detail

// True iff any gazetteer term occurs as a case-insensitive whole-word match
// in the title or body.
inline bool species_filter(const Abstract& abstract, const Gazetteer& gazetteer) {
  if (gazetteer.empty()) throw Error("species_filter: empty gazetteer");
  const std::string title = to_lower(abstract.title);
  const std::string body = to_lower(abstract.body);
  for (const auto& term : gazetteer) {
    if (detail::contains_word(title, term) || detail::contains_word(body, term)) return true;
  }
  return false;
}

}  // namespace bioie::corpus
