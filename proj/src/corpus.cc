// Copyright 2026 The acls Authors. All rights reserved.
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

#include "acls/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "acls/errors.h"
#include "acls/prng.h"

namespace acls {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Decodes one UTF-8 sequence starting at s[pos]. Malformed bytes decode as
// themselves with length 1.
char32_t decode_utf8(std::string_view s, size_t pos, size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  size_t n = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    n = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 4;
    cp = b0 & 0x07;
  } else {
    len = 1;
    return b0;
  }
  for (size_t k = 1; k < n; ++k) {
    const int c = cont(k);
    if (c < 0) {
      len = 1;
      return b0;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  len = n;
  return cp;
}

bool is_unicode_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3001 && cp <= 0x303F) ||  // CJK symbols and punctuation
         (cp >= 0x3040 && cp <= 0x30FF) ||  // kana
         (cp >= 0x3400 && cp <= 0x4DBF) ||  // extension A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||  // unified ideographs
         (cp >= 0xAC00 && cp <= 0xD7AF) ||  // hangul syllables
         (cp >= 0xF900 && cp <= 0xFAFF) ||  // compatibility ideographs
         (cp >= 0xFF00 && cp <= 0xFFEF) ||  // halfwidth and fullwidth forms
         (cp >= 0x20000 && cp <= 0x3134F);  // extensions B-G
}

std::string data_error_at(const std::filesystem::path& path, size_t line,
                          const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

}  // namespace

LabelMap::LabelMap(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw DataError("label map is empty");
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw DataError("label map: empty class name at position " + std::to_string(i));
    if (!index_.emplace(names_[i], static_cast<ClassId>(i)).second) {
      throw DataError("label map: duplicate class name '" + names_[i] + "'");
    }
  }
}

std::optional<ClassId> LabelMap::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelMap default_label_map() {
  return LabelMap({
      "Brushing and Rebate Fraud",
      "Fake Shopping and Services",
      "Other Types",
      "Nude Chat Extortion",
      "False Trading of Online Game Products",
      "Impersonation of E-commerce Logistics Customer Service",
      "Online Investment Platforms",
      "False Credit Reporting",
      "Impersonation of Leaders or Acquaintances",
      "Online Dating and Socializing (Non-\"Pig Slaughtering\" Scheme)",
      "Loans and Credit Card Processing Services",
      "Impersonation of Public Security, Procuratorial, and Judicial Authorities, "
      "and Government Agencies",
      "Pig Slaughtering Scheme",
  });
}

LabelMap load_label_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label map " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty()) names.emplace_back(t);
  }
  return LabelMap(std::move(names));
}

void save_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write label map " + path.string());
  for (const auto& n : labels.names()) out << n << '\n';
}

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(const std::vector<std::string>& tokens) {
  tokens_.reserve(tokens.size() + 2);
  tokens_.emplace_back(kPadToken);
  tokens_.emplace_back(kUnkToken);
  for (const auto& t : tokens) tokens_.push_back(t);
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw DataError("vocab: duplicate token '" + tokens_[i] + "'");
    }
  }
}

TokenId Vocab::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

uint64_t Vocab::hash() const {
  // FNV-1a over the tokens, each terminated by a zero byte.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Dataset load_dataset(const std::filesystem::path& path, const LabelMap& label_map) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  Dataset ds;
  ds.label_map = label_map;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(data_error_at(path, line_no, "malformed JSON record"));
    }
    if (!rec.is_object() || !rec.contains("text") || !rec.contains("label")) {
      throw DataError(data_error_at(path, line_no, "record needs \"text\" and \"label\" fields"));
    }
    const auto& text = rec["text"];
    if (!text.is_string() || trim(text.get_ref<const std::string&>()).empty()) {
      throw DataError(data_error_at(path, line_no, "\"text\" must be a non-empty string"));
    }
    const auto& label = rec["label"];
    ClassId id = -1;
    if (label.is_number_integer()) {
      const auto v = label.get<int64_t>();
      if (v < 0 || static_cast<size_t>(v) >= label_map.count()) {
        throw DataError(data_error_at(path, line_no, "label id " + std::to_string(v) + " out of range"));
      }
      id = static_cast<ClassId>(v);
    } else if (label.is_string()) {
      const auto& name = label.get_ref<const std::string&>();
      auto found = label_map.find(name);
      if (!found) throw DataError(data_error_at(path, line_no, "unknown label '" + name + "'"));
      id = *found;
    } else {
      throw DataError(data_error_at(path, line_no, "\"label\" must be a name or integer id"));
    }
    ds.examples.push_back({text.get<std::string>(), id});
  }
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset " + path.string());
  for (const auto& ex : dataset.examples) {
    nlohmann::json rec = {{"text", ex.text}, {"label", ex.label}};
    out << rec.dump() << '\n';
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  size_t pos = 0;
  while (pos < text.size()) {
    size_t len = 1;
    const char32_t cp = decode_utf8(text, pos, len);
    if (is_unicode_space(cp)) {
      flush();
    } else if (is_cjk(cp)) {
      flush();
      out.emplace_back(text.substr(pos, len));
    } else if (cp < 0x80) {
      char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      current.push_back(c);
    } else {
      current.append(text.substr(pos, len));
    }
    pos += len;
  }
  flush();
  return out;
}

Vocab build_vocab(const Dataset& train_split, size_t min_count) {
  if (train_split.empty()) throw DataError("build_vocab: empty training split");
  std::map<std::string, size_t> counts;
  for (const auto& ex : train_split.examples) {
    for (auto& t : tokenize(ex.text)) ++counts[t];
  }
  std::vector<std::pair<std::string, size_t>> sorted;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && tok != Vocab::kPadToken && tok != Vocab::kUnkToken) {
      sorted.emplace_back(tok, n);
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(sorted.size());
  for (auto& [tok, n] : sorted) tokens.push_back(tok);
  return Vocab(tokens);
}

DatasetSplit split(const Dataset& dataset, const SplitRatios& ratios, uint64_t seed) {
  if (dataset.empty()) throw DataError("split: empty dataset");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split: ratios must be non-negative and sum to 1");
  }
  const size_t n = dataset.size();
  const auto order = shuffled_indices(n, seed);
  const auto cut1 = static_cast<size_t>(std::floor(static_cast<double>(n) * ratios.train));
  const auto cut2 = std::min(
      n, static_cast<size_t>(std::floor(static_cast<double>(n) * (ratios.train + ratios.val))));
  DatasetSplit out;
  for (Dataset* d : {&out.train, &out.val, &out.test}) d->label_map = dataset.label_map;
  for (size_t i = 0; i < n; ++i) {
    Dataset& dst = i < cut1 ? out.train : (i < cut2 ? out.val : out.test);
    dst.examples.push_back(dataset.examples[order[i]]);
  }
  return out;
}

std::vector<EncodedExample> encode(const Dataset& dataset, const Vocab& vocab) {
  std::vector<EncodedExample> out;
  out.reserve(dataset.size());
  for (const auto& ex : dataset.examples) {
    EncodedExample e;
    e.label = ex.label;
    for (const auto& t : tokenize(ex.text)) e.tokens.push_back(vocab.lookup(t));
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Batch> batches(const std::vector<EncodedExample>& examples, size_t batch_size,
                           std::optional<uint64_t> shuffle_seed) {
  if (batch_size == 0) throw ConfigError("batches: batch_size must be >= 1");
  std::vector<size_t> order;
  if (shuffle_seed) {
    order = shuffled_indices(examples.size(), *shuffle_seed);
  } else {
    order.resize(examples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  }
  std::vector<Batch> out;
  for (size_t start = 0; start < order.size(); start += batch_size) {
    const size_t end = std::min(order.size(), start + batch_size);
    Batch b;
    for (size_t i = start; i < end; ++i) {
      b.width = std::max(b.width, examples[order[i]].tokens.size());
    }
    b.ids.assign((end - start) * b.width, Vocab::kPad);
    for (size_t i = start; i < end; ++i) {
      const auto& ex = examples[order[i]];
      std::copy(ex.tokens.begin(), ex.tokens.end(), b.ids.begin() + (i - start) * b.width);
      b.lengths.push_back(ex.tokens.size());
      b.labels.push_back(ex.label);
      b.indices.push_back(order[i]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace acls
