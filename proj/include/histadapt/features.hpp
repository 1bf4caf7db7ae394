// features: the 16 tagging feature templates and per-template vocabularies.
//
// Template inventory (indices are part of every on-disk format):
//   0..4   lexical   w-2 w-1 w0 w+1 w+2, with <s> / </s> past sentence edges
//   5..8   affix     prefixes of w0, lengths 1..4 (truncated to |w0|)
//   9..12  affix     suffixes of w0, lengths 1..4 (truncated to |w0|)
//   13..15 orthographic   contains-digit, contains-uppercase, contains-hyphen
#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "histadapt/attributes.hpp"
#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"

namespace histadapt {

inline constexpr int kTemplateCount = 16;
inline constexpr int kEmbeddedTemplateCount = 13;  // lexical + affix; orthographic stay sparse
inline constexpr const char* kBosSymbol = "<s>";
inline constexpr const char* kEosSymbol = "</s>";

enum class TemplateGroup { lexical, affix, orthographic };

struct TemplateInfo {
  int index;
  TemplateGroup group;
  const char* name;
};

inline const std::array<TemplateInfo, kTemplateCount>& templates() {
  static const std::array<TemplateInfo, kTemplateCount> t = {{
      {0, TemplateGroup::lexical, "w-2"},
      {1, TemplateGroup::lexical, "w-1"},
      {2, TemplateGroup::lexical, "w0"},
      {3, TemplateGroup::lexical, "w+1"},
      {4, TemplateGroup::lexical, "w+2"},
      {5, TemplateGroup::affix, "pre1"},
      {6, TemplateGroup::affix, "pre2"},
      {7, TemplateGroup::affix, "pre3"},
      {8, TemplateGroup::affix, "pre4"},
      {9, TemplateGroup::affix, "suf1"},
      {10, TemplateGroup::affix, "suf2"},
      {11, TemplateGroup::affix, "suf3"},
      {12, TemplateGroup::affix, "suf4"},
      {13, TemplateGroup::orthographic, "has_digit"},
      {14, TemplateGroup::orthographic, "has_upper"},
      {15, TemplateGroup::orthographic, "has_hyphen"},
  }};
  return t;
}

// One token position: exactly one active feature value per template.
struct Instance {
  std::array<std::string, kTemplateCount> active;
  std::vector<uint8_t> attribute_z;  // z[0] == 1 always
  int sentence_index = -1;
  int token_index = -1;

  std::string qualified(int t) const { return std::string(templates()[t].name) + ":" + active[t]; }
};

namespace detail {

// Prefix/suffix of the first/last k code points; the whole word when shorter.
inline std::string utf8_prefix(const std::string& w, const std::vector<std::size_t>& off, int k) {
  const int n = static_cast<int>(off.size()) - 1;
  const int take = k < n ? k : n;
  return w.substr(0, off[take]);
}

inline std::string utf8_suffix(const std::string& w, const std::vector<std::size_t>& off, int k) {
  const int n = static_cast<int>(off.size()) - 1;
  const int take = k < n ? k : n;
  return w.substr(off[n - take]);
}

}  // namespace detail

// Feature values only (no attribute vector); shared by extraction and vocab building.
inline std::array<std::string, kTemplateCount> extract_feature_values(const Sentence& sentence,
                                                                      std::size_t i) {
  if (i >= sentence.tokens.size()) throw Error("token index out of range");
  std::array<std::string, kTemplateCount> active;
  const auto n = static_cast<long>(sentence.tokens.size());
  for (int j = -2; j <= 2; ++j) {
    const long p = static_cast<long>(i) + j;
    std::string v;
    if (p < 0) {
      v = kBosSymbol;
    } else if (p >= n) {
      v = kEosSymbol;
    } else {
      v = sentence.tokens[static_cast<std::size_t>(p)].form;
    }
    active[static_cast<std::size_t>(j + 2)] = std::move(v);
  }
  const std::string& w = sentence.tokens[i].form;
  const auto off = utf8_offsets(w);
  for (int k = 1; k <= 4; ++k) {
    active[static_cast<std::size_t>(4 + k)] = detail::utf8_prefix(w, off, k);
    active[static_cast<std::size_t>(8 + k)] = detail::utf8_suffix(w, off, k);
  }
  bool digit = false, upper = false, hyphen = false;
  for (char c : w) {
    digit = digit || (c >= '0' && c <= '9');
    upper = upper || (c >= 'A' && c <= 'Z');
    hyphen = hyphen || c == '-';
  }
  active[13] = digit ? "1" : "0";
  active[14] = upper ? "1" : "0";
  active[15] = hyphen ? "1" : "0";
  return active;
}

inline Instance extract_instance(const Sentence& sentence, std::size_t i,
                                 const AttributeSpace& space, const Document& doc) {
  Instance inst;
  inst.active = extract_feature_values(sentence, i);
  inst.attribute_z = space.z_for(doc);
  inst.token_index = static_cast<int>(i);
  return inst;
}

// Frozen per-template maps from feature value to contiguous id, with counts.
class FeatureVocabulary {
 public:
  void add_corpus(const Corpus& corpus) {
    for (const auto& doc : corpus.documents) {
      for (const auto& sent : doc.sentences) {
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
          auto values = extract_feature_values(sent, i);
          for (int t = 0; t < kTemplateCount; ++t) add(t, values[static_cast<std::size_t>(t)]);
        }
      }
    }
    offsets_valid_ = false;
  }

  void add(int t, const std::string& value) {
    auto& tmpl = maps_[static_cast<std::size_t>(t)];
    auto it = tmpl.find(value);
    if (it == tmpl.end()) {
      int id = static_cast<int>(values_[static_cast<std::size_t>(t)].size());
      tmpl.emplace(value, id);
      values_[static_cast<std::size_t>(t)].push_back(value);
      counts_[static_cast<std::size_t>(t)].push_back(1);
    } else {
      ++counts_[static_cast<std::size_t>(t)][static_cast<std::size_t>(it->second)];
    }
    offsets_valid_ = false;
  }

  // -1 when unseen.
  int id(int t, const std::string& value) const {
    const auto& tmpl = maps_[static_cast<std::size_t>(t)];
    auto it = tmpl.find(value);
    return it == tmpl.end() ? -1 : it->second;
  }

  std::size_t template_size(int t) const { return values_[static_cast<std::size_t>(t)].size(); }

  const std::vector<int64_t>& counts(int t) const { return counts_[static_cast<std::size_t>(t)]; }

  const std::string& value(int t, int id) const {
    return values_[static_cast<std::size_t>(t)][static_cast<std::size_t>(id)];
  }

  std::size_t offset(int t) const {
    refresh_offsets();
    return offsets_[static_cast<std::size_t>(t)];
  }

  std::size_t total_size() const {
    refresh_offsets();
    return total_;
  }

  // Global sparse id of (template, value); throws on unseen features.
  std::size_t global_id(int t, const std::string& value) const {
    int local = id(t, value);
    if (local < 0) {
      throw Error(std::string("feature not in vocabulary: ") + templates()[t].name + ":" + value);
    }
    return offset(t) + static_cast<std::size_t>(local);
  }

  void dump(std::ostream& out) const {
    for (int t = 0; t < kTemplateCount; ++t) {
      for (std::size_t i = 0; i < template_size(t); ++i) {
        out << t << '\t' << values_[static_cast<std::size_t>(t)][i] << '\t'
            << counts_[static_cast<std::size_t>(t)][i] << '\n';
      }
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    dump(out);
  }

  static FeatureVocabulary load_stream(std::istream& in) {
    FeatureVocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 3) {
        throw Error("vocabulary line " + std::to_string(line_no) + ": expected 3 columns");
      }
      int t = std::stoi(cols[0]);
      int64_t count = std::stoll(cols[2]);
      if (t < 0 || t >= kTemplateCount || count < 1) {
        throw Error("vocabulary line " + std::to_string(line_no) + ": bad template or count");
      }
      auto& tmpl = v.maps_[static_cast<std::size_t>(t)];
      if (tmpl.count(cols[1])) {
        throw Error("vocabulary line " + std::to_string(line_no) + ": duplicate feature");
      }
      tmpl.emplace(cols[1], static_cast<int>(v.values_[static_cast<std::size_t>(t)].size()));
      v.values_[static_cast<std::size_t>(t)].push_back(cols[1]);
      v.counts_[static_cast<std::size_t>(t)].push_back(count);
    }
    return v;
  }

  static FeatureVocabulary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open vocabulary file: " + path);
    return load_stream(in);
  }

  uint64_t hash() const {
    std::ostringstream os;
    dump(os);
    return fnv1a64(os.str());
  }

 private:
  void refresh_offsets() const {
    if (offsets_valid_) return;
    std::size_t off = 0;
    for (int t = 0; t < kTemplateCount; ++t) {
      offsets_[static_cast<std::size_t>(t)] = off;
      off += values_[static_cast<std::size_t>(t)].size();
    }
    total_ = off;
    offsets_valid_ = true;
  }

  std::array<std::unordered_map<std::string, int>, kTemplateCount> maps_;
  std::array<std::vector<std::string>, kTemplateCount> values_;
  std::array<std::vector<int64_t>, kTemplateCount> counts_;
  mutable std::array<std::size_t, kTemplateCount> offsets_{};
  mutable std::size_t total_ = 0;
  mutable bool offsets_valid_ = false;
};

// Union vocabulary over labeled and unlabeled corpora, so representation
// models never meet an out-of-vocabulary feature.
inline FeatureVocabulary build_vocabulary(const std::vector<const Corpus*>& corpora) {
  if (corpora.empty()) throw Error("build_vocabulary needs at least one corpus");
  FeatureVocabulary v;
  for (const Corpus* c : corpora) {
    if (c) v.add_corpus(*c);
  }
  return v;
}

}  // namespace histadapt
