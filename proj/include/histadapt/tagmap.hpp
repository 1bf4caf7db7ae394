// tagmap: complex-tag simplification and deterministic PCHE -> PTB tag conversion.
#pragma once

#include <array>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"

namespace histadapt {

// Compound tags keep only their first simple component: PRO+N -> PRO.
inline std::string simplify_complex_tag(const std::string& tag) {
  std::size_t plus = tag.find('+');
  return plus == std::string::npos ? tag : tag.substr(0, plus);
}

class TagMapper {
 public:
  TagMapper() = default;
  explicit TagMapper(std::string name) : name_(std::move(name)) {}

  void add(const std::string& source, const std::string& target) {
    auto [it, inserted] = index_.emplace(source, target);
    if (!inserted) throw Error("duplicate mapping for tag: " + source);
    entries_.emplace_back(source, target);
  }

  // Optional Q -> DT override; all other entries are untouched.
  void set_remap_q(bool on) { remap_q_ = on; }
  bool remap_q() const { return remap_q_; }

  bool contains(const std::string& simple_tag) const { return index_.count(simple_tag) != 0; }

  // Applies complex-tag simplification first, then the table.
  std::string map(const std::string& raw_tag) const {
    std::string simple = simplify_complex_tag(raw_tag);
    if (remap_q_ && simple == "Q") return "DT";
    auto it = index_.find(simple);
    if (it == index_.end()) {
      throw Error("unmapped tag: '" + simple + "'" +
                  (simple == raw_tag ? "" : " (simplified from '" + raw_tag + "')"));
    }
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  // PCHE (PPCEME/PPCMBE) tagset to the PTB inventory, 83 entries.
  static TagMapper builtin_pche_ptb() {
    static const std::array<std::pair<const char*, const char*>, 83> kTable = {{
        {",", ","},          {".", "."},         {"'", "''"},      {"\"", "''"},
        {"$", "PRP$"},       {"ADJ", "JJ"},      {"ADJR", "JJR"},  {"ADJS", "JJS"},
        {"ADV", "RB"},       {"ADVR", "RBR"},    {"ADVS", "RBS"},  {"ALSO", "RB"},
        {"BAG", "VBG"},      {"BE", "VB"},       {"BED", "VBD"},   {"BEI", "VB"},
        {"BEN", "VBN"},      {"BEP", "VBZ"},     {"C", "IN"},      {"CONJ", "CC"},
        {"D", "DT"},         {"DAG", "VBG"},     {"DAN", "VBN"},   {"DO", "VB"},
        {"DOD", "VBD"},      {"DOI", "VB"},      {"DON", "VBN"},   {"DOP", "VBP"},
        {"ELSE", "RB"},      {"EX", "EX"},       {"FOR", "IN"},    {"FP", "CC"},
        {"FW", "FW"},        {"HAG", "VBG"},     {"HAN", "VBN"},   {"HV", "VB"},
        {"HVD", "VBD"},      {"HVI", "VB"},      {"HVN", "VBN"},   {"HVP", "VBP"},
        {"INTJ", "UH"},      {"MD", "MD"},       {"N", "NN"},      {"N$", "NN"},
        {"NEG", "RB"},       {"NPR", "NNP"},     {"NPR$", "NNP"},  {"NPRS", "NNPS"},
        {"NPRS$", "NNPS"},   {"NS", "NNS"},      {"NS$", "NNS"},   {"NUM", "CD"},
        {"NUM$", "CD"},      {"ONE", "PRP"},     {"ONES", "PRP"},  {"ONE$", "PRP$"},
        {"OTHER", "PRP"},    {"OTHER$", "PRP"},  {"OTHERS$", "PRP"}, {"OTHERS", "PRP"},
        {"P", "IN"},         {"PRO", "PRP"},     {"PRO$", "PRP$"}, {"Q", "JJ"},
        {"QS", "RBS"},       {"QR", "RBR"},      {"RP", "RB"},     {"SUCH", "RB"},
        {"TO", "TO"},        {"VAG", "VBG"},     {"VAN", "VBN"},   {"VB", "VB"},
        {"VBD", "VBD"},      {"VBI", "VB"},      {"VBN", "VBN"},   {"VBP", "VBP"},
        {"WADV", "WRB"},     {"WARD", "VB"},     {"WD", "WDT"},    {"WPRO", "WP"},
        {"WPRO$", "WP$"},    {"WQ", "IN"},       {"X", "X"},
    }};
    TagMapper m("pche-ptb");
    for (const auto& [src, dst] : kTable) m.add(src, dst);
    return m;
  }

  // Two-column `source<TAB>target` file, `#` comment lines allowed.
  static TagMapper load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mapping file: " + path);
    TagMapper m(detail::file_stem(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
        throw Error("mapping file line " + std::to_string(line_no) + ": expected source<TAB>target");
      }
      m.add(cols[0], cols[1]);
    }
    if (m.size() == 0) throw Error("empty mapping file: " + path);
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << "# tag mapping: " << name_ << "\n";
    for (const auto& [src, dst] : entries_) out << src << '\t' << dst << '\n';
  }

 private:
  std::string name_;
  bool remap_q_ = false;
  std::unordered_map<std::string, std::string> index_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Relabels every token; counts and forms are untouched.
inline Corpus map_corpus_tags(const Corpus& corpus, const TagMapper& mapper) {
  Corpus out = corpus;
  out.tagset_name = "ptb";
  for (auto& doc : out.documents)
    for (auto& sent : doc.sentences)
      for (auto& tok : sent.tokens) tok.tag = mapper.map(tok.tag);
  return out;
}

}  // namespace histadapt
