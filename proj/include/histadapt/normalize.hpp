// normalize: threshold application of spelling-replacement lexicons.
#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"

namespace histadapt {

// 1:1 form replacements with confidences; n:m rows are rejected at load time.
class NormalizationLexicon {
 public:
  struct Entry {
    std::string replacement;
    double confidence = 0.0;
  };

  void add(const std::string& form, const std::string& replacement, double confidence) {
    if (confidence < 0.0 || confidence > 1.0) {
      throw Error("confidence outside [0,1] for form '" + form + "'");
    }
    auto [it, inserted] = map_.emplace(form, Entry{replacement, confidence});
    if (!inserted && confidence > it->second.confidence) {
      it->second = Entry{replacement, confidence};
    }
  }

  const Entry* find(const std::string& form) const {
    auto it = map_.find(form);
    return it == map_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return map_.size(); }
  const std::unordered_map<std::string, Entry>& entries() const { return map_; }

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  std::size_t rejected_multi_token() const { return rejected_multi_; }
  void note_rejected_multi_token() { ++rejected_multi_; }

 private:
  std::unordered_map<std::string, Entry> map_;
  std::string provenance_;
  std::size_t rejected_multi_ = 0;
};

namespace detail {
inline bool has_whitespace(const std::string& s) {
  for (char c : s) {
    if (c == ' ' || c == '\t') return true;
  }
  return false;
}
}  // namespace detail

// `form<TAB>replacement<TAB>confidence` rows. Duplicate forms keep the
// highest-confidence row; rows with multi-token sides are dropped and counted.
inline NormalizationLexicon load_lexicon_stream(std::istream& in, const std::string& provenance) {
  NormalizationLexicon lex;
  lex.set_provenance(provenance);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty()) {
      throw Error("lexicon line " + std::to_string(line_no) +
                  ": expected form<TAB>replacement<TAB>confidence");
    }
    if (detail::has_whitespace(cols[0]) || detail::has_whitespace(cols[1])) {
      lex.note_rejected_multi_token();
      continue;
    }
    double confidence;
    try {
      confidence = std::stod(cols[2]);
    } catch (const std::exception&) {
      throw Error("lexicon line " + std::to_string(line_no) + ": bad confidence '" + cols[2] + "'");
    }
    if (confidence < 0.0 || confidence > 1.0) {
      throw Error("lexicon line " + std::to_string(line_no) + ": confidence outside [0,1]");
    }
    lex.add(cols[0], cols[1], confidence);
  }
  return lex;
}

inline NormalizationLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);
  return load_lexicon_stream(in, path);
}

inline void save_lexicon(const NormalizationLexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  std::vector<std::pair<std::string, NormalizationLexicon::Entry>> rows(lex.entries().begin(),
                                                                        lex.entries().end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [form, e] : rows) {
    out << form << '\t' << e.replacement << '\t' << format_double(e.confidence, 6) << '\n';
  }
}

struct NormalizationReport {
  std::size_t tokens_seen = 0;
  std::size_t tokens_replaced = 0;
  double replacement_rate = 0.0;
  bool has_reference = false;
  double oov_rate_before = 0.0;
  double oov_rate_after = 0.0;
};

// Replaces each token whose form has a lexicon entry with confidence >= the
// threshold. Matching is exact and case sensitive; tags and counts untouched.
inline std::pair<Corpus, NormalizationReport> apply_normalization(
    const Corpus& corpus, const NormalizationLexicon& lexicon, double threshold = 0.5,
    const std::unordered_set<std::string>* reference_vocab = nullptr) {
  if (threshold < 0.0 || threshold > 1.0) throw Error("threshold must lie in [0,1]");
  Corpus out = corpus;
  NormalizationReport report;
  std::size_t oov_before = 0, oov_after = 0;
  for (auto& doc : out.documents) {
    for (auto& sent : doc.sentences) {
      for (auto& tok : sent.tokens) {
        ++report.tokens_seen;
        if (reference_vocab && !reference_vocab->count(tok.form)) ++oov_before;
        const auto* entry = lexicon.find(tok.form);
        if (entry && entry->confidence >= threshold) {
          tok.form = entry->replacement;
          ++report.tokens_replaced;
        }
        if (reference_vocab && !reference_vocab->count(tok.form)) ++oov_after;
      }
    }
  }
  if (report.tokens_seen > 0) {
    report.replacement_rate =
        static_cast<double>(report.tokens_replaced) / static_cast<double>(report.tokens_seen);
    if (reference_vocab) {
      report.has_reference = true;
      report.oov_rate_before = static_cast<double>(oov_before) / static_cast<double>(report.tokens_seen);
      report.oov_rate_after = static_cast<double>(oov_after) / static_cast<double>(report.tokens_seen);
    }
  }
  return {std::move(out), report};
}

inline void print_normalization_report(const NormalizationReport& r, std::ostream& out) {
  out << "tokens_seen=" << r.tokens_seen << "\n";
  out << "tokens_replaced=" << r.tokens_replaced << "\n";
  out << "replacement_rate=" << format_double(r.replacement_rate, 6) << "\n";
  if (r.has_reference) {
    out << "oov_rate_before=" << format_double(r.oov_rate_before, 6) << "\n";
    out << "oov_rate_after=" << format_double(r.oov_rate_after, 6) << "\n";
  }
}

}  // namespace histadapt
