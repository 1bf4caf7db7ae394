// eval: IV/OOV-aware accuracy, per-tag error mining, ablation, error overlap.
#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/tagger.hpp"

namespace histadapt {

struct PerTagRow {
  std::string tag;
  int64_t total = 0;
  int64_t oov = 0;
  int64_t correct = 0;
  std::string error_word;  // most common (word, predicted) error pair
  std::string error_pred;
  int64_t error_count = 0;

  double oov_share() const { return total ? static_cast<double>(oov) / static_cast<double>(total) : 0.0; }
  double recall() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  int64_t tokens = 0;
  int64_t iv_tokens = 0, oov_tokens = 0;
  int64_t iv_correct = 0, oov_correct = 0;

  std::vector<PerTagRow> rows;  // sorted by gold-tag frequency, descending

  double overall() const {
    return tokens ? static_cast<double>(iv_correct + oov_correct) / static_cast<double>(tokens) : 0.0;
  }
  double iv_accuracy() const {
    return iv_tokens ? static_cast<double>(iv_correct) / static_cast<double>(iv_tokens) : 0.0;
  }
  double oov_accuracy() const {
    return oov_tokens ? static_cast<double>(oov_correct) / static_cast<double>(oov_tokens) : 0.0;
  }
  double oov_rate() const {
    return tokens ? static_cast<double>(oov_tokens) / static_cast<double>(tokens) : 0.0;
  }
};

// OOV means the token form is absent from `train_vocab`, exact and case
// sensitive. Predictions are flat and aligned with flatten_tags(gold).
inline EvalReport evaluate(const Corpus& gold, const std::vector<std::string>& predicted,
                           const std::unordered_set<std::string>& train_vocab) {
  if (predicted.size() != gold.num_tokens()) {
    throw Error("prediction length " + std::to_string(predicted.size()) +
                " does not match gold token count " + std::to_string(gold.num_tokens()));
  }
  EvalReport report;
  struct TagAccum {
    int64_t total = 0, oov = 0, correct = 0;
    std::map<std::pair<std::string, std::string>, int64_t> errors;
  };
  std::map<std::string, TagAccum> per_tag;

  std::size_t idx = 0;
  for (const auto& doc : gold.documents) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent.tokens) {
        const std::string& pred = predicted[idx++];
        const bool oov = train_vocab.count(tok.form) == 0;
        const bool hit = pred == tok.tag;
        ++report.tokens;
        if (oov) {
          ++report.oov_tokens;
          report.oov_correct += hit;
        } else {
          ++report.iv_tokens;
          report.iv_correct += hit;
        }
        auto& acc = per_tag[tok.tag];
        ++acc.total;
        acc.oov += oov;
        acc.correct += hit;
        if (!hit) ++acc.errors[{tok.form, pred}];
      }
    }
  }

  for (auto& [tag, acc] : per_tag) {
    PerTagRow row;
    row.tag = tag;
    row.total = acc.total;
    row.oov = acc.oov;
    row.correct = acc.correct;
    for (const auto& [pair, count] : acc.errors) {
      // std::map iteration is lexicographic, so ties keep the first pair seen
      if (count > row.error_count) {
        row.error_count = count;
        row.error_word = pair.first;
        row.error_pred = pair.second;
      }
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const PerTagRow& a, const PerTagRow& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.tag < b.tag;
  });
  return report;
}

struct OverlapReport {
  int64_t corrected_a = 0;
  int64_t corrected_b = 0;
  int64_t intersection = 0;
  double fraction_of_a = 0.0;  // |A n B| / |A|
  double fraction_of_b = 0.0;  // |A n B| / |B|
  bool a_empty = false;        // zero-denominator flags; fraction reported as 0
  bool b_empty = false;
};

// Corrected-by-X = token positions wrong under the baseline and right under X.
inline OverlapReport error_overlap(const Corpus& gold, const std::vector<std::string>& baseline,
                                   const std::vector<std::string>& system_a,
                                   const std::vector<std::string>& system_b) {
  const std::size_t n = gold.num_tokens();
  if (baseline.size() != n || system_a.size() != n || system_b.size() != n) {
    throw Error("error_overlap: prediction vectors are not aligned with gold");
  }
  auto tags = flatten_tags(gold);
  OverlapReport r;
  for (std::size_t i = 0; i < n; ++i) {
    if (baseline[i] == tags[i]) continue;
    const bool a = system_a[i] == tags[i];
    const bool b = system_b[i] == tags[i];
    r.corrected_a += a;
    r.corrected_b += b;
    r.intersection += a && b;
  }
  r.a_empty = r.corrected_a == 0;
  r.b_empty = r.corrected_b == 0;
  if (!r.a_empty) r.fraction_of_a = static_cast<double>(r.intersection) / static_cast<double>(r.corrected_a);
  if (!r.b_empty) r.fraction_of_b = static_cast<double>(r.intersection) / static_cast<double>(r.corrected_b);
  return r;
}

// Ablation groups over the sparse templates.
inline const std::map<std::string, std::set<int>>& ablation_groups() {
  static const std::map<std::string, std::set<int>> groups = {
      {"word-context", {0, 1, 3, 4}},      // the 4 non-center lexical templates
      {"prefix", {5, 6, 7, 8}},
      {"suffix", {9, 10, 11, 12}},
      {"affix", {5, 6, 7, 8, 9, 10, 11, 12}},
      {"orthographic", {13, 14, 15}},
  };
  return groups;
}

struct AblationRow {
  std::string name;  // "all" or the dropped group
  EvalReport report;
};

// One training + evaluation per dropped group, plus the all-features row.
inline std::vector<AblationRow> ablation_run(const Corpus& train, const Corpus& test,
                                             const std::vector<std::string>& drop_groups,
                                             const FeaturePipeline& base_pipeline,
                                             const TaggerConfig& config = {}) {
  for (const auto& g : drop_groups) {
    if (!ablation_groups().count(g)) throw Error("unknown ablation group: " + g);
  }
  auto train_vocab = train.vocabulary();
  std::vector<AblationRow> rows;
  auto run_one = [&](const std::string& name, const std::set<int>& dropped) {
    FeaturePipeline pipeline = base_pipeline;
    pipeline.config.dropped_templates = dropped;
    if (pipeline.config.dropped_templates.size() >= static_cast<std::size_t>(kTemplateCount)) {
      throw Error("ablation drops every template, leaving an empty representation");
    }
    auto model = train_tagger(train, pipeline, config);
    auto pred = tag_corpus(model, pipeline, test);
    rows.push_back(AblationRow{name, evaluate(test, pred, train_vocab)});
  };
  run_one("all", base_pipeline.config.dropped_templates);
  for (const auto& g : drop_groups) {
    std::set<int> dropped = base_pipeline.config.dropped_templates;
    for (int t : ablation_groups().at(g)) dropped.insert(t);
    run_one("-" + g, dropped);
  }
  return rows;
}

inline void print_eval_report(const EvalReport& r, std::ostream& out, std::size_t max_rows = 15) {
  out << std::fixed << std::setprecision(2);
  out << "overall  " << 100.0 * r.overall() << "\n";
  out << "iv       " << 100.0 * r.iv_accuracy() << "\n";
  out << "oov      " << 100.0 * r.oov_accuracy() << "\n";
  out << "oov-rate " << 100.0 * r.oov_rate() << "\n";
  out << "\ntag       %OOV   accuracy   most common error\n";
  for (std::size_t i = 0; i < r.rows.size() && i < max_rows; ++i) {
    const auto& row = r.rows[i];
    out << std::left << std::setw(8) << row.tag << std::right << std::setw(7)
        << 100.0 * row.oov_share() << std::setw(10) << 100.0 * row.recall() << "   ";
    if (row.error_count > 0) {
      out << row.error_word << "/" << row.error_pred;
    } else {
      out << "-";
    }
    out << "\n";
  }
}

inline void write_eval_report_kv(const EvalReport& r, std::ostream& out) {
  out << "tokens\t" << r.tokens << "\n";
  out << "iv_tokens\t" << r.iv_tokens << "\n";
  out << "oov_tokens\t" << r.oov_tokens << "\n";
  out << "iv_correct\t" << r.iv_correct << "\n";
  out << "oov_correct\t" << r.oov_correct << "\n";
  out << "overall\t" << format_double(r.overall()) << "\n";
  out << "iv_accuracy\t" << format_double(r.iv_accuracy()) << "\n";
  out << "oov_accuracy\t" << format_double(r.oov_accuracy()) << "\n";
  out << "oov_rate\t" << format_double(r.oov_rate()) << "\n";
  for (const auto& row : r.rows) {
    out << "tag\t" << row.tag << '\t' << row.total << '\t' << row.oov << '\t' << row.correct << '\t'
        << (row.error_count ? row.error_word + "/" + row.error_pred : "-") << '\t' << row.error_count
        << "\n";
  }
}

}  // namespace histadapt
