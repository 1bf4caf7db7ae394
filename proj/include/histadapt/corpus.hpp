// corpus: data model, two-column file ingestion, statistics, train/dev splits.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "histadapt/common.hpp"

namespace histadapt {

struct Token {
  std::string form;
  std::string tag;
};

struct Sentence {
  std::vector<Token> tokens;
};

struct Document {
  std::string id;
  std::map<std::string, std::string> attributes;  // always carries "corpus"
  std::vector<Sentence> sentences;

  const std::string* attribute(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
  }
};

struct Corpus {
  std::vector<Document> documents;
  std::string tagset_name;

  std::size_t num_sentences() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.sentences.size();
    return n;
  }

  std::size_t num_tokens() const {
    std::size_t n = 0;
    for (const auto& d : documents)
      for (const auto& s : d.sentences) n += s.tokens.size();
    return n;
  }

  // Distinct surface forms, e.g. the IV/OOV reference set of a training corpus.
  std::unordered_set<std::string> vocabulary() const {
    std::unordered_set<std::string> v;
    for (const auto& d : documents)
      for (const auto& s : d.sentences)
        for (const auto& t : s.tokens) v.insert(t.form);
    return v;
  }

  std::unordered_set<std::string> tag_inventory() const {
    std::unordered_set<std::string> v;
    for (const auto& d : documents)
      for (const auto& s : d.sentences)
        for (const auto& t : s.tokens) v.insert(t.tag);
    return v;
  }
};

enum class CorpusFormat { two_column, directive_header };

namespace detail {

inline std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base.empty() ? "corpus" : base;
}

}  // namespace detail

// Two-column token files: `form<TAB>tag`, blank line between sentences.
// In directive_header format, `#meta key=value` opens a new document; consecutive
// directives accumulate attributes of the same document. Documents without an
// explicit corpus attribute get `default_corpus`.
inline Corpus parse_corpus_stream(std::istream& in, const std::string& default_corpus,
                                  CorpusFormat format = CorpusFormat::directive_header) {
  Corpus corpus;
  Document doc;
  doc.attributes["corpus"] = default_corpus;
  Sentence sent;
  bool doc_open_by_directive = false;  // last line was a #meta directive
  int doc_counter = 0;

  auto flush_sentence = [&]() {
    if (!sent.tokens.empty()) {
      doc.sentences.push_back(std::move(sent));
      sent = Sentence{};
    }
  };
  auto flush_document = [&]() {
    flush_sentence();
    if (!doc.sentences.empty()) {
      if (doc.id.empty()) doc.id = "doc" + std::to_string(doc_counter);
      ++doc_counter;
      corpus.documents.push_back(std::move(doc));
    }
    doc = Document{};
    doc.attributes["corpus"] = default_corpus;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush_sentence();
      doc_open_by_directive = false;
      continue;
    }
    if (format == CorpusFormat::directive_header && line[0] == '#') {
      if (line.rfind("#meta ", 0) != 0) {
        throw Error("line " + std::to_string(line_no) + ": unknown directive: " + line);
      }
      if (!doc_open_by_directive) {
        flush_document();
        doc_open_by_directive = true;
      }
      std::string kv = trim(line.substr(6));
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error("line " + std::to_string(line_no) + ": malformed #meta directive: " + line);
      }
      std::string key = trim(kv.substr(0, eq));
      std::string value = trim(kv.substr(eq + 1));
      if (key == "id") {
        doc.id = value;
      } else {
        doc.attributes[key] = value;
      }
      continue;
    }
    doc_open_by_directive = false;
    auto cols = split(line, '\t');
    if (cols.size() != 2) {
      throw Error("line " + std::to_string(line_no) + ": expected 2 tab-separated columns, got " +
                  std::to_string(cols.size()));
    }
    if (cols[0].empty() || cols[1].empty()) {
      throw Error("line " + std::to_string(line_no) + ": empty form or tag");
    }
    sent.tokens.push_back(Token{cols[0], cols[1]});
  }
  flush_document();
  if (corpus.documents.empty()) throw Error("empty corpus file");
  return corpus;
}

inline Corpus parse_corpus_file(const std::string& path,
                                CorpusFormat format = CorpusFormat::directive_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  Corpus c = parse_corpus_stream(in, detail::file_stem(path), format);
  return c;
}

inline void write_corpus_stream(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus.documents) {
    out << "#meta id=" << doc.id << "\n";
    for (const auto& [k, v] : doc.attributes) out << "#meta " << k << "=" << v << "\n";
    for (const auto& s : doc.sentences) {
      for (const auto& t : s.tokens) out << t.form << '\t' << t.tag << '\n';
      out << '\n';
    }
  }
}

inline void write_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  write_corpus_stream(corpus, out);
}

struct StatsRow {
  std::string value;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
};

// Per-group sentence/token counts plus a trailing total row. Rows sorted by value.
inline std::vector<StatsRow> corpus_stats(const Corpus& corpus, const std::string& group_by) {
  std::map<std::string, StatsRow> groups;
  StatsRow total{"(total)", 0, 0};
  for (const auto& doc : corpus.documents) {
    const std::string* v = doc.attribute(group_by);
    if (!v) throw Error("document " + doc.id + " has no attribute '" + group_by + "'");
    auto& row = groups[*v];
    row.value = *v;
    for (const auto& s : doc.sentences) {
      row.sentences += 1;
      row.tokens += s.tokens.size();
      total.sentences += 1;
      total.tokens += s.tokens.size();
    }
  }
  std::vector<StatsRow> rows;
  for (auto& [_, row] : groups) rows.push_back(row);
  rows.push_back(total);
  return rows;
}

namespace detail {

// Rebuild a corpus keeping only the sentences whose global index passes `keep`.
template <class Pred>
Corpus select_sentences(const Corpus& corpus, Pred keep) {
  Corpus out;
  out.tagset_name = corpus.tagset_name;
  std::size_t idx = 0;
  for (const auto& doc : corpus.documents) {
    Document d;
    d.id = doc.id;
    d.attributes = doc.attributes;
    for (const auto& s : doc.sentences) {
      if (keep(idx)) d.sentences.push_back(s);
      ++idx;
    }
    if (!d.sentences.empty()) out.documents.push_back(std::move(d));
  }
  return out;
}

}  // namespace detail

// Sentence-level uniform split without replacement; dev gets round(fraction * N).
inline std::pair<Corpus, Corpus> split_train_dev(const Corpus& corpus, double dev_fraction,
                                                 uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw Error("dev_fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = corpus.num_sentences();
  if (n < 2) throw Error("cannot split a corpus with fewer than 2 sentences");
  const auto dev_n = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<char> in_dev(n, 0);
  for (std::size_t i = 0; i < dev_n; ++i) in_dev[order[i]] = 1;

  Corpus train = detail::select_sentences(corpus, [&](std::size_t i) { return !in_dev[i]; });
  Corpus dev = detail::select_sentences(corpus, [&](std::size_t i) { return in_dev[i] != 0; });
  return {std::move(train), std::move(dev)};
}

// Concatenation preserving document metadata; used for unlabeled unions.
inline Corpus merge_corpora(const std::vector<const Corpus*>& parts) {
  Corpus out;
  for (const Corpus* c : parts) {
    if (!c) continue;
    if (out.tagset_name.empty()) out.tagset_name = c->tagset_name;
    for (const auto& d : c->documents) out.documents.push_back(d);
  }
  return out;
}

// Flat list of gold tags in corpus order; evaluation aligns predictions to this.
inline std::vector<std::string> flatten_tags(const Corpus& corpus) {
  std::vector<std::string> tags;
  tags.reserve(corpus.num_tokens());
  for (const auto& d : corpus.documents)
    for (const auto& s : d.sentences)
      for (const auto& t : s.tokens) tags.push_back(t.tag);
  return tags;
}

}  // namespace histadapt
