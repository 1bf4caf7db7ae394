// Shared fixtures for the unit tests.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "histadapt/corpus.hpp"

namespace testutil {

// One document, sentences given as "form/tag form/tag ..." strings.
inline histadapt::Corpus make_corpus(const std::vector<std::string>& sentences,
                                     const std::string& corpus_id = "test",
                                     const std::map<std::string, std::string>& extra_attrs = {}) {
  histadapt::Document doc;
  doc.id = corpus_id + "-doc0";
  doc.attributes["corpus"] = corpus_id;
  for (const auto& [k, v] : extra_attrs) doc.attributes[k] = v;
  for (const auto& line : sentences) {
    histadapt::Sentence sent;
    for (const auto& item : histadapt::split(line, ' ')) {
      if (item.empty()) continue;
      auto slash = item.find_last_of('/');
      histadapt::Token tok;
      if (slash == std::string::npos) {
        tok.form = item;
        tok.tag = "X";
      } else {
        tok.form = item.substr(0, slash);
        tok.tag = item.substr(slash + 1);
      }
      sent.tokens.push_back(tok);
    }
    doc.sentences.push_back(sent);
  }
  histadapt::Corpus corpus;
  corpus.documents.push_back(doc);
  return corpus;
}

inline histadapt::Corpus parse_text(const std::string& text,
                                    const std::string& name = "inline",
                                    histadapt::CorpusFormat format =
                                        histadapt::CorpusFormat::directive_header) {
  std::istringstream in(text);
  return histadapt::parse_corpus_stream(in, name, format);
}

}  // namespace testutil
