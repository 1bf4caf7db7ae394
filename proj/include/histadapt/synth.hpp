// synth: synthetic domain-shifted corpora with invertible spelling mutations.
//
// A small probabilistic template grammar over PTB tags produces the source
// corpus; the target corpus draws from the types realized in the source and
// then rewrites a controlled set of word types with archaic-style character
// mutations (th- forms, initial u/v swaps, i/y substitution, final -e). The
// exact inverse map ships as the gold normalization lexicon.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/normalize.hpp"

namespace histadapt {

struct SynthSlot {
  std::vector<std::pair<std::string, double>> tags;  // tag options with weights
};

struct SynthTemplate {
  double weight = 1.0;
  std::vector<SynthSlot> slots;
};

namespace detail {

inline SynthSlot slot(std::string tag) { return SynthSlot{{{std::move(tag), 1.0}}}; }

inline SynthSlot choice(std::vector<std::pair<std::string, double>> tags) {
  return SynthSlot{std::move(tags)};
}

}  // namespace detail

// Sentence templates; the JJ/NN modifier slot and the VBD/VBZ alternation put
// real weight on word identity rather than on context alone.
inline std::vector<SynthTemplate> default_synth_templates() {
  using detail::choice;
  using detail::slot;
  std::vector<SynthTemplate> t;
  t.push_back({0.18, {slot("DT"), choice({{"JJ", 0.5}, {"NN", 0.5}}), slot("NN"),
                      choice({{"VBD", 0.5}, {"VBZ", 0.5}}), slot("DT"),
                      choice({{"JJ", 0.5}, {"NN", 0.5}}), slot("NN"), slot(".")}});
  t.push_back({0.12, {slot("DT"), slot("NN"), choice({{"VBZ", 0.6}, {"VBD", 0.4}}), slot("IN"),
                      slot("DT"), slot("JJ"), slot("NN"), slot(".")}});
  t.push_back({0.12, {slot("PRP"), slot("VBD"), slot("DT"), slot("NN"), slot("CC"), slot("DT"),
                      slot("NN"), slot(".")}});
  t.push_back({0.10, {slot("DT"), slot("JJ"), slot("NNS"), slot("VBD"), slot("IN"), slot("DT"),
                      slot("NN"), slot(".")}});
  t.push_back({0.08, {slot("NNP"), slot("VBZ"), slot("TO"), slot("VB"), slot("DT"), slot("NN"),
                      slot(".")}});
  t.push_back({0.08, {slot("PRP"), slot("VBZ"), slot("RB"), slot("JJ"), slot(".")}});
  t.push_back({0.08, {slot("IN"), slot("DT"), slot("NN"), slot(","), slot("DT"), slot("NNS"),
                      slot("VBD"), slot("RB"), slot(".")}});
  t.push_back({0.08, {slot("DT"), slot("NN"), slot("IN"), slot("NNP"), slot("VBD"), slot("DT"),
                      choice({{"JJ", 0.5}, {"NN", 0.5}}), slot("NNS"), slot(".")}});
  t.push_back({0.06, {slot("CD"), slot("NNS"), slot("VBD"), slot("IN"), slot("DT"), slot("NN"),
                      slot(".")}});
  t.push_back({0.05, {slot("NNP"), slot("CC"), slot("NNP"), slot("VBD"), slot("DT"), slot("JJ"),
                      slot("NN"), slot(".")}});
  t.push_back({0.05, {slot("PRP"), slot("VBD"), slot("RB"), slot("CC"), slot("PRP"), slot("VBD"),
                      slot("DT"), slot("NN"), slot(".")}});
  return t;
}

struct SynthConfig {
  int vocab_size = 1200;            // approximate open-class type budget
  int sentences_per_domain = 2000;
  double mutation_fraction = -1.0;  // >= 0: mutate this fraction of target types
  double target_oov_rate = 0.23;    // used when mutation_fraction < 0
  double oov_tolerance = 0.02;
  uint64_t seed = 1;
  std::vector<SynthTemplate> templates = default_synth_templates();
};

struct SynthResult {
  Corpus source;
  Corpus target;
  NormalizationLexicon gold;     // mutated form -> original form, confidence 1
  double achieved_oov_rate = 0;  // mutated-token share of the target corpus
  std::size_t mutated_types = 0;
  std::size_t declared_sentences_per_domain = 0;
};

namespace detail {

class SynthLexicon {
 public:
  void add(const std::string& tag, std::string word, double weight) {
    auto& entry = classes_[tag];
    entry.words.push_back(std::move(word));
    entry.cumulative.push_back((entry.cumulative.empty() ? 0.0 : entry.cumulative.back()) + weight);
  }

  const std::string& sample(const std::string& tag, Rng& rng) const {
    auto it = classes_.find(tag);
    if (it == classes_.end() || it->second.words.empty()) {
      throw Error("synthetic grammar uses tag with empty lexicon: " + tag);
    }
    const auto& entry = it->second;
    const double u = rng.uniform() * entry.cumulative.back();
    auto pos = std::upper_bound(entry.cumulative.begin(), entry.cumulative.end(), u);
    std::size_t i = pos == entry.cumulative.end()
                        ? entry.words.size() - 1
                        : static_cast<std::size_t>(pos - entry.cumulative.begin());
    return entry.words[i];
  }

  bool has(const std::string& tag) const {
    auto it = classes_.find(tag);
    return it != classes_.end() && !it->second.words.empty();
  }

 private:
  struct Entry {
    std::vector<std::string> words;
    std::vector<double> cumulative;
  };
  std::map<std::string, Entry> classes_;
};

inline double zipf_weight(std::size_t rank) {
  return 1.0 / std::pow(static_cast<double>(rank + 1), 0.95);
}

inline std::string pluralish(const std::string& stem) {
  const auto n = stem.size();
  if (n >= 2 && (stem.compare(n - 1, 1, "s") == 0 || stem.compare(n - 2, 2, "sh") == 0 ||
                 stem.compare(n - 2, 2, "ch") == 0)) {
    return stem + "es";
  }
  return stem + "s";
}

inline std::string pastish(const std::string& stem) {
  return stem.back() == 'e' ? stem + "d" : stem + "ed";
}

// Unique pronounceable stems from a fixed syllable inventory.
class StemFactory {
 public:
  explicit StemFactory(uint64_t seed) : rng_(seed) {}

  std::string make(bool capitalized = false) {
    static const std::vector<std::string> onsets = {
        "b", "c", "d",  "f",  "g",  "h",  "l",  "m",  "n",  "p",  "r",  "s",  "t",
        "w", "br", "cr", "dr", "fl", "gr", "pl", "st", "tr", "th", "sh", "wh"};
    static const std::vector<std::string> vowels = {"a", "e", "i", "o", "u", "ea", "ou", "ai"};
    static const std::vector<std::string> codas = {"",  "b",  "d",  "g",  "k",  "l",
                                                   "m", "n",  "p",  "r",  "t",  "rd",
                                                   "nd", "st", "ck", "ll", "sk"};
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::string stem = onsets[rng_.uniform_index(onsets.size())] +
                         vowels[rng_.uniform_index(vowels.size())] +
                         codas[rng_.uniform_index(codas.size())];
      if (rng_.uniform() < 0.45) {
        stem += onsets[rng_.uniform_index(onsets.size())] + vowels[rng_.uniform_index(vowels.size())] +
                codas[rng_.uniform_index(codas.size())];
      }
      if (stem.size() < 3) continue;
      if (capitalized) stem[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(stem[0])));
      if (used_.insert(stem).second) return stem;
    }
    throw Error("stem factory exhausted; vocabulary too large for the syllable inventory");
  }

  bool reserve(const std::string& w) { return used_.insert(w).second; }

 private:
  Rng rng_;
  std::unordered_set<std::string> used_;
};

// Archaic-style mutation; returns empty when no rule yields a fresh form.
inline std::string mutate_form(const std::string& w,
                               const std::unordered_set<std::string>& taken) {
  std::vector<std::string> candidates;
  if (w.size() > 2 && w.rfind("th", 0) == 0) candidates.push_back("y" + w.substr(2));
  if (w.size() > 1 && w[0] == 'u') candidates.push_back("v" + w.substr(1));
  if (w.size() > 1 && w[0] == 'v') candidates.push_back("u" + w.substr(1));
  if (w.find('i') != std::string::npos) {
    std::string c = w;
    for (char& ch : c)
      if (ch == 'i') ch = 'y';
    candidates.push_back(std::move(c));
  } else if (w.find('y') != std::string::npos) {
    std::string c = w;
    for (char& ch : c)
      if (ch == 'y') ch = 'i';
    candidates.push_back(std::move(c));
  }
  candidates.push_back(w + "e");
  for (auto& c : candidates) {
    if (c != w && !taken.count(c)) return c;
  }
  return "";
}

inline bool all_letters(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

inline SynthResult synth_generate(const SynthConfig& config) {
  if (config.sentences_per_domain < 10) throw Error("synth: need at least 10 sentences per domain");
  Rng rng(config.seed);

  // Closed classes.
  detail::SynthLexicon lex;
  detail::StemFactory stems(config.seed ^ 0xabcd1234ULL);
  auto add_closed = [&](const std::string& tag, const std::vector<std::string>& words) {
    std::size_t r = 0;
    for (const auto& w : words) {
      stems.reserve(w);
      lex.add(tag, w, detail::zipf_weight(r++));
    }
  };
  add_closed("DT", {"the", "a", "this", "that", "these", "those", "every"});
  add_closed("PRP", {"he", "she", "it", "they", "we", "you", "i", "him", "them", "us"});
  add_closed("IN", {"of", "in", "on", "at", "with", "from", "by", "under", "over", "upon"});
  add_closed("CC", {"and", "or", "but"});
  add_closed("TO", {"to"});
  add_closed("RB", {"not", "very", "so", "then", "now", "here", "there", "thus"});
  add_closed(".", {"."});
  add_closed(",", {","});
  add_closed("CD", {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"});
  {
    // Digit and range forms keep the orthographic templates non-degenerate.
    static const std::vector<std::string> digits = {"12",        "40",   "100",
                                                    "1500",      "1569", "1840",
                                                    "1500-1569", "1840-1914"};
    std::size_t r = 10;
    for (const auto& d : digits) {
      stems.reserve(d);
      lex.add("CD", d, detail::zipf_weight(r++) * 0.5);
    }
  }

  // Open classes sized from the vocabulary budget.
  const int v = std::max(config.vocab_size, 60);
  const int n_noun = std::max(16, v * 22 / 100);
  const int n_verb = std::max(10, v * 12 / 100);
  const int n_adj = std::max(10, v * 14 / 100);
  const int n_propn = std::max(6, v * 8 / 100);
  const int n_adv = std::max(4, v * 4 / 100);
  for (int i = 0; i < n_noun; ++i) {
    std::string stem = stems.make();
    lex.add("NN", stem, detail::zipf_weight(static_cast<std::size_t>(i)));
    std::string plural = detail::pluralish(stem);
    if (stems.reserve(plural)) {
      lex.add("NNS", plural, detail::zipf_weight(static_cast<std::size_t>(i)) * 0.8);
    }
  }
  for (int i = 0; i < n_verb; ++i) {
    std::string stem = stems.make();
    lex.add("VB", stem, detail::zipf_weight(static_cast<std::size_t>(i)));
    std::string past = detail::pastish(stem);
    std::string third = detail::pluralish(stem);
    if (stems.reserve(past)) lex.add("VBD", past, detail::zipf_weight(static_cast<std::size_t>(i)));
    if (stems.reserve(third)) lex.add("VBZ", third, detail::zipf_weight(static_cast<std::size_t>(i)));
  }
  for (int i = 0; i < n_adj; ++i) {
    std::string stem = stems.make();
    lex.add("JJ", stem, detail::zipf_weight(static_cast<std::size_t>(i)));
    if (i < n_adv) {
      std::string adv = stem + "ly";
      if (stems.reserve(adv)) lex.add("RB", adv, detail::zipf_weight(static_cast<std::size_t>(i + 8)));
    }
  }
  for (int i = 0; i < n_propn; ++i) {
    lex.add("NNP", stems.make(true), detail::zipf_weight(static_cast<std::size_t>(i)));
  }

  // Template distribution.
  std::vector<double> template_cdf;
  {
    double acc = 0.0;
    for (const auto& t : config.templates) {
      acc += t.weight;
      template_cdf.push_back(acc);
    }
    for (auto& c : template_cdf) c /= template_cdf.back();
  }
  auto pick_template = [&](Rng& r) -> const SynthTemplate& {
    const double u = r.uniform();
    auto it = std::upper_bound(template_cdf.begin(), template_cdf.end(), u);
    std::size_t i = it == template_cdf.end() ? template_cdf.size() - 1
                                             : static_cast<std::size_t>(it - template_cdf.begin());
    return config.templates[i];
  };
  auto pick_tag = [&](const SynthSlot& s, Rng& r) -> const std::string& {
    if (s.tags.size() == 1) return s.tags[0].first;
    double total = 0.0;
    for (const auto& [_, w] : s.tags) total += w;
    double u = r.uniform() * total;
    for (const auto& [tag, w] : s.tags) {
      if (u < w) return tag;
      u -= w;
    }
    return s.tags.back().first;
  };

  auto sample_sentence = [&](Rng& r, const detail::SynthLexicon& use) {
    const SynthTemplate& t = pick_template(r);
    Sentence sent;
    for (const auto& s : t.slots) {
      const std::string& tag = pick_tag(s, r);
      sent.tokens.push_back(Token{use.sample(tag, r), tag});
    }
    return sent;
  };

  auto chunk_into_documents = [&](std::vector<Sentence> sentences, const std::string& corpus_id,
                                  const std::vector<std::string>& epochs) {
    static const std::vector<std::string> genres = {"Letters", "Drama", "Fiction", "Bible"};
    Corpus c;
    c.tagset_name = "ptb";
    const std::size_t per_doc = 100;
    std::size_t doc_idx = 0;
    for (std::size_t begin = 0; begin < sentences.size(); begin += per_doc, ++doc_idx) {
      Document d;
      d.id = corpus_id + "-doc" + std::to_string(doc_idx);
      d.attributes["corpus"] = corpus_id;
      d.attributes["epoch"] = epochs[doc_idx % epochs.size()];
      d.attributes["genre"] = genres[doc_idx % genres.size()];
      const std::size_t end = std::min(sentences.size(), begin + per_doc);
      for (std::size_t s = begin; s < end; ++s) d.sentences.push_back(std::move(sentences[s]));
      c.documents.push_back(std::move(d));
    }
    return c;
  };

  // Source corpus from the full lexicon.
  std::vector<Sentence> source_sents;
  source_sents.reserve(static_cast<std::size_t>(config.sentences_per_domain));
  for (int i = 0; i < config.sentences_per_domain; ++i) source_sents.push_back(sample_sentence(rng, lex));

  // Target sampling is restricted to types realized in the source, so with no
  // mutations the target vocabulary is a subset of the source vocabulary.
  std::unordered_map<std::string, std::pair<std::string, int64_t>> source_types;  // form -> (tag, count)
  for (const auto& s : source_sents)
    for (const auto& t : s.tokens) {
      auto& e = source_types[t.form];
      e.first = t.tag;
      ++e.second;
    }
  detail::SynthLexicon realized;
  {
    std::vector<std::pair<std::string, std::pair<std::string, int64_t>>> items(source_types.begin(),
                                                                               source_types.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second.second != b.second.second) return a.second.second > b.second.second;
      return a.first < b.first;
    });
    for (const auto& [form, tag_count] : items) {
      realized.add(tag_count.first, form, static_cast<double>(tag_count.second));
    }
  }

  std::vector<Sentence> target_sents;
  target_sents.reserve(static_cast<std::size_t>(config.sentences_per_domain));
  for (int i = 0; i < config.sentences_per_domain; ++i) {
    target_sents.push_back(sample_sentence(rng, realized));
  }

  // Mutation candidates: alphabetic types realized in the target, in a seeded
  // permutation. Fraction mode takes a prefix of the permutation, so the OOV
  // rate is monotone in the fraction at a fixed seed.
  std::unordered_map<std::string, int64_t> target_counts;
  int64_t target_tokens = 0;
  for (const auto& s : target_sents)
    for (const auto& t : s.tokens) {
      ++target_counts[t.form];
      ++target_tokens;
    }
  std::vector<std::string> candidates;
  for (const auto& [form, count] : target_counts) {
    if (detail::all_letters(form)) candidates.push_back(form);
  }
  std::sort(candidates.begin(), candidates.end());
  Rng perm_rng(config.seed ^ 0x7031fe2db1c48a95ULL);
  perm_rng.shuffle(candidates);

  std::unordered_set<std::string> taken;
  for (const auto& [form, _] : source_types) taken.insert(form);
  for (const auto& [form, _] : target_counts) taken.insert(form);

  std::unordered_map<std::string, std::string> mutation;  // original -> mutated
  NormalizationLexicon gold;
  gold.set_provenance("synthetic-gold");
  int64_t mutated_tokens = 0;
  auto try_mutate = [&](const std::string& form) -> bool {
    std::string m = detail::mutate_form(form, taken);
    if (m.empty()) return false;
    taken.insert(m);
    mutation.emplace(form, m);
    gold.add(m, form, 1.0);
    mutated_tokens += target_counts[form];
    return true;
  };

  if (config.mutation_fraction >= 0.0) {
    const auto take = static_cast<std::size_t>(config.mutation_fraction *
                                               static_cast<double>(candidates.size()));
    for (std::size_t i = 0; i < take && i < candidates.size(); ++i) try_mutate(candidates[i]);
  } else {
    const double target = config.target_oov_rate;
    const double tol = config.oov_tolerance;
    double rate = 0.0;
    for (const auto& form : candidates) {
      if (rate >= target) break;
      const double share =
          static_cast<double>(target_counts[form]) / static_cast<double>(target_tokens);
      if (rate + share > target + tol) continue;  // this type alone would overshoot
      if (try_mutate(form)) rate += share;
    }
    if (rate < target - tol) {
      throw Error("synth: OOV-rate target " + format_double(target, 4) +
                  " infeasible for this vocabulary (reached " + format_double(rate, 4) + ")");
    }
  }

  for (auto& s : target_sents) {
    for (auto& t : s.tokens) {
      auto it = mutation.find(t.form);
      if (it != mutation.end()) t.form = it->second;
    }
  }

  SynthResult result;
  result.source = chunk_into_documents(std::move(source_sents), "synth-src",
                                       {"1840-1914", "1770-1839"});
  result.target = chunk_into_documents(std::move(target_sents), "synth-tgt",
                                       {"1500-1569", "1570-1639"});
  result.gold = std::move(gold);
  result.mutated_types = mutation.size();
  result.achieved_oov_rate =
      target_tokens > 0 ? static_cast<double>(mutated_tokens) / static_cast<double>(target_tokens) : 0.0;
  result.declared_sentences_per_domain = static_cast<std::size_t>(config.sentences_per_domain);
  return result;
}

}  // namespace histadapt
