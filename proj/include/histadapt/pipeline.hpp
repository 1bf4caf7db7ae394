// pipeline: the end-to-end synthetic adaptation experiment behind `replicate`.
//
// Per seed: generate a domain-shifted corpus pair, train every representation
// on the unlabeled union, train taggers on labeled source data, evaluate on
// the target domain, and repeat the baseline and feature-embedding runs on the
// gold-normalized target. Emits a comparison table over seeds.
#pragma once

#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "histadapt/brown.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/eval.hpp"
#include "histadapt/fema.hpp"
#include "histadapt/normalize.hpp"
#include "histadapt/scl.hpp"
#include "histadapt/synth.hpp"
#include "histadapt/tagger.hpp"
#include "histadapt/word2vec.hpp"

namespace histadapt {

struct ReplicateConfig {
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  int sentences_per_domain = 2000;
  int vocab_size = 1200;
  double target_oov_rate = 0.23;
  double oov_tolerance = 0.02;

  int dim = 50;            // FEMA and skipgram embedding size
  int neg = 5;
  int epochs = 3;
  double lr = 0.05;
  double lambda_attr = 0.1;
  std::vector<std::string> attribute_keys = {"corpus", "epoch", "genre"};

  int clusters = 64;       // Brown
  int brown_window = 64;   // classic C-sized active set; 0 -> 2 * clusters

  int64_t pivot_min = 50;  // SCL
  int svd_k = 25;

  double c = 0.5;          // tagger regularization
  double dense_scale = 4.0;  // post-normalization dense block scale; 4 = sqrt(16)
                             // puts a block on par with the 16 sparse features
  double threshold = 0.5;  // normalization confidence threshold
  int threads = 1;
  std::string out_dir;     // artifacts written here when non-empty
};

struct SeedResult {
  uint64_t seed = 0;
  double achieved_oov = 0.0;
  std::map<std::string, EvalReport> by_method;
  OverlapReport norm_vs_fema;
};

struct ReplicateResult {
  std::vector<SeedResult> seeds;
  std::vector<std::string> method_order;

  double mean(const std::string& method, double (EvalReport::*stat)() const) const {
    double acc = 0.0;
    for (const auto& s : seeds) acc += (s.by_method.at(method).*stat)();
    return seeds.empty() ? 0.0 : acc / static_cast<double>(seeds.size());
  }
};

namespace detail {

inline EvalReport run_method(const Corpus& train, const Corpus& test,
                             const std::unordered_set<std::string>& train_vocab,
                             const FeaturePipeline& pipeline, const TaggerConfig& config) {
  auto model = train_tagger(train, pipeline, config);
  auto pred = tag_corpus(model, pipeline, test);
  return evaluate(test, pred, train_vocab);
}

}  // namespace detail

inline SeedResult replicate_seed(const ReplicateConfig& config, uint64_t seed, std::ostream& log) {
  SeedResult result;
  result.seed = seed;

  SynthConfig synth;
  synth.vocab_size = config.vocab_size;
  synth.sentences_per_domain = config.sentences_per_domain;
  synth.target_oov_rate = config.target_oov_rate;
  synth.oov_tolerance = config.oov_tolerance;
  synth.seed = seed;
  auto data = synth_generate(synth);
  result.achieved_oov = data.achieved_oov_rate;
  log << "seed " << seed << ": target OOV rate " << std::fixed << std::setprecision(3)
      << data.achieved_oov_rate << " (" << data.mutated_types << " mutated types)\n";

  const Corpus& source = data.source;
  const Corpus& target = data.target;
  auto train_vocab = source.vocabulary();
  auto gold_target = flatten_tags(target);

  TaggerConfig tagger_config;
  tagger_config.c = config.c;
  tagger_config.seed = seed;
  tagger_config.threads = config.threads;

  std::vector<const Corpus*> union_corpora = {&source, &target};
  auto vocab = build_vocabulary(union_corpora);

  // Baseline: pure sparse features. Dense pipelines share the scale setting.
  FeaturePipeline base;
  base.vocab = &vocab;
  base.config.dense_scale = config.dense_scale;
  auto baseline_model = train_tagger(source, base, tagger_config);
  auto baseline_pred = tag_corpus(baseline_model, base, target);
  result.by_method["baseline"] = evaluate(target, baseline_pred, train_vocab);
  log << "  baseline            all=" << result.by_method["baseline"].overall() << "\n";

  // SCL.
  {
    SclConfig scl_config;
    scl_config.pivot_min_count = config.pivot_min;
    scl_config.svd_k = config.svd_k;
    scl_config.seed = seed;
    auto scl_model = train_scl(union_corpora, vocab, scl_config);
    SclSource source_block(scl_model, vocab);
    FeaturePipeline p = base;
    p.sources = {&source_block};
    result.by_method["scl"] = detail::run_method(source, target, train_vocab, p, tagger_config);
    log << "  scl                 all=" << result.by_method["scl"].overall() << "\n";
  }

  // Brown clusters over the unlabeled union.
  {
    Corpus unlabeled = merge_corpora(union_corpora);
    auto brown = train_brown(unlabeled, config.clusters, config.brown_window);
    FeaturePipeline p = base;
    p.brown = &brown;
    result.by_method["brown"] = detail::run_method(source, target, train_vocab, p, tagger_config);
    log << "  brown               all=" << result.by_method["brown"].overall() << "\n";
  }

  // Skipgram word embeddings.
  {
    W2vConfig w2v;
    w2v.dim = config.dim;
    w2v.k = config.neg;
    w2v.epochs = config.epochs;
    w2v.lr = config.lr;
    w2v.seed = seed;
    w2v.threads = config.threads;
    auto w2v_model = train_word_embeddings(union_corpora, w2v);
    WordEmbeddingSource block(w2v_model);
    FeaturePipeline p = base;
    p.sources = {&block};
    result.by_method["skipgram"] = detail::run_method(source, target, train_vocab, p, tagger_config);
    log << "  skipgram            all=" << result.by_method["skipgram"].overall() << "\n";
  }

  // FEMA single and attribute modes.
  FemaConfig fema_config;
  fema_config.dim = config.dim;
  fema_config.k = config.neg;
  fema_config.epochs = config.epochs;
  fema_config.lr = config.lr;
  fema_config.lambda_attr = config.lambda_attr;
  fema_config.seed = seed;
  fema_config.threads = config.threads;

  std::vector<std::string> fema_pred_single;
  {
    auto space = AttributeSpace::shared_only();
    auto fema_model = train_fema(union_corpora, vocab, space, fema_config);
    FemaSource block(fema_model);
    FeaturePipeline p = base;
    p.sources = {&block};
    auto model = train_tagger(source, p, tagger_config);
    fema_pred_single = tag_corpus(model, p, target);
    result.by_method["fema-single"] = evaluate(target, fema_pred_single, train_vocab);
    log << "  fema-single         all=" << result.by_method["fema-single"].overall() << "\n";
  }
  {
    auto space = AttributeSpace::from_corpora(union_corpora, config.attribute_keys);
    auto fema_model = train_fema(union_corpora, vocab, space, fema_config);
    FemaSource block(fema_model);
    FeaturePipeline p = base;
    p.sources = {&block};
    result.by_method["fema-attr"] = detail::run_method(source, target, train_vocab, p, tagger_config);
    log << "  fema-attr           all=" << result.by_method["fema-attr"].overall() << "\n";
  }

  // Gold-lexicon normalization of the target; the baseline model is reused.
  auto [target_norm, norm_report] =
      apply_normalization(target, data.gold, config.threshold, &train_vocab);
  std::vector<std::string> norm_pred;
  {
    norm_pred = tag_corpus(baseline_model, base, target_norm);
    result.by_method["normalized"] = evaluate(target_norm, norm_pred, train_vocab);
    log << "  normalized          all=" << result.by_method["normalized"].overall()
        << " (oov " << norm_report.oov_rate_before << " -> " << norm_report.oov_rate_after << ")\n";
  }

  // Normalization plus feature embeddings, trained on the normalized union.
  {
    std::vector<const Corpus*> union2 = {&source, &target_norm};
    auto vocab2 = build_vocabulary(union2);
    auto space = AttributeSpace::shared_only();
    auto fema_model = train_fema(union2, vocab2, space, fema_config);
    FemaSource block(fema_model);
    FeaturePipeline p;
    p.vocab = &vocab2;
    p.sources = {&block};
    auto model = train_tagger(source, p, tagger_config);
    auto pred = tag_corpus(model, p, target_norm);
    result.by_method["norm+fema"] = evaluate(target_norm, pred, train_vocab);
    log << "  norm+fema           all=" << result.by_method["norm+fema"].overall() << "\n";
  }

  result.norm_vs_fema = error_overlap(target, baseline_pred, norm_pred, fema_pred_single);
  return result;
}

inline void write_replicate_table(const ReplicateResult& result, std::ostream& out) {
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(14) << "system" << std::right << std::setw(8) << "IV"
      << std::setw(8) << "OOV" << std::setw(8) << "All" << "\n";
  for (const auto& method : result.method_order) {
    out << std::left << std::setw(14) << method << std::right << std::setw(8)
        << 100.0 * result.mean(method, &EvalReport::iv_accuracy) << std::setw(8)
        << 100.0 * result.mean(method, &EvalReport::oov_accuracy) << std::setw(8)
        << 100.0 * result.mean(method, &EvalReport::overall) << "\n";
  }
}

inline ReplicateResult run_replicate(const ReplicateConfig& config, std::ostream& log) {
  ReplicateResult result;
  result.method_order = {"baseline",    "scl",        "brown",      "skipgram",
                         "fema-single", "fema-attr",  "normalized", "norm+fema"};
  for (uint64_t seed : config.seeds) {
    result.seeds.push_back(replicate_seed(config, seed, log));
  }
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream table(config.out_dir + "/comparison.txt");
    write_replicate_table(result, table);
    std::ofstream kv(config.out_dir + "/comparison.tsv");
    for (const auto& method : result.method_order) {
      kv << method << '\t' << format_double(result.mean(method, &EvalReport::iv_accuracy)) << '\t'
         << format_double(result.mean(method, &EvalReport::oov_accuracy)) << '\t'
         << format_double(result.mean(method, &EvalReport::overall)) << '\n';
    }
    std::ofstream cfg(config.out_dir + "/replicate.config");
    cfg << "[replicate]\n";
    cfg << "seeds =";
    for (uint64_t s : config.seeds) cfg << ' ' << s;
    cfg << "\nsentences = " << config.sentences_per_domain << "\n";
    cfg << "vocab = " << config.vocab_size << "\n";
    cfg << "dim = " << config.dim << "\n";
    cfg << "neg = " << config.neg << "\n";
    cfg << "epochs = " << config.epochs << "\n";
    cfg << "clusters = " << config.clusters << "\n";
    cfg << "pivot-min = " << config.pivot_min << "\n";
    cfg << "svd-k = " << config.svd_k << "\n";
    cfg << "c = " << format_double(config.c, 6) << "\n";
    cfg << "threshold = " << format_double(config.threshold, 6) << "\n";
    cfg << "oov-target = " << format_double(config.target_oov_rate, 6) << "\n";
  }
  return result;
}

}  // namespace histadapt
