// histadapt command-line tool: data prep, representation training, tagging,
// normalization, evaluation, and the synthetic replication pipeline.
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "histadapt/brown.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/eval.hpp"
#include "histadapt/fema.hpp"
#include "histadapt/normalize.hpp"
#include "histadapt/pipeline.hpp"
#include "histadapt/scl.hpp"
#include "histadapt/synth.hpp"
#include "histadapt/tagmap.hpp"
#include "histadapt/tagger.hpp"
#include "histadapt/word2vec.hpp"

namespace {

using namespace histadapt;

CorpusFormat parse_format(const std::string& name) {
  if (name == "two-column") return CorpusFormat::two_column;
  if (name == "directive-header" || name == "directive") return CorpusFormat::directive_header;
  throw Error("unknown corpus format: " + name);
}

Corpus load_corpus(const std::string& path, const std::string& format) {
  return parse_corpus_file(path, parse_format(format));
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split(csv, ',')) {
    if (!trim(item).empty()) out.push_back(std::stod(trim(item)));
  }
  return out;
}

std::vector<uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<uint64_t> out;
  for (const auto& item : split(csv, ',')) {
    if (!trim(item).empty()) out.push_back(std::stoull(trim(item)));
  }
  return out;
}

TagMapper load_mapper(const std::string& mapping_path, bool remap_q) {
  TagMapper mapper =
      mapping_path.empty() ? TagMapper::builtin_pche_ptb() : TagMapper::load(mapping_path);
  mapper.set_remap_q(remap_q);
  return mapper;
}

// Owns whatever representation models a tagger needs at run time.
struct LoadedSources {
  std::unique_ptr<FeatureEmbeddingModel> fema;
  std::unique_ptr<WordEmbeddingModel> w2v;
  std::unique_ptr<SclModel> scl;
  std::unique_ptr<BrownModel> brown;
  std::vector<std::unique_ptr<DenseSource>> dense;

  std::vector<const DenseSource*> pointers() const {
    std::vector<const DenseSource*> out;
    for (const auto& d : dense) out.push_back(d.get());
    return out;
  }
};

void attach_method(LoadedSources& loaded, const std::string& method, const std::string& model_path,
                   const FeatureVocabulary& vocab) {
  if (method == "none" || method.empty()) return;
  if (model_path.empty()) throw Error("--method " + method + " requires --model");
  if (method == "fema" || method == "fema-attr") {
    loaded.fema = std::make_unique<FeatureEmbeddingModel>(load_fema(model_path));
    loaded.dense.push_back(std::make_unique<FemaSource>(*loaded.fema));
  } else if (method == "skipgram") {
    loaded.w2v = std::make_unique<WordEmbeddingModel>(load_word_embeddings(model_path));
    loaded.dense.push_back(std::make_unique<WordEmbeddingSource>(*loaded.w2v));
  } else if (method == "scl") {
    loaded.scl = std::make_unique<SclModel>(load_scl(model_path));
    loaded.dense.push_back(std::make_unique<SclSource>(*loaded.scl, vocab));
  } else if (method == "brown") {
    loaded.brown = std::make_unique<BrownModel>(load_brown(model_path));
  } else {
    throw Error("unknown method: " + method);
  }
}

void verify_ref(const SourceRef& ref) {
  if (ref.path == "-") throw Error("tagger model does not record a path for source '" + ref.name + "'");
  const std::string actual = hash_hex(hash_file(ref.path));
  if (actual != ref.hash) {
    throw Error("content hash mismatch for " + ref.path + " (expected " + ref.hash + ")");
  }
}

// Reconstructs the tagging pipeline recorded in a tagger model file.
struct LoadedTagger {
  LinearTaggerModel model;
  FeatureVocabulary vocab;
  LoadedSources sources;

  FeaturePipeline pipeline() const {
    FeaturePipeline p;
    p.vocab = &vocab;
    p.sources = sources.pointers();
    p.brown = sources.brown.get();
    p.config.dense_scale = model.dense_scale();
    p.config.dropped_templates = model.dropped_templates();
    return p;
  }
};

LoadedTagger load_tagger_bundle(const std::string& path) {
  LoadedTagger bundle;
  bundle.model = load_tagger(path);
  if (bundle.model.vocab_path() == "-") throw Error("tagger model does not record a vocabulary path");
  bundle.vocab = FeatureVocabulary::load(bundle.model.vocab_path());
  if (bundle.vocab.hash() != bundle.model.vocab_hash()) {
    throw Error("vocabulary file " + bundle.model.vocab_path() + " does not match the tagger model");
  }
  for (const auto& ref : bundle.model.source_refs()) {
    verify_ref(ref);
    if (ref.name == "fema") {
      bundle.sources.fema = std::make_unique<FeatureEmbeddingModel>(load_fema(ref.path));
      bundle.sources.dense.push_back(std::make_unique<FemaSource>(*bundle.sources.fema));
    } else if (ref.name == "skipgram") {
      bundle.sources.w2v = std::make_unique<WordEmbeddingModel>(load_word_embeddings(ref.path));
      bundle.sources.dense.push_back(std::make_unique<WordEmbeddingSource>(*bundle.sources.w2v));
    } else if (ref.name == "scl") {
      bundle.sources.scl = std::make_unique<SclModel>(load_scl(ref.path));
      bundle.sources.dense.push_back(std::make_unique<SclSource>(*bundle.sources.scl, bundle.vocab));
    } else {
      throw Error("tagger model references unknown source kind: " + ref.name);
    }
  }
  if (bundle.model.has_brown()) {
    verify_ref(bundle.model.brown_ref());
    bundle.sources.brown = std::make_unique<BrownModel>(load_brown(bundle.model.brown_ref().path));
  }
  return bundle;
}

void write_tagged_corpus(const Corpus& corpus, const std::vector<std::vector<std::string>>& tags,
                         const std::string& path) {
  Corpus out = corpus;
  std::size_t si = 0;
  for (auto& doc : out.documents) {
    for (auto& sent : doc.sentences) {
      const auto& predicted = tags[si++];
      for (std::size_t i = 0; i < sent.tokens.size(); ++i) sent.tokens[i].tag = predicted[i];
    }
  }
  write_corpus_file(out, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"part-of-speech tagging under domain shift: representation learning,\n"
               "spelling normalization, and IV/OOV-aware evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "line-oriented `key = value` config with [subcommand] sections");

  std::string format = "directive-header";
  app.add_option("--format", format, "corpus file format: two-column | directive-header")
      ->capture_default_str();

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand("stats", "per-attribute sentence/token counts");
  std::string stats_input, stats_group = "corpus";
  stats_cmd->add_option("--input", stats_input, "corpus file")->required();
  stats_cmd->add_option("--group-by", stats_group, "attribute to group by")->capture_default_str();

  // ---- split ----
  auto* split_cmd = app.add_subcommand("split", "sentence-level train/dev split");
  std::string split_input, split_train_out, split_dev_out;
  double split_fraction = 0.1;
  uint64_t split_seed = 1;
  split_cmd->add_option("--input", split_input)->required();
  split_cmd->add_option("--output-train", split_train_out)->required();
  split_cmd->add_option("--output-dev", split_dev_out)->required();
  split_cmd->add_option("--dev-fraction", split_fraction)->capture_default_str();
  split_cmd->add_option("--seed", split_seed)->capture_default_str();

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic domain-shifted corpus pair");
  std::string synth_dir;
  SynthConfig synth_config;
  double synth_fraction = -1.0;
  synth_cmd->add_option("--out-dir", synth_dir, "output directory")->required();
  synth_cmd->add_option("--sentences", synth_config.sentences_per_domain)->capture_default_str();
  synth_cmd->add_option("--vocab", synth_config.vocab_size)->capture_default_str();
  synth_cmd->add_option("--seed", synth_config.seed)->capture_default_str();
  synth_cmd->add_option("--oov-target", synth_config.target_oov_rate)->capture_default_str();
  synth_cmd->add_option("--tolerance", synth_config.oov_tolerance)->capture_default_str();
  synth_cmd->add_option("--mutation-fraction", synth_fraction,
                        "mutate this fraction of target types instead of targeting an OOV rate");

  // ---- map-tags ----
  auto* map_cmd = app.add_subcommand("map-tags", "convert PCHE tags to the PTB tagset");
  std::string map_input, map_output, map_mapping;
  bool map_remap_q = false;
  map_cmd->add_option("--input", map_input)->required();
  map_cmd->add_option("--output", map_output)->required();
  map_cmd->add_option("--mapping", map_mapping, "mapping file (default: bundled PCHE->PTB table)");
  map_cmd->add_flag("--remap-q", map_remap_q, "map Q to DT instead of JJ");

  // ---- embed ----
  auto* embed_cmd = app.add_subcommand("embed", "train a representation model on unlabeled corpora");
  std::string embed_method, embed_output;
  std::vector<std::string> embed_inputs;
  int embed_dim = 100, embed_neg = 15, embed_epochs = 5, embed_clusters = 200, embed_window = 5;
  int embed_svd_k = 25, embed_brown_window = 0, embed_threads = 1;
  int64_t embed_pivot_min = 50;
  double embed_lr = 0.05, embed_lambda = 0.1;
  uint64_t embed_seed = 1;
  std::vector<std::string> embed_attrs = {"corpus", "epoch", "genre"};
  embed_cmd->add_option("--method", embed_method, "fema | fema-attr | scl | brown | skipgram")
      ->required();
  embed_cmd->add_option("--input", embed_inputs, "corpus files (repeatable)")->required();
  embed_cmd->add_option("--output", embed_output, "model file; <output>.vocab is written too")
      ->required();
  embed_cmd->add_option("--dim", embed_dim)->capture_default_str();
  embed_cmd->add_option("--neg", embed_neg)->capture_default_str();
  embed_cmd->add_option("--epochs", embed_epochs)->capture_default_str();
  embed_cmd->add_option("--lr", embed_lr)->capture_default_str();
  embed_cmd->add_option("--lambda-attr", embed_lambda)->capture_default_str();
  embed_cmd->add_option("--clusters", embed_clusters)->capture_default_str();
  embed_cmd->add_option("--brown-window", embed_brown_window, "0 selects 2x clusters");
  embed_cmd->add_option("--window", embed_window, "skipgram context window")->capture_default_str();
  embed_cmd->add_option("--pivot-min", embed_pivot_min)->capture_default_str();
  embed_cmd->add_option("--svd-k", embed_svd_k)->capture_default_str();
  embed_cmd->add_option("--seed", embed_seed)->capture_default_str();
  embed_cmd->add_option("--threads", embed_threads)->capture_default_str();
  embed_cmd->add_option("--attrs", embed_attrs, "metadata keys for fema-attr");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train the classification tagger");
  std::string train_input, train_output, train_method = "none", train_model, train_vocab_path;
  std::vector<std::string> train_unlabeled;
  double train_c = 0.5, train_scale = 1.0;
  uint64_t train_seed = 1;
  int train_threads = 1;
  train_cmd->add_option("--train", train_input, "labeled training corpus")->required();
  train_cmd->add_option("--output", train_output, "tagger model file")->required();
  train_cmd->add_option("--unlabeled", train_unlabeled,
                        "additional corpora for the feature vocabulary union");
  train_cmd->add_option("--method", train_method, "none | fema | fema-attr | scl | brown | skipgram")
      ->capture_default_str();
  train_cmd->add_option("--model", train_model, "representation model file for --method");
  train_cmd->add_option("--vocab", train_vocab_path,
                        "vocabulary file (defaults to the union built from inputs)");
  train_cmd->add_option("--c", train_c, "SVM regularization parameter")->capture_default_str();
  train_cmd->add_option("--scale", train_scale, "dense block scale")->capture_default_str();
  train_cmd->add_option("--seed", train_seed)->capture_default_str();
  train_cmd->add_option("--threads", train_threads)->capture_default_str();

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep the SVM regularization grid on dev data");
  std::string sweep_train, sweep_dev, sweep_grid = "0.1,0.3,0.5,0.8,1.0";
  std::string sweep_method = "none", sweep_model, sweep_vocab;
  double sweep_scale = 1.0;
  uint64_t sweep_seed = 1;
  int sweep_threads = 1;
  sweep_cmd->add_option("--train", sweep_train)->required();
  sweep_cmd->add_option("--dev", sweep_dev)->required();
  sweep_cmd->add_option("--grid", sweep_grid, "comma-separated C values")->capture_default_str();
  sweep_cmd->add_option("--method", sweep_method)->capture_default_str();
  sweep_cmd->add_option("--model", sweep_model);
  sweep_cmd->add_option("--vocab", sweep_vocab);
  sweep_cmd->add_option("--scale", sweep_scale)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_seed)->capture_default_str();
  sweep_cmd->add_option("--threads", sweep_threads)->capture_default_str();

  // ---- tag ----
  auto* tag_cmd = app.add_subcommand("tag", "tag a corpus with a trained model");
  std::string tag_model, tag_input, tag_output;
  tag_cmd->add_option("--model", tag_model)->required();
  tag_cmd->add_option("--input", tag_input)->required();
  tag_cmd->add_option("--output", tag_output)->required();

  // ---- normalize ----
  auto* norm_cmd = app.add_subcommand("normalize", "apply a spelling-replacement lexicon");
  std::string norm_input, norm_lexicon, norm_output, norm_ref;
  double norm_threshold = 0.5;
  norm_cmd->add_option("--input", norm_input)->required();
  norm_cmd->add_option("--lexicon", norm_lexicon)->required();
  norm_cmd->add_option("--output", norm_output)->required();
  norm_cmd->add_option("--threshold", norm_threshold)->capture_default_str();
  norm_cmd->add_option("--ref-vocab", norm_ref, "corpus whose forms define the OOV reference");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "IV/OOV-aware evaluation of a tagged file");
  std::string eval_gold, eval_pred, eval_train_vocab, eval_output;
  eval_cmd->add_option("--gold", eval_gold)->required();
  eval_cmd->add_option("--pred", eval_pred)->required();
  eval_cmd->add_option("--train-vocab", eval_train_vocab, "training corpus defining IV forms")
      ->required();
  eval_cmd->add_option("--output", eval_output, "also write a key<TAB>value report here");

  // ---- ablate ----
  auto* ablate_cmd = app.add_subcommand("ablate", "feature-group ablation table");
  std::string ablate_train, ablate_test;
  std::string ablate_groups = "word-context,prefix,suffix,affix,orthographic";
  double ablate_c = 0.5;
  uint64_t ablate_seed = 1;
  int ablate_threads = 1;
  ablate_cmd->add_option("--train", ablate_train)->required();
  ablate_cmd->add_option("--test", ablate_test)->required();
  ablate_cmd->add_option("--groups", ablate_groups)->capture_default_str();
  ablate_cmd->add_option("--c", ablate_c)->capture_default_str();
  ablate_cmd->add_option("--seed", ablate_seed)->capture_default_str();
  ablate_cmd->add_option("--threads", ablate_threads)->capture_default_str();

  // ---- overlap ----
  auto* overlap_cmd = app.add_subcommand("overlap", "error overlap of two systems vs a baseline");
  std::string ov_gold, ov_baseline, ov_a, ov_b;
  overlap_cmd->add_option("--gold", ov_gold)->required();
  overlap_cmd->add_option("--baseline", ov_baseline)->required();
  overlap_cmd->add_option("--a", ov_a)->required();
  overlap_cmd->add_option("--b", ov_b)->required();

  // ---- replicate ----
  auto* rep_cmd = app.add_subcommand("replicate", "full synthetic adaptation experiment");
  ReplicateConfig rep_config;
  std::string rep_seeds = "1,2,3,4,5";
  rep_cmd->add_option("--out-dir", rep_config.out_dir)->required();
  rep_cmd->add_option("--seeds", rep_seeds, "comma-separated seeds")->capture_default_str();
  rep_cmd->add_option("--sentences", rep_config.sentences_per_domain)->capture_default_str();
  rep_cmd->add_option("--vocab", rep_config.vocab_size)->capture_default_str();
  rep_cmd->add_option("--oov-target", rep_config.target_oov_rate)->capture_default_str();
  rep_cmd->add_option("--dim", rep_config.dim)->capture_default_str();
  rep_cmd->add_option("--neg", rep_config.neg)->capture_default_str();
  rep_cmd->add_option("--epochs", rep_config.epochs)->capture_default_str();
  rep_cmd->add_option("--lambda-attr", rep_config.lambda_attr)->capture_default_str();
  rep_cmd->add_option("--clusters", rep_config.clusters)->capture_default_str();
  rep_cmd->add_option("--pivot-min", rep_config.pivot_min)->capture_default_str();
  rep_cmd->add_option("--svd-k", rep_config.svd_k)->capture_default_str();
  rep_cmd->add_option("--c", rep_config.c)->capture_default_str();
  rep_cmd->add_option("--scale", rep_config.dense_scale)->capture_default_str();
  rep_cmd->add_option("--threshold", rep_config.threshold)->capture_default_str();
  rep_cmd->add_option("--threads", rep_config.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
  }

  try {
    if (*stats_cmd) {
      auto corpus = load_corpus(stats_input, format);
      auto rows = corpus_stats(corpus, stats_group);
      std::printf("%-24s %12s %12s\n", stats_group.c_str(), "sentences", "tokens");
      for (const auto& row : rows) {
        std::printf("%-24s %12zu %12zu\n", row.value.c_str(), row.sentences, row.tokens);
      }
    } else if (*split_cmd) {
      auto corpus = load_corpus(split_input, format);
      auto [train, dev] = split_train_dev(corpus, split_fraction, split_seed);
      write_corpus_file(train, split_train_out);
      write_corpus_file(dev, split_dev_out);
      std::cout << "train: " << train.num_sentences() << " sentences, dev: " << dev.num_sentences()
                << " sentences\n";
    } else if (*synth_cmd) {
      synth_config.mutation_fraction = synth_fraction;
      auto result = synth_generate(synth_config);
      std::filesystem::create_directories(synth_dir);
      write_corpus_file(result.source, synth_dir + "/source.tsv");
      write_corpus_file(result.target, synth_dir + "/target.tsv");
      save_lexicon(result.gold, synth_dir + "/gold_lexicon.tsv");
      std::ofstream cfg(synth_dir + "/synth.config");
      cfg << "[synth]\n";
      cfg << "sentences = " << synth_config.sentences_per_domain << "\n";
      cfg << "vocab = " << synth_config.vocab_size << "\n";
      cfg << "seed = " << synth_config.seed << "\n";
      if (synth_config.mutation_fraction >= 0.0) {
        cfg << "mutation-fraction = " << format_double(synth_config.mutation_fraction, 6) << "\n";
      } else {
        cfg << "oov-target = " << format_double(synth_config.target_oov_rate, 6) << "\n";
        cfg << "tolerance = " << format_double(synth_config.oov_tolerance, 6) << "\n";
      }
      std::cout << "sentences_per_domain=" << result.declared_sentences_per_domain << "\n"
                << "source_tokens=" << result.source.num_tokens() << "\n"
                << "target_tokens=" << result.target.num_tokens() << "\n"
                << "mutated_types=" << result.mutated_types << "\n"
                << "achieved_oov_rate=" << format_double(result.achieved_oov_rate, 6) << "\n";
    } else if (*map_cmd) {
      auto mapper = load_mapper(map_mapping, map_remap_q);
      auto corpus = load_corpus(map_input, format);
      write_corpus_file(map_corpus_tags(corpus, mapper), map_output);
      std::cout << "mapped " << corpus.num_tokens() << " tokens\n";
    } else if (*embed_cmd) {
      std::vector<Corpus> corpora;
      for (const auto& p : embed_inputs) corpora.push_back(load_corpus(p, format));
      std::vector<const Corpus*> ptrs;
      for (const auto& c : corpora) ptrs.push_back(&c);
      auto vocab = build_vocabulary(ptrs);
      vocab.save(embed_output + ".vocab");
      if (embed_method == "fema" || embed_method == "fema-attr") {
        FemaConfig config;
        config.dim = embed_dim;
        config.k = embed_neg;
        config.epochs = embed_epochs;
        config.lr = embed_lr;
        config.lambda_attr = embed_lambda;
        config.seed = embed_seed;
        config.threads = embed_threads;
        auto space = embed_method == "fema-attr" ? AttributeSpace::from_corpora(ptrs, embed_attrs)
                                                 : AttributeSpace::shared_only();
        auto model = train_fema(ptrs, vocab, space, config);
        save_fema(model, embed_output);
      } else if (embed_method == "skipgram") {
        W2vConfig config;
        config.dim = embed_dim;
        config.window = embed_window;
        config.k = embed_neg;
        config.epochs = embed_epochs;
        config.lr = embed_lr;
        config.seed = embed_seed;
        config.threads = embed_threads;
        save_word_embeddings(train_word_embeddings(ptrs, config), embed_output);
      } else if (embed_method == "scl") {
        SclConfig config;
        config.pivot_min_count = embed_pivot_min;
        config.svd_k = embed_svd_k;
        config.seed = embed_seed;
        save_scl(train_scl(ptrs, vocab, config), embed_output);
      } else if (embed_method == "brown") {
        Corpus merged = merge_corpora(ptrs);
        save_brown(train_brown(merged, embed_clusters, embed_brown_window), embed_output);
      } else {
        throw Error("unknown method: " + embed_method);
      }
      std::cout << "wrote " << embed_output << " and " << embed_output << ".vocab\n";
    } else if (*train_cmd) {
      auto train_corpus = load_corpus(train_input, format);
      std::vector<Corpus> extra;
      for (const auto& p : train_unlabeled) extra.push_back(load_corpus(p, format));
      FeatureVocabulary vocab;
      std::string vocab_out;
      if (!train_vocab_path.empty()) {
        vocab = FeatureVocabulary::load(train_vocab_path);
        vocab_out = train_vocab_path;
      } else {
        std::vector<const Corpus*> ptrs = {&train_corpus};
        for (const auto& c : extra) ptrs.push_back(&c);
        vocab = build_vocabulary(ptrs);
        vocab_out = train_output + ".vocab";
        vocab.save(vocab_out);
      }
      LoadedSources loaded;
      attach_method(loaded, train_method, train_model, vocab);
      FeaturePipeline pipeline;
      pipeline.vocab = &vocab;
      pipeline.sources = loaded.pointers();
      pipeline.brown = loaded.brown.get();
      pipeline.config.dense_scale = train_scale;
      TaggerConfig config;
      config.c = train_c;
      config.seed = train_seed;
      config.threads = train_threads;
      auto model = train_tagger(train_corpus, pipeline, config);
      model.set_vocab_path(vocab_out);
      if (!train_model.empty()) {
        std::vector<std::pair<std::string, std::string>> named;
        if (train_method == "brown") {
          set_tagger_source_paths(model, named, train_model);
        } else {
          named.emplace_back(train_method == "fema-attr" ? "fema" : train_method, train_model);
          set_tagger_source_paths(model, named);
        }
      }
      save_tagger(model, train_output);
      std::cout << "trained " << model.labels().size() << " labels on " << train_corpus.num_tokens()
                << " tokens; wrote " << train_output << "\n";
    } else if (*sweep_cmd) {
      auto train_corpus = load_corpus(sweep_train, format);
      auto dev_corpus = load_corpus(sweep_dev, format);
      FeatureVocabulary vocab;
      if (!sweep_vocab.empty()) {
        vocab = FeatureVocabulary::load(sweep_vocab);
      } else {
        vocab = build_vocabulary({&train_corpus, &dev_corpus});
      }
      LoadedSources loaded;
      attach_method(loaded, sweep_method, sweep_model, vocab);
      FeaturePipeline pipeline;
      pipeline.vocab = &vocab;
      pipeline.sources = loaded.pointers();
      pipeline.brown = loaded.brown.get();
      pipeline.config.dense_scale = sweep_scale;
      TaggerConfig config;
      config.seed = sweep_seed;
      config.threads = sweep_threads;
      auto result = sweep(train_corpus, dev_corpus, parse_double_list(sweep_grid), pipeline, config);
      std::printf("%8s %12s\n", "C", "dev-acc");
      for (const auto& cell : result.grid) {
        if (cell.error.empty()) {
          std::printf("%8.3g %12.4f\n", cell.c, cell.dev_accuracy);
        } else {
          std::printf("%8.3g %12s (%s)\n", cell.c, "failed", cell.error.c_str());
        }
      }
      std::printf("selected C=%g (dev accuracy %.4f)\n", result.selected_c, result.best_accuracy);
    } else if (*tag_cmd) {
      auto bundle = load_tagger_bundle(tag_model);
      auto corpus = load_corpus(tag_input, format);
      auto pipeline = bundle.pipeline();
      std::vector<std::vector<std::string>> tags;
      for (const auto& doc : corpus.documents) {
        for (const auto& sent : doc.sentences) {
          tags.push_back(tag_sentence(bundle.model, pipeline, sent, doc));
        }
      }
      write_tagged_corpus(corpus, tags, tag_output);
      std::cout << "tagged " << corpus.num_tokens() << " tokens\n";
    } else if (*norm_cmd) {
      auto corpus = load_corpus(norm_input, format);
      auto lexicon = load_lexicon(norm_lexicon);
      if (lexicon.rejected_multi_token() > 0) {
        std::cerr << "warning: ignored " << lexicon.rejected_multi_token()
                  << " multi-token normalization rows\n";
      }
      std::unordered_set<std::string> ref;
      std::optional<Corpus> ref_corpus;
      if (!norm_ref.empty()) {
        ref_corpus = load_corpus(norm_ref, format);
        ref = ref_corpus->vocabulary();
      }
      auto [normalized, report] =
          apply_normalization(corpus, lexicon, norm_threshold, norm_ref.empty() ? nullptr : &ref);
      write_corpus_file(normalized, norm_output);
      print_normalization_report(report, std::cout);
    } else if (*eval_cmd) {
      auto gold = load_corpus(eval_gold, format);
      auto pred = load_corpus(eval_pred, format);
      if (pred.num_tokens() != gold.num_tokens()) {
        throw Error("gold and predicted token counts differ");
      }
      auto train_corpus = load_corpus(eval_train_vocab, format);
      auto report = evaluate(gold, flatten_tags(pred), train_corpus.vocabulary());
      print_eval_report(report, std::cout);
      if (!eval_output.empty()) {
        std::ofstream out(eval_output);
        write_eval_report_kv(report, out);
      }
    } else if (*ablate_cmd) {
      auto train_corpus = load_corpus(ablate_train, format);
      auto test_corpus = load_corpus(ablate_test, format);
      auto vocab = build_vocabulary({&train_corpus, &test_corpus});
      FeaturePipeline pipeline;
      pipeline.vocab = &vocab;
      TaggerConfig config;
      config.c = ablate_c;
      config.seed = ablate_seed;
      config.threads = ablate_threads;
      std::vector<std::string> groups;
      for (const auto& g : split(ablate_groups, ',')) {
        if (!trim(g).empty()) groups.push_back(trim(g));
      }
      auto rows = ablation_run(train_corpus, test_corpus, groups, pipeline, config);
      std::printf("%-16s %8s %8s %8s\n", "features", "IV", "OOV", "All");
      for (const auto& row : rows) {
        std::printf("%-16s %8.2f %8.2f %8.2f\n", row.name.c_str(), 100.0 * row.report.iv_accuracy(),
                    100.0 * row.report.oov_accuracy(), 100.0 * row.report.overall());
      }
    } else if (*overlap_cmd) {
      auto gold = load_corpus(ov_gold, format);
      auto base = flatten_tags(load_corpus(ov_baseline, format));
      auto a = flatten_tags(load_corpus(ov_a, format));
      auto b = flatten_tags(load_corpus(ov_b, format));
      auto report = error_overlap(gold, base, a, b);
      std::cout << "corrected_by_a=" << report.corrected_a << "\n"
                << "corrected_by_b=" << report.corrected_b << "\n"
                << "intersection=" << report.intersection << "\n"
                << "fraction_of_a=" << format_double(report.fraction_of_a, 6)
                << (report.a_empty ? " (empty A)" : "") << "\n"
                << "fraction_of_b=" << format_double(report.fraction_of_b, 6)
                << (report.b_empty ? " (empty B)" : "") << "\n";
    } else if (*rep_cmd) {
      rep_config.seeds = parse_seed_list(rep_seeds);
      if (rep_config.seeds.empty()) throw Error("--seeds must name at least one seed");
      auto result = run_replicate(rep_config, std::cout);
      std::cout << "\n";
      write_replicate_table(result, std::cout);
      std::cout << "table written to " << rep_config.out_dir << "/comparison.txt\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
