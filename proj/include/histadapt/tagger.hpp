// tagger: one-vs-rest L2-regularized squared-hinge linear classification,
// greedy per-token decoding, and hyperparameter sweeps.
#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "histadapt/attributes.hpp"
#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/features.hpp"
#include "histadapt/hybrid.hpp"

namespace histadapt {

// Everything needed to turn a token position into a feature vector. The
// tagger records the pipeline fingerprint so tagging reproduces training.
struct FeaturePipeline {
  const FeatureVocabulary* vocab = nullptr;
  std::vector<const DenseSource*> sources;
  const BrownModel* brown = nullptr;
  const AttributeSpace* space = nullptr;  // defaults to shared-only
  HybridConfig config;

  FlatExample example(const Sentence& sent, std::size_t i, const Document& doc) const {
    static const AttributeSpace shared = AttributeSpace::shared_only();
    Instance inst = extract_instance(sent, i, space ? *space : shared, doc);
    return flatten_hybrid(assemble_hybrid(inst, *vocab, sources, config, brown));
  }

  std::size_t sparse_dim() const { return sparse_dimension(*vocab, brown); }
  std::size_t dense_dim() const {
    std::size_t n = 0;
    for (const auto* s : sources) n += s->dim();
    return n;
  }
};

struct TaggerConfig {
  double c = 0.5;          // SVM regularization parameter
  uint64_t seed = 1;
  int max_epochs = 100;
  double tolerance = 1e-4;  // relative objective change between epochs
  int threads = 1;
};

struct SourceRef {
  std::string name;
  std::size_t dim = 0;
  std::string path = "-";
  std::string hash = "-";
};

class LinearTaggerModel {
 public:
  LinearTaggerModel() = default;

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t sparse_dim() const { return sparse_dim_; }
  std::size_t dense_dim() const { return dense_dim_; }
  double c() const { return c_; }
  uint64_t seed() const { return seed_; }
  uint64_t vocab_hash() const { return vocab_hash_; }
  const std::string& vocab_path() const { return vocab_path_; }
  void set_vocab_path(std::string p) { vocab_path_ = std::move(p); }
  const std::vector<SourceRef>& source_refs() const { return source_refs_; }
  const SourceRef& brown_ref() const { return brown_ref_; }
  bool has_brown() const { return brown_ref_.dim != 0; }
  double dense_scale() const { return dense_scale_; }
  const std::set<int>& dropped_templates() const { return dropped_; }
  const std::vector<double>& objectives() const { return objectives_; }

  const double* weights(std::size_t label) const {
    return w_.data() + label * (sparse_dim_ + dense_dim_);
  }

  double score(std::size_t label, const FlatExample& x) const {
    const double* w = weights(label);
    double s = 0.0;
    for (uint32_t f : x.sparse) s += w[f];
    const double* wd = w + sparse_dim_;
    for (std::size_t d = 0; d < x.dense.size(); ++d) s += wd[d] * x.dense[d];
    return s;
  }

  // Argmax over labels; ties break toward the lexicographically first label
  // (labels_ is sorted, so strict greater-than comparison suffices).
  std::size_t predict(const FlatExample& x) const {
    std::size_t best = 0;
    double best_score = score(0, x);
    for (std::size_t l = 1; l < labels_.size(); ++l) {
      const double s = score(l, x);
      if (s > best_score) {
        best_score = s;
        best = l;
      }
    }
    return best;
  }

  friend LinearTaggerModel train_tagger(const Corpus&, const FeaturePipeline&, const TaggerConfig&);
  friend LinearTaggerModel load_tagger_weights(std::istream&, const std::string&);
  friend void set_tagger_source_paths(LinearTaggerModel&,
                                      const std::vector<std::pair<std::string, std::string>>&,
                                      const std::string&);

 private:
  std::vector<std::string> labels_;
  std::size_t sparse_dim_ = 0, dense_dim_ = 0;
  std::vector<double> w_;  // labels x (sparse + dense)
  double c_ = 0.5;
  uint64_t seed_ = 1;
  uint64_t vocab_hash_ = 0;
  std::string vocab_path_ = "-";
  std::vector<SourceRef> source_refs_;
  SourceRef brown_ref_;
  double dense_scale_ = 1.0;
  std::set<int> dropped_;
  std::vector<double> objectives_;  // per-label final primal objective
};

namespace detail {

// Dual coordinate descent for  min_w 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i)^2.
// Stops when the relative primal objective change over an epoch drops below
// `tolerance`, or at max_epochs.
inline double solve_l2l2_svm(const std::vector<FlatExample>& xs, const std::vector<int8_t>& y,
                             double C, uint64_t seed, int max_epochs, double tolerance,
                             double* w, std::size_t sparse_dim, std::size_t dense_dim) {
  const std::size_t n = xs.size();
  const std::size_t dim = sparse_dim + dense_dim;
  std::fill(w, w + dim, 0.0);
  std::vector<double> alpha(n, 0.0);
  const double diag = 0.5 / C;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);

  auto dot = [&](const FlatExample& x) {
    double s = 0.0;
    for (uint32_t f : x.sparse) s += w[f];
    const double* wd = w + sparse_dim;
    for (std::size_t d = 0; d < x.dense.size(); ++d) s += wd[d] * x.dense[d];
    return s;
  };
  auto axpy = [&](double coef, const FlatExample& x) {
    for (uint32_t f : x.sparse) w[f] += coef;
    double* wd = w + sparse_dim;
    for (std::size_t d = 0; d < x.dense.size(); ++d) wd[d] += coef * x.dense[d];
  };
  auto primal = [&]() {
    double obj = 0.0;
    for (std::size_t d = 0; d < dim; ++d) obj += w[d] * w[d];
    obj *= 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      const double margin = 1.0 - y[i] * dot(xs[i]);
      if (margin > 0.0) obj += C * margin * margin;
    }
    return obj;
  };

  double prev_obj = primal();
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      const FlatExample& x = xs[i];
      const double grad = y[i] * dot(x) - 1.0 + alpha[i] * diag;
      if (alpha[i] == 0.0 && grad >= 0.0) continue;
      const double next = std::max(alpha[i] - grad / (x.squared_norm + diag), 0.0);
      const double delta = next - alpha[i];
      if (delta != 0.0) {
        alpha[i] = next;
        axpy(delta * y[i], x);
      }
    }
    const double obj = primal();
    const double rel = std::abs(prev_obj - obj) / std::max(1e-12, prev_obj);
    prev_obj = obj;
    if (rel < tolerance) break;
  }
  return prev_obj;
}

}  // namespace detail

inline LinearTaggerModel train_tagger(const Corpus& train, const FeaturePipeline& pipeline,
                                      const TaggerConfig& config = {}) {
  if (train.num_tokens() == 0) throw Error("train_tagger: empty training corpus");

  std::set<std::string> label_set;
  for (const auto& doc : train.documents)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent.tokens) label_set.insert(tok.tag);

  LinearTaggerModel model;
  model.labels_.assign(label_set.begin(), label_set.end());
  model.sparse_dim_ = pipeline.sparse_dim();
  model.dense_dim_ = pipeline.dense_dim();
  model.c_ = config.c;
  model.seed_ = config.seed;
  model.vocab_hash_ = pipeline.vocab->hash();
  model.dense_scale_ = pipeline.config.dense_scale;
  model.dropped_ = pipeline.config.dropped_templates;
  for (const auto* src : pipeline.sources) {
    model.source_refs_.push_back(SourceRef{src->name(), src->dim(), "-", "-"});
  }
  if (pipeline.brown) {
    model.brown_ref_ =
        SourceRef{"brown", 5 * (static_cast<std::size_t>(pipeline.brown->clusters()) + 1), "-", "-"};
  }

  std::vector<FlatExample> xs;
  std::vector<std::size_t> gold;
  xs.reserve(train.num_tokens());
  for (const auto& doc : train.documents) {
    for (const auto& sent : doc.sentences) {
      for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
        xs.push_back(pipeline.example(sent, i, doc));
        gold.push_back(static_cast<std::size_t>(
            std::lower_bound(model.labels_.begin(), model.labels_.end(), sent.tokens[i].tag) -
            model.labels_.begin()));
      }
    }
  }

  const std::size_t dim = model.sparse_dim_ + model.dense_dim_;
  model.w_.assign(model.labels_.size() * dim, 0.0);
  model.objectives_.assign(model.labels_.size(), 0.0);

  auto train_label = [&](std::size_t l) {
    std::vector<int8_t> y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) y[i] = gold[i] == l ? 1 : -1;
    model.objectives_[l] = detail::solve_l2l2_svm(
        xs, y, config.c, config.seed + 0x51ab * (l + 1), config.max_epochs, config.tolerance,
        model.w_.data() + l * dim, model.sparse_dim_, model.dense_dim_);
  };

  if (config.threads <= 1) {
    for (std::size_t l = 0; l < model.labels_.size(); ++l) train_label(l);
  } else {
    // One-vs-rest problems are independent.
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (int t = 0; t < config.threads; ++t) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t l;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= model.labels_.size()) return;
            l = next++;
          }
          train_label(l);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return model;
}

inline void check_pipeline_matches(const LinearTaggerModel& model, const FeaturePipeline& pipeline) {
  if (pipeline.vocab->hash() != model.vocab_hash()) {
    throw Error("tagger model was trained against a different vocabulary");
  }
  if (pipeline.sources.size() != model.source_refs().size()) {
    throw Error("tagger model expects " + std::to_string(model.source_refs().size()) +
                " dense sources, got " + std::to_string(pipeline.sources.size()));
  }
  for (std::size_t i = 0; i < pipeline.sources.size(); ++i) {
    const auto& ref = model.source_refs()[i];
    if (pipeline.sources[i]->name() != ref.name || pipeline.sources[i]->dim() != ref.dim) {
      throw Error("dense source mismatch: expected " + ref.name + "/" + std::to_string(ref.dim));
    }
  }
  if (model.has_brown() != (pipeline.brown != nullptr)) {
    throw Error("tagger model Brown attachment does not match the pipeline");
  }
}

// Greedy per-token classification; no structured decoding.
inline std::vector<std::string> tag_sentence(const LinearTaggerModel& model,
                                             const FeaturePipeline& pipeline, const Sentence& sent,
                                             const Document& doc) {
  check_pipeline_matches(model, pipeline);
  std::vector<std::string> tags;
  tags.reserve(sent.tokens.size());
  for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
    tags.push_back(model.labels()[model.predict(pipeline.example(sent, i, doc))]);
  }
  return tags;
}

// Flat predictions over the whole corpus, aligned with flatten_tags(corpus).
inline std::vector<std::string> tag_corpus(const LinearTaggerModel& model,
                                           const FeaturePipeline& pipeline, const Corpus& corpus) {
  check_pipeline_matches(model, pipeline);
  std::vector<std::string> tags;
  tags.reserve(corpus.num_tokens());
  for (const auto& doc : corpus.documents) {
    for (const auto& sent : doc.sentences) {
      for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
        tags.push_back(model.labels()[model.predict(pipeline.example(sent, i, doc))]);
      }
    }
  }
  return tags;
}

struct SweepResult {
  struct Cell {
    double c = 0.0;
    double dev_accuracy = -1.0;
    std::string error;  // non-empty when the cell failed
  };
  std::vector<Cell> grid;
  double selected_c = 0.0;
  double best_accuracy = -1.0;
};

// Trains one model per C value, evaluates token accuracy on dev, and selects
// the best cell; ties break toward the smaller C. Failed cells are recorded.
inline SweepResult sweep(const Corpus& train, const Corpus& dev, const std::vector<double>& c_grid,
                         const FeaturePipeline& pipeline, const TaggerConfig& base = {}) {
  if (c_grid.empty()) throw Error("sweep: empty grid");
  SweepResult result;
  auto gold = flatten_tags(dev);
  for (double c : c_grid) {
    SweepResult::Cell cell;
    cell.c = c;
    try {
      TaggerConfig config = base;
      config.c = c;
      auto model = train_tagger(train, pipeline, config);
      auto pred = tag_corpus(model, pipeline, dev);
      std::size_t hit = 0;
      for (std::size_t i = 0; i < gold.size(); ++i) hit += pred[i] == gold[i];
      cell.dev_accuracy = gold.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(gold.size());
      if (cell.dev_accuracy > result.best_accuracy ||
          (cell.dev_accuracy == result.best_accuracy && c < result.selected_c)) {
        result.best_accuracy = cell.dev_accuracy;
        result.selected_c = c;
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    result.grid.push_back(cell);
  }
  if (result.best_accuracy < 0.0) throw Error("sweep: every grid cell failed");
  return result;
}

// Model file: header, labels, feature-space fingerprint, referenced
// representation models (path + content hash), then per-label weight rows.
inline void save_tagger(const LinearTaggerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "HISTADAPT tagger v1\n";
  out << "labels " << model.labels().size() << "\n";
  for (const auto& l : model.labels()) out << l << "\n";
  out << "sparse-dim " << model.sparse_dim() << "\n";
  out << "dense-dim " << model.dense_dim() << "\n";
  out << "vocab-hash " << hash_hex(model.vocab_hash()) << "\n";
  out << "vocab-path " << model.vocab_path() << "\n";
  out << "c " << format_double(model.c()) << "\n";
  out << "seed " << model.seed() << "\n";
  out << "dense-scale " << format_double(model.dense_scale()) << "\n";
  out << "dropped-templates";
  for (int t : model.dropped_templates()) out << ' ' << t;
  out << "\n";
  out << "sources " << model.source_refs().size() << "\n";
  for (const auto& ref : model.source_refs()) {
    out << ref.name << '\t' << ref.dim << '\t' << ref.path << '\t' << ref.hash << "\n";
  }
  if (model.has_brown()) {
    out << "brown\t" << model.brown_ref().dim << '\t' << model.brown_ref().path << '\t'
        << model.brown_ref().hash << "\n";
  } else {
    out << "brown\t0\t-\t-\n";
  }
  out.precision(17);
  const std::size_t dim = model.sparse_dim() + model.dense_dim();
  for (std::size_t l = 0; l < model.labels().size(); ++l) {
    const double* w = model.weights(l);
    for (std::size_t d = 0; d < dim; ++d) {
      if (d) out << ' ';
      out << w[d];
    }
    out << "\n";
  }
}

inline LinearTaggerModel load_tagger_weights(std::istream& in, const std::string& path) {
  std::string line, key;
  if (!std::getline(in, line) || trim(line) != "HISTADAPT tagger v1") {
    throw Error("bad header in tagger model file: " + path);
  }
  LinearTaggerModel model;
  std::size_t num_labels = 0;
  in >> key >> num_labels;
  std::getline(in, line);
  for (std::size_t l = 0; l < num_labels; ++l) {
    if (!std::getline(in, line)) throw Error("truncated tagger model file: " + path);
    model.labels_.push_back(line);
  }
  std::string hash_str;
  in >> key >> model.sparse_dim_;
  in >> key >> model.dense_dim_;
  in >> key >> hash_str;
  model.vocab_hash_ = std::stoull(hash_str, nullptr, 16);
  in >> key >> model.vocab_path_;
  in >> key >> model.c_;
  in >> key >> model.seed_;
  in >> key >> model.dense_scale_;
  std::getline(in, line);
  std::getline(in, line);  // dropped-templates line
  {
    auto parts = split(trim(line), ' ');
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (!parts[i].empty()) model.dropped_.insert(std::stoi(parts[i]));
    }
  }
  std::size_t num_sources = 0;
  in >> key >> num_sources;
  std::getline(in, line);
  for (std::size_t s = 0; s < num_sources; ++s) {
    if (!std::getline(in, line)) throw Error("truncated tagger model file: " + path);
    auto cols = split(line, '\t');
    if (cols.size() != 4) throw Error("bad source reference in tagger model: " + line);
    model.source_refs_.push_back(SourceRef{cols[0], std::stoull(cols[1]), cols[2], cols[3]});
  }
  if (!std::getline(in, line)) throw Error("truncated tagger model file: " + path);
  {
    auto cols = split(line, '\t');
    if (cols.size() != 4 || cols[0] != "brown") throw Error("bad brown reference in tagger model");
    model.brown_ref_ = SourceRef{"brown", std::stoull(cols[1]), cols[2], cols[3]};
  }
  const std::size_t dim = model.sparse_dim_ + model.dense_dim_;
  model.w_.assign(num_labels * dim, 0.0);
  for (std::size_t l = 0; l < num_labels; ++l) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(in >> model.w_[l * dim + d])) throw Error("truncated weights in tagger model: " + path);
    }
  }
  return model;
}

inline LinearTaggerModel load_tagger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  return load_tagger_weights(in, path);
}

// Records where the attached models live on disk, for the model file.
inline void set_tagger_source_paths(LinearTaggerModel& model,
                                    const std::vector<std::pair<std::string, std::string>>& named_paths,
                                    const std::string& brown_path = "") {
  for (auto& ref : model.source_refs_) {
    for (const auto& [name, p] : named_paths) {
      if (ref.name == name) {
        ref.path = p;
        ref.hash = hash_hex(hash_file(p));
      }
    }
  }
  if (!brown_path.empty() && model.has_brown()) {
    model.brown_ref_.path = brown_path;
    model.brown_ref_.hash = hash_hex(hash_file(brown_path));
  }
}

}  // namespace histadapt
