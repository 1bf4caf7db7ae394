// word2vec: skipgram with negative sampling over running text.
#pragma once

#include <cmath>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/fema.hpp"  // log_sigmoid / sigmoid
#include "histadapt/hybrid.hpp"
#include "histadapt/sampler.hpp"

namespace histadapt {

struct W2vConfig {
  int dim = 100;
  int window = 5;
  int k = 15;
  int epochs = 5;
  double lr = 0.05;
  uint64_t seed = 1;
  int threads = 1;
};

class WordEmbeddingModel {
 public:
  WordEmbeddingModel() = default;
  WordEmbeddingModel(std::vector<std::string> words, int dim, int window, int k)
      : words_(std::move(words)), dim_(dim), window_(window), k_(k) {
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<int>(i));
    input_.assign(words_.size() * static_cast<std::size_t>(dim_), 0.0);
    output_.assign(words_.size() * static_cast<std::size_t>(dim_), 0.0);
  }

  int dim() const { return dim_; }
  int window() const { return window_; }
  int k() const { return k_; }
  std::size_t vocabulary_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  int word_id(const std::string& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? -1 : it->second;
  }

  double* input_row(int w) { return input_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_); }
  const double* input_row(int w) const {
    return input_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
  }
  double* output_row(int w) { return output_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_); }
  const double* output_row(int w) const {
    return output_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
  }

  // nullptr for words outside the training vocabulary.
  const double* lookup(const std::string& w) const {
    int id = word_id(w);
    return id < 0 ? nullptr : input_row(id);
  }

  void init_uniform(uint64_t seed) {
    Rng rng(seed);
    const double half = 0.5 / static_cast<double>(dim_);
    for (double& v : input_) v = rng.uniform(-half, half);
    for (double& v : output_) v = rng.uniform(-half, half);
  }

  bool finite() const {
    for (double v : input_)
      if (!std::isfinite(v)) return false;
    for (double v : output_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  int dim_ = 0, window_ = 5, k_ = 15;
  std::vector<double> input_, output_;
};

// Loss of one (center, context) pair with explicit negatives:
//   -log s(u.v) - sum_j log s(-u.v_j)
inline double sgns_pair_loss(const double* u, const double* v,
                             const std::vector<const double*>& negatives, int dim) {
  double dot = 0.0;
  for (int d = 0; d < dim; ++d) dot += u[d] * v[d];
  double loss = -log_sigmoid(dot);
  for (const double* vn : negatives) {
    double ndot = 0.0;
    for (int d = 0; d < dim; ++d) ndot += u[d] * vn[d];
    loss += -log_sigmoid(-ndot);
  }
  return loss;
}

// Gradient of sgns_pair_loss at fixed parameters.
inline void sgns_pair_gradient(const double* u, const double* v,
                               const std::vector<const double*>& negatives, int dim,
                               std::vector<double>& du, std::vector<double>& dv,
                               std::vector<std::vector<double>>& dnegs) {
  du.assign(static_cast<std::size_t>(dim), 0.0);
  dv.assign(static_cast<std::size_t>(dim), 0.0);
  dnegs.assign(negatives.size(), std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  double dot = 0.0;
  for (int d = 0; d < dim; ++d) dot += u[d] * v[d];
  const double g_pos = sigmoid(dot) - 1.0;
  for (int d = 0; d < dim; ++d) {
    du[static_cast<std::size_t>(d)] += g_pos * v[d];
    dv[static_cast<std::size_t>(d)] += g_pos * u[d];
  }
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    double ndot = 0.0;
    for (int d = 0; d < dim; ++d) ndot += u[d] * negatives[j][d];
    const double g_neg = sigmoid(ndot);
    for (int d = 0; d < dim; ++d) {
      du[static_cast<std::size_t>(d)] += g_neg * negatives[j][d];
      dnegs[j][static_cast<std::size_t>(d)] += g_neg * u[d];
    }
  }
}

inline WordEmbeddingModel train_word_embeddings(const std::vector<const Corpus*>& corpora,
                                                const W2vConfig& config) {
  if (corpora.empty()) throw Error("train_word_embeddings needs at least one corpus");
  std::unordered_map<std::string, int> index;
  std::vector<std::string> order;
  std::vector<int64_t> counts;
  std::vector<std::vector<int>> sentences;
  for (const Corpus* c : corpora) {
    if (!c) continue;
    for (const auto& doc : c->documents) {
      for (const auto& sent : doc.sentences) {
        std::vector<int> ids;
        ids.reserve(sent.tokens.size());
        for (const auto& tok : sent.tokens) {
          auto it = index.find(tok.form);
          if (it == index.end()) {
            it = index.emplace(tok.form, static_cast<int>(order.size())).first;
            order.push_back(tok.form);
            counts.push_back(0);
          }
          ++counts[static_cast<std::size_t>(it->second)];
          ids.push_back(it->second);
        }
        sentences.push_back(std::move(ids));
      }
    }
  }
  if (order.empty()) throw Error("train_word_embeddings: corpora contain no tokens");

  WordEmbeddingModel model(order, config.dim, config.window, config.k);
  model.init_uniform(config.seed);
  auto noise = DiscreteDistribution::from_counts(counts, 0.75);

  const int dim = config.dim;
  std::vector<std::size_t> sent_order(sentences.size());
  for (std::size_t i = 0; i < sent_order.size(); ++i) sent_order[i] = i;
  Rng shuffle_rng(config.seed ^ 0x2c9277b5af3f10c3ULL);
  std::size_t total_tokens = 0;
  for (const auto& s : sentences) total_tokens += s.size();
  const double total_steps = static_cast<double>(total_tokens) * config.epochs;

  auto process_sentence = [&](const std::vector<int>& sent, Rng& rng, double lr) {
    std::vector<double> grad_u(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < sent.size(); ++i) {
      const int center = sent[i];
      double* u = model.input_row(center);
      const long lo = std::max<long>(0, static_cast<long>(i) - config.window);
      const long hi = std::min<long>(static_cast<long>(sent.size()) - 1,
                                     static_cast<long>(i) + config.window);
      for (long j = lo; j <= hi; ++j) {
        if (j == static_cast<long>(i)) continue;
        const int context = sent[static_cast<std::size_t>(j)];
        std::fill(grad_u.begin(), grad_u.end(), 0.0);
        double* v = model.output_row(context);
        double dot = 0.0;
        for (int d = 0; d < dim; ++d) dot += u[d] * v[d];
        const double g_pos = sigmoid(dot) - 1.0;
        for (int d = 0; d < dim; ++d) {
          grad_u[static_cast<std::size_t>(d)] += g_pos * v[d];
          v[d] -= lr * g_pos * u[d];
        }
        for (int n = 0; n < config.k; ++n) {
          const int neg = noise.draw(rng);
          double* vn = model.output_row(neg);
          double ndot = 0.0;
          for (int d = 0; d < dim; ++d) ndot += u[d] * vn[d];
          const double g_neg = sigmoid(ndot);
          for (int d = 0; d < dim; ++d) {
            grad_u[static_cast<std::size_t>(d)] += g_neg * vn[d];
            vn[d] -= lr * g_neg * u[d];
          }
        }
        for (int d = 0; d < dim; ++d) u[d] -= lr * grad_u[static_cast<std::size_t>(d)];
      }
    }
  };

  std::size_t done = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(sent_order);
    if (config.threads <= 1) {
      Rng rng(config.seed + 0x51ed * static_cast<uint64_t>(epoch + 1));
      for (std::size_t si : sent_order) {
        const double lr = config.lr * (1.0 - 0.95 * (static_cast<double>(done) / total_steps));
        process_sentence(sentences[si], rng, lr);
        done += sentences[si].size();
      }
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk =
          (sent_order.size() + static_cast<std::size_t>(config.threads) - 1) /
          static_cast<std::size_t>(config.threads);
      for (int w = 0; w < config.threads; ++w) {
        pool.emplace_back([&, w]() {
          Rng rng(config.seed + 0x51ed * static_cast<uint64_t>(epoch + 1) + static_cast<uint64_t>(w));
          const std::size_t lo = static_cast<std::size_t>(w) * chunk;
          const std::size_t hi = std::min(sent_order.size(), lo + chunk);
          const double lr =
              config.lr * (1.0 - 0.95 * (static_cast<double>(epoch) /
                                         static_cast<double>(config.epochs)));
          for (std::size_t i = lo; i < hi; ++i) process_sentence(sentences[sent_order[i]], rng, lr);
        });
      }
      for (auto& th : pool) th.join();
      done += total_tokens;
    }
  }
  if (!model.finite()) throw Error("training produced non-finite parameters");
  return model;
}

// Dense block: concatenated vectors of the five lexical-window words (5 x dim);
// boundary symbols and unknown words map to zero vectors.
class WordEmbeddingSource : public DenseSource {
 public:
  explicit WordEmbeddingSource(const WordEmbeddingModel& model)
      : model_(&model), name_("skipgram"), dim_(5 * static_cast<std::size_t>(model.dim())) {}

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  void fill(const Instance& inst, std::vector<double>& out) const override {
    const int d = model_->dim();
    out.assign(dim_, 0.0);
    for (int pos = 0; pos < 5; ++pos) {
      const std::string& w = inst.active[static_cast<std::size_t>(pos)];
      if (w == kBosSymbol || w == kEosSymbol) continue;
      const double* vec = model_->lookup(w);
      if (!vec) continue;
      std::copy(vec, vec + d, out.begin() + static_cast<long>(pos) * d);
    }
  }

 private:
  const WordEmbeddingModel* model_;
  std::string name_;
  std::size_t dim_;
};

inline void save_word_embeddings(const WordEmbeddingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "HISTADAPT skipgram v1\n";
  out << "dim " << model.dim() << "\n";
  out << "window " << model.window() << "\n";
  out << "k " << model.k() << "\n";
  out << "rows " << model.vocabulary_size() << "\n";
  out.precision(17);
  for (std::size_t w = 0; w < model.vocabulary_size(); ++w) {
    out << 0 << '\t' << model.words()[w] << '\t';
    const double* vec = model.input_row(static_cast<int>(w));
    for (int d = 0; d < model.dim(); ++d) {
      if (d) out << ' ';
      out << vec[d];
    }
    out << '\n';
  }
}

inline WordEmbeddingModel load_word_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "HISTADAPT skipgram v1") {
    throw Error("bad header in word embedding file: " + path);
  }
  int dim = 0, window = 0, k = 0;
  std::size_t rows = 0;
  std::string key;
  in >> key >> dim >> key >> window >> key >> k >> key >> rows;
  std::getline(in, line);
  std::vector<std::string> words;
  std::vector<std::vector<double>> vectors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw Error("bad word embedding record: " + line);
    words.push_back(cols[1]);
    std::vector<double> vec;
    for (const auto& tok : split(cols[2], ' ')) {
      if (!tok.empty()) vec.push_back(std::stod(tok));
    }
    if (static_cast<int>(vec.size()) != dim) throw Error("bad embedding width in: " + line);
    vectors.push_back(std::move(vec));
  }
  if (words.size() != rows) throw Error("word embedding row count mismatch in " + path);
  WordEmbeddingModel model(words, dim, window, k);
  for (std::size_t w = 0; w < words.size(); ++w) {
    double* row = model.input_row(static_cast<int>(w));
    for (int d = 0; d < dim; ++d) row[d] = vectors[w][static_cast<std::size_t>(d)];
  }
  return model;
}

}  // namespace histadapt
