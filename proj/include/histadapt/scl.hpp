// scl: structural correspondence learning via pivot prediction and SVD.
//
// Pivots are features occurring more than `pivot_min_count` times in every
// domain. For each pivot, an L2-regularized logistic predictor learns pivot
// presence at an instance from the instance's non-pivot sparse features; the
// stacked predictor weights W (D x P) are reduced to the top-K left singular
// vectors, giving the K x D projection theta.
#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/features.hpp"
#include "histadapt/fema.hpp"  // sigmoid
#include "histadapt/hybrid.hpp"
#include "histadapt/linalg.hpp"

namespace histadapt {

struct SclConfig {
  int64_t pivot_min_count = 50;
  int svd_k = 25;
  double alpha = 1.0;       // rescale coefficient applied after standardization
  double lr = 0.1;
  double l2 = 1e-4;
  int epochs = 2;
  uint64_t seed = 1;
  std::string domain_key = "corpus";
};

// Threshold rule on per-domain counts: pivot iff count > min_count in every domain.
inline std::vector<std::size_t> select_pivots(
    const std::vector<std::unordered_map<std::size_t, int64_t>>& domain_counts,
    int64_t min_count) {
  if (domain_counts.empty()) return {};
  std::vector<std::size_t> pivots;
  for (const auto& [id, count] : domain_counts[0]) {
    if (count <= min_count) continue;
    bool everywhere = true;
    for (std::size_t d = 1; d < domain_counts.size() && everywhere; ++d) {
      auto it = domain_counts[d].find(id);
      everywhere = it != domain_counts[d].end() && it->second > min_count;
    }
    if (everywhere) pivots.push_back(id);
  }
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

class SclModel {
 public:
  SclModel() = default;
  SclModel(std::vector<std::size_t> pivots, std::vector<double> theta, int k, std::size_t dim,
           std::vector<double> mean, std::vector<double> stddev, double alpha, uint64_t vocab_hash)
      : pivots_(std::move(pivots)), theta_(std::move(theta)), k_(k), dim_(dim),
        mean_(std::move(mean)), std_(std::move(stddev)), alpha_(alpha), vocab_hash_(vocab_hash) {}

  int k() const { return k_; }
  std::size_t sparse_dim() const { return dim_; }
  double alpha() const { return alpha_; }
  uint64_t vocab_hash() const { return vocab_hash_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return std_; }

  double theta_at(int row, std::size_t col) const {
    return theta_[static_cast<std::size_t>(row) * dim_ + col];
  }

  // Raw projection theta . x; unseen feature ids contribute nothing. Pivot
  // columns of theta are identically zero, so pivot features drop out.
  std::vector<double> project_raw(const std::vector<std::size_t>& feature_ids) const {
    std::vector<double> y(static_cast<std::size_t>(k_), 0.0);
    for (std::size_t id : feature_ids) {
      if (id >= dim_) continue;
      for (int r = 0; r < k_; ++r) y[static_cast<std::size_t>(r)] += theta_at(r, id);
    }
    return y;
  }

  // Standardized, rescaled projection: ((y - mean) / std) * alpha.
  std::vector<double> project(const std::vector<std::size_t>& feature_ids) const {
    auto y = project_raw(feature_ids);
    for (int r = 0; r < k_; ++r) {
      auto i = static_cast<std::size_t>(r);
      y[i] = (y[i] - mean_[i]) / std_[i] * alpha_;
    }
    return y;
  }

 private:
  std::vector<std::size_t> pivots_;
  std::vector<double> theta_;  // k x dim, row-major
  int k_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> mean_, std_;
  double alpha_ = 1.0;
  uint64_t vocab_hash_ = 0;
};

inline std::vector<double> scl_project(const SclModel& model,
                                       const std::vector<std::size_t>& feature_ids) {
  return model.project(feature_ids);
}

inline SclModel train_scl(const std::vector<const Corpus*>& corpora, const FeatureVocabulary& vocab,
                          const SclConfig& config = {}) {
  // Instances with global feature ids, grouped by domain for pivot counting.
  std::map<std::string, std::size_t> domain_index;
  std::vector<std::vector<std::size_t>> instances;  // 16 ids each
  std::vector<std::unordered_map<std::size_t, int64_t>> domain_counts;
  for (const Corpus* c : corpora) {
    if (!c) continue;
    for (const auto& doc : c->documents) {
      const std::string* dom = doc.attribute(config.domain_key);
      if (!dom) throw Error("document " + doc.id + " lacks domain attribute '" + config.domain_key + "'");
      auto it = domain_index.find(*dom);
      if (it == domain_index.end()) {
        it = domain_index.emplace(*dom, domain_index.size()).first;
        domain_counts.emplace_back();
      }
      auto& counts = domain_counts[it->second];
      for (const auto& sent : doc.sentences) {
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
          auto values = extract_feature_values(sent, i);
          std::vector<std::size_t> ids(kTemplateCount);
          for (int t = 0; t < kTemplateCount; ++t) {
            ids[static_cast<std::size_t>(t)] = vocab.global_id(t, values[static_cast<std::size_t>(t)]);
            ++counts[ids[static_cast<std::size_t>(t)]];
          }
          instances.push_back(std::move(ids));
        }
      }
    }
  }
  if (domain_index.size() < 2) throw Error("SCL needs at least 2 domains distinguishable by '" +
                                           config.domain_key + "'");

  const auto pivots = select_pivots(domain_counts, config.pivot_min_count);
  const auto P = pivots.size();
  if (static_cast<int>(P) < config.svd_k) {
    throw Error("only " + std::to_string(P) + " pivots pass the threshold; need at least " +
                std::to_string(config.svd_k));
  }
  if (P > 4000) {
    throw Error("too many pivots (" + std::to_string(P) + ") for the dense SVD; raise pivot_min_count");
  }
  std::unordered_map<std::size_t, std::size_t> pivot_index;
  for (std::size_t p = 0; p < P; ++p) pivot_index.emplace(pivots[p], p);

  const std::size_t D = vocab.total_size();

  // Per-instance non-pivot features and active-pivot labels.
  struct Example {
    std::vector<uint32_t> x;       // non-pivot global ids
    std::vector<uint32_t> active;  // pivot indices present at the instance
  };
  std::vector<Example> examples;
  examples.reserve(instances.size());
  for (const auto& ids : instances) {
    Example ex;
    for (std::size_t id : ids) {
      auto it = pivot_index.find(id);
      if (it == pivot_index.end()) {
        ex.x.push_back(static_cast<uint32_t>(id));
      } else {
        ex.active.push_back(static_cast<uint32_t>(it->second));
      }
    }
    std::sort(ex.active.begin(), ex.active.end());
    examples.push_back(std::move(ex));
  }
  instances.clear();
  instances.shrink_to_fit();

  // All pivot predictors trained in one pass per epoch; W is feature-major so
  // each touched row is contiguous. Lazy L2 decay with per-row timestamps.
  std::vector<float> w(D * P, 0.0f);
  std::vector<int64_t> last_touch(D, 0);
  std::vector<double> scores(P);
  std::vector<char> label(P);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed);
  int64_t step = 0;
  const double decay_base = 1.0 - config.lr * config.l2;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t oi : order) {
      const Example& ex = examples[oi];
      ++step;
      for (uint32_t f : ex.x) {
        const int64_t behind = step - 1 - last_touch[f];
        if (behind > 0) {
          const auto factor = static_cast<float>(std::pow(decay_base, static_cast<double>(behind)));
          float* row = w.data() + static_cast<std::size_t>(f) * P;
          for (std::size_t p = 0; p < P; ++p) row[p] *= factor;
        }
        last_touch[f] = step;
      }
      std::fill(scores.begin(), scores.end(), 0.0);
      for (uint32_t f : ex.x) {
        const float* row = w.data() + static_cast<std::size_t>(f) * P;
        for (std::size_t p = 0; p < P; ++p) scores[p] += row[p];
      }
      std::fill(label.begin(), label.end(), 0);
      for (uint32_t p : ex.active) label[p] = 1;
      for (std::size_t p = 0; p < P; ++p) {
        scores[p] = config.lr * (sigmoid(scores[p]) - static_cast<double>(label[p]));
      }
      for (uint32_t f : ex.x) {
        float* row = w.data() + static_cast<std::size_t>(f) * P;
        for (std::size_t p = 0; p < P; ++p) row[p] -= static_cast<float>(scores[p]);
      }
    }
  }
  for (std::size_t f = 0; f < D; ++f) {
    const int64_t behind = step - last_touch[f];
    if (behind > 0 && last_touch[f] > 0) {
      const auto factor = static_cast<float>(std::pow(decay_base, static_cast<double>(behind)));
      float* row = w.data() + f * P;
      for (std::size_t p = 0; p < P; ++p) row[p] *= factor;
    }
  }

  // Top-K left singular vectors of W via the P x P Gram matrix.
  std::vector<double> gram(P * P, 0.0);
  for (std::size_t f = 0; f < D; ++f) {
    const float* row = w.data() + f * P;
    bool nonzero = false;
    for (std::size_t p = 0; p < P && !nonzero; ++p) nonzero = row[p] != 0.0f;
    if (!nonzero) continue;
    for (std::size_t p = 0; p < P; ++p) {
      if (row[p] == 0.0f) continue;
      const double rp = row[p];
      for (std::size_t q = p; q < P; ++q) gram[p * P + q] += rp * row[q];
    }
  }
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = 0; q < p; ++q) gram[p * P + q] = gram[q * P + p];

  std::vector<double> eigvals;
  std::vector<std::vector<double>> eigvecs;
  jacobi_eigen_symmetric(std::move(gram), P, eigvals, eigvecs);

  int k = config.svd_k;
  if (eigvals[0] <= 0.0) throw Error("SCL predictor matrix is identically zero");
  // Gram eigenvalues below ~1e-10 of the top one are numerical null space.
  int usable = 0;
  for (int r = 0; r < k; ++r) {
    if (eigvals[static_cast<std::size_t>(r)] > eigvals[0] * 1e-10) ++usable;
  }
  if (usable < k) {
    std::cerr << "scl: W has rank " << usable << " < K=" << k << "; reducing K\n";
    k = usable;
    if (k == 0) throw Error("SCL predictor matrix is identically zero");
  }

  std::vector<double> theta(static_cast<std::size_t>(k) * D, 0.0);
  for (int r = 0; r < k; ++r) {
    const double inv_sigma = 1.0 / std::sqrt(eigvals[static_cast<std::size_t>(r)]);
    const auto& vr = eigvecs[static_cast<std::size_t>(r)];
    double* trow = theta.data() + static_cast<std::size_t>(r) * D;
    for (std::size_t f = 0; f < D; ++f) {
      const float* row = w.data() + f * P;
      double acc = 0.0;
      for (std::size_t p = 0; p < P; ++p) acc += static_cast<double>(row[p]) * vr[p];
      trow[f] = acc * inv_sigma;
    }
  }
  orthonormalize_rows(theta, static_cast<std::size_t>(k), D);

  // Standardization statistics over the training projections.
  SclModel unscaled(pivots, theta, k, D, std::vector<double>(static_cast<std::size_t>(k), 0.0),
                    std::vector<double>(static_cast<std::size_t>(k), 1.0), 1.0, vocab.hash());
  std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
  std::vector<double> sq(static_cast<std::size_t>(k), 0.0);
  std::vector<std::size_t> all_ids;
  for (const auto& ex : examples) {
    all_ids.assign(ex.x.begin(), ex.x.end());
    auto y = unscaled.project_raw(all_ids);
    for (int r = 0; r < k; ++r) {
      mean[static_cast<std::size_t>(r)] += y[static_cast<std::size_t>(r)];
      sq[static_cast<std::size_t>(r)] += y[static_cast<std::size_t>(r)] * y[static_cast<std::size_t>(r)];
    }
  }
  const double n = static_cast<double>(examples.size());
  std::vector<double> stddev(static_cast<std::size_t>(k), 1.0);
  for (int r = 0; r < k; ++r) {
    auto i = static_cast<std::size_t>(r);
    mean[i] /= n;
    const double var = sq[i] / n - mean[i] * mean[i];
    stddev[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return SclModel(std::move(pivots), std::move(theta), k, D, std::move(mean), std::move(stddev),
                  config.alpha, vocab.hash());
}

// Dense block of length K; the instance's features are resolved against the
// same vocabulary the model was trained with.
class SclSource : public DenseSource {
 public:
  SclSource(const SclModel& model, const FeatureVocabulary& vocab)
      : model_(&model), vocab_(&vocab), name_("scl") {
    if (vocab.hash() != model.vocab_hash()) {
      throw Error("SCL model was trained against a different vocabulary");
    }
  }

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return static_cast<std::size_t>(model_->k()); }
  void fill(const Instance& inst, std::vector<double>& out) const override {
    std::vector<std::size_t> ids;
    ids.reserve(kTemplateCount);
    for (int t = 0; t < kTemplateCount; ++t) {
      int id = vocab_->id(t, inst.active[static_cast<std::size_t>(t)]);
      if (id >= 0) ids.push_back(vocab_->offset(t) + static_cast<std::size_t>(id));
    }
    out = model_->project(ids);
  }

 private:
  const SclModel* model_;
  const FeatureVocabulary* vocab_;
  std::string name_;
};

inline void save_scl(const SclModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "HISTADAPT scl v1\n";
  out << "k " << model.k() << "\n";
  out << "sparse-dim " << model.sparse_dim() << "\n";
  out << "alpha " << format_double(model.alpha()) << "\n";
  out << "vocab-hash " << hash_hex(model.vocab_hash()) << "\n";
  out << "pivots " << model.pivots().size() << "\n";
  for (std::size_t i = 0; i < model.pivots().size(); ++i) {
    if (i) out << ' ';
    out << model.pivots()[i];
  }
  out << "\n";
  out.precision(17);
  for (int r = 0; r < model.k(); ++r) {
    for (std::size_t c = 0; c < model.sparse_dim(); ++c) {
      if (c) out << ' ';
      out << model.theta_at(r, c);
    }
    out << "\n";
  }
  for (int r = 0; r < model.k(); ++r) out << (r ? " " : "") << model.mean()[static_cast<std::size_t>(r)];
  out << "\n";
  for (int r = 0; r < model.k(); ++r) out << (r ? " " : "") << model.stddev()[static_cast<std::size_t>(r)];
  out << "\n";
}

inline SclModel load_scl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::string line, key;
  if (!std::getline(in, line) || trim(line) != "HISTADAPT scl v1") {
    throw Error("bad header in SCL model file: " + path);
  }
  int k = 0;
  std::size_t dim = 0, num_pivots = 0;
  double alpha = 1.0;
  std::string hash_str;
  in >> key >> k >> key >> dim >> key >> alpha >> key >> hash_str >> key >> num_pivots;
  std::vector<std::size_t> pivots(num_pivots);
  for (auto& p : pivots) in >> p;
  std::vector<double> theta(static_cast<std::size_t>(k) * dim);
  for (auto& v : theta) in >> v;
  std::vector<double> mean(static_cast<std::size_t>(k)), stddev(static_cast<std::size_t>(k));
  for (auto& v : mean) in >> v;
  for (auto& v : stddev) in >> v;
  if (!in) throw Error("truncated SCL model file: " + path);
  return SclModel(std::move(pivots), std::move(theta), k, dim, std::move(mean), std::move(stddev),
                  alpha, std::stoull(hash_str, nullptr, 16));
}

}  // namespace histadapt
