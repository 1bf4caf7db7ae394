// fema: feature embeddings for domain adaptation, single and multi-attribute.
//
// Every embedded template's active feature is trained to predict the active
// features of all other embedded templates, skipgram-style with negative
// sampling. In attribute mode the input embedding of a feature is the sum of
// the attribute tables selected by the document's z vector; table 0 is shared
// across all documents and serves as the domain-neutral representation.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "histadapt/attributes.hpp"
#include "histadapt/common.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/features.hpp"
#include "histadapt/hybrid.hpp"
#include "histadapt/sampler.hpp"

namespace histadapt {

inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// negatives[t][t'] holds the k sampled feature ids of template t' used when
// template t predicts into t'; the diagonal stays empty.
struct FemaNegatives {
  explicit FemaNegatives(int T) : ids(static_cast<std::size_t>(T) * static_cast<std::size_t>(T)), T_(T) {}
  std::vector<int>& at(int t, int tp) {
    return ids[static_cast<std::size_t>(t) * static_cast<std::size_t>(T_) + static_cast<std::size_t>(tp)];
  }
  const std::vector<int>& at(int t, int tp) const {
    return ids[static_cast<std::size_t>(t) * static_cast<std::size_t>(T_) + static_cast<std::size_t>(tp)];
  }
  std::vector<std::vector<int>> ids;
  int T_;
};

class FeatureEmbeddingModel {
 public:
  FeatureEmbeddingModel() = default;

  // `sizes[t]` feature rows per template; `space.size() - 1` attribute tables
  // beyond the shared one. Single-embedding mode is simply M = 0.
  FeatureEmbeddingModel(std::vector<std::size_t> sizes, int dim, int k, double lambda_attr,
                        AttributeSpace space)
      : sizes_(std::move(sizes)), dim_(dim), k_(k), lambda_attr_(lambda_attr),
        space_(std::move(space)) {
    const auto T = static_cast<std::size_t>(num_templates());
    const auto tables = static_cast<std::size_t>(space_.size());
    input_.resize(tables * T);
    output_.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t m = 0; m < tables; ++m) {
        input_[m * T + t].assign(sizes_[t] * static_cast<std::size_t>(dim_), 0.0);
      }
      output_[t].assign(sizes_[t] * static_cast<std::size_t>(dim_), 0.0);
    }
  }

  int num_templates() const { return static_cast<int>(sizes_.size()); }
  int dim() const { return dim_; }
  int k() const { return k_; }
  double lambda_attr() const { return lambda_attr_; }
  const AttributeSpace& space() const { return space_; }
  std::size_t rows(int t) const { return sizes_[static_cast<std::size_t>(t)]; }

  double* input_row(int m, int t, int f) {
    return input_[static_cast<std::size_t>(m) * sizes_.size() + static_cast<std::size_t>(t)].data() +
           static_cast<std::size_t>(f) * static_cast<std::size_t>(dim_);
  }
  const double* input_row(int m, int t, int f) const {
    return const_cast<FeatureEmbeddingModel*>(this)->input_row(m, t, f);
  }
  double* output_row(int t, int f) {
    return output_[static_cast<std::size_t>(t)].data() +
           static_cast<std::size_t>(f) * static_cast<std::size_t>(dim_);
  }
  const double* output_row(int t, int f) const {
    return const_cast<FeatureEmbeddingModel*>(this)->output_row(t, f);
  }

  // Uniform(-0.5/dim, 0.5/dim) on every table; zero init is a saddle point.
  void init_uniform(uint64_t seed) {
    Rng rng(seed);
    const double half = 0.5 / static_cast<double>(dim_);
    for (auto& table : input_)
      for (double& v : table) v = rng.uniform(-half, half);
    for (auto& table : output_)
      for (double& v : table) v = rng.uniform(-half, half);
  }

  void set_feature_names(int t, std::vector<std::string> names) {
    if (names_.empty()) names_.resize(sizes_.size());
    auto& slot = names_[static_cast<std::size_t>(t)];
    slot = std::move(names);
    if (maps_.empty()) maps_.resize(sizes_.size());
    auto& map = maps_[static_cast<std::size_t>(t)];
    map.clear();
    for (std::size_t i = 0; i < slot.size(); ++i) map.emplace(slot[i], static_cast<int>(i));
  }

  bool has_names() const { return !names_.empty(); }

  const std::string& feature_name(int t, int f) const {
    return names_[static_cast<std::size_t>(t)][static_cast<std::size_t>(f)];
  }

  int feature_row(int t, const std::string& value) const {
    const auto& map = maps_[static_cast<std::size_t>(t)];
    auto it = map.find(value);
    return it == map.end() ? -1 : it->second;
  }

  // Active feature rows for an instance over the 13 embedded templates.
  std::vector<int> resolve(const Instance& inst) const {
    if (num_templates() != kEmbeddedTemplateCount || !has_names()) {
      throw Error("model is not bound to the tagging template inventory");
    }
    std::vector<int> ids(kEmbeddedTemplateCount);
    for (int t = 0; t < kEmbeddedTemplateCount; ++t) {
      int f = feature_row(t, inst.active[static_cast<std::size_t>(t)]);
      if (f < 0) throw Error("feature missing from embedding model: " + inst.qualified(t));
      ids[static_cast<std::size_t>(t)] = f;
    }
    return ids;
  }

  bool finite() const {
    for (const auto& table : input_)
      for (double v : table)
        if (!std::isfinite(v)) return false;
    for (const auto& table : output_)
      for (double v : table)
        if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::vector<std::size_t> sizes_;
  int dim_ = 0;
  int k_ = 0;
  double lambda_attr_ = 0.0;
  AttributeSpace space_ = AttributeSpace::shared_only();
  std::vector<std::vector<double>> input_;   // [m * T + t] -> rows * dim
  std::vector<std::vector<double>> output_;  // [t] -> rows * dim
  std::vector<std::vector<std::string>> names_;
  std::vector<std::unordered_map<std::string, int>> maps_;
};

namespace detail {

// Input vector a_t = sum_m z_m h^(m)_{f(t)}.
inline void fema_input_vector(const FeatureEmbeddingModel& model, const std::vector<uint8_t>& z,
                              int t, int f, std::vector<double>& a) {
  const int dim = model.dim();
  a.assign(static_cast<std::size_t>(dim), 0.0);
  for (int m = 0; m < static_cast<int>(z.size()); ++m) {
    if (!z[static_cast<std::size_t>(m)]) continue;
    const double* h = model.input_row(m, t, f);
    for (int d = 0; d < dim; ++d) a[static_cast<std::size_t>(d)] += h[d];
  }
}

}  // namespace detail

// Negated per-instance objective with explicit negative samples:
//   -(1/T) sum_t sum_{t' != t} [ log s(a.v+) + sum_j log s(-a.v_j) ]
// plus lambda_attr * sum of squared norms of the touched attribute rows.
inline double fema_loss(const FeatureEmbeddingModel& model, const std::vector<int>& ids,
                        const std::vector<uint8_t>& z, const FemaNegatives& negatives) {
  const int T = model.num_templates();
  const int dim = model.dim();
  if (static_cast<int>(ids.size()) != T) throw Error("instance/template arity mismatch");
  for (int t = 0; t < T; ++t) {
    if (ids[static_cast<std::size_t>(t)] < 0 ||
        static_cast<std::size_t>(ids[static_cast<std::size_t>(t)]) >= model.rows(t)) {
      throw Error("missing feature row for template " + std::to_string(t));
    }
  }
  double acc = 0.0;
  std::vector<double> a;
  for (int t = 0; t < T; ++t) {
    detail::fema_input_vector(model, z, t, ids[static_cast<std::size_t>(t)], a);
    for (int tp = 0; tp < T; ++tp) {
      if (tp == t) continue;
      const double* vpos = model.output_row(tp, ids[static_cast<std::size_t>(tp)]);
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += a[static_cast<std::size_t>(d)] * vpos[d];
      acc += log_sigmoid(dot);
      for (int neg : negatives.at(t, tp)) {
        const double* vneg = model.output_row(tp, neg);
        double ndot = 0.0;
        for (int d = 0; d < dim; ++d) ndot += a[static_cast<std::size_t>(d)] * vneg[d];
        acc += log_sigmoid(-ndot);
      }
    }
  }
  double loss = -acc / static_cast<double>(T);
  if (model.lambda_attr() > 0.0) {
    for (int m = 1; m < static_cast<int>(z.size()); ++m) {
      if (!z[static_cast<std::size_t>(m)]) continue;
      for (int t = 0; t < T; ++t) {
        const double* h = model.input_row(m, t, ids[static_cast<std::size_t>(t)]);
        double sq = 0.0;
        for (int d = 0; d < dim; ++d) sq += h[d] * h[d];
        loss += model.lambda_attr() * sq;
      }
    }
  }
  return loss;
}

// Exact gradient of fema_loss at fixed parameters, keyed by touched rows.
struct FemaGradient {
  std::map<std::tuple<int, int, int>, std::vector<double>> input;   // (m, t, row)
  std::map<std::pair<int, int>, std::vector<double>> output;        // (t, row)

  std::vector<double>& input_slot(int m, int t, int f, int dim) {
    auto& g = input[{m, t, f}];
    if (g.empty()) g.assign(static_cast<std::size_t>(dim), 0.0);
    return g;
  }
  std::vector<double>& output_slot(int t, int f, int dim) {
    auto& g = output[{t, f}];
    if (g.empty()) g.assign(static_cast<std::size_t>(dim), 0.0);
    return g;
  }
};

inline FemaGradient fema_gradient(const FeatureEmbeddingModel& model, const std::vector<int>& ids,
                                  const std::vector<uint8_t>& z, const FemaNegatives& negatives) {
  const int T = model.num_templates();
  const int dim = model.dim();
  const double inv_t = 1.0 / static_cast<double>(T);
  FemaGradient grad;
  std::vector<double> a;
  std::vector<double> grad_a(static_cast<std::size_t>(dim));
  for (int t = 0; t < T; ++t) {
    const int f = ids[static_cast<std::size_t>(t)];
    detail::fema_input_vector(model, z, t, f, a);
    std::fill(grad_a.begin(), grad_a.end(), 0.0);
    for (int tp = 0; tp < T; ++tp) {
      if (tp == t) continue;
      const int fp = ids[static_cast<std::size_t>(tp)];
      const double* vpos = model.output_row(tp, fp);
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += a[static_cast<std::size_t>(d)] * vpos[d];
      const double g_pos = inv_t * (sigmoid(dot) - 1.0);
      auto& vpos_grad = grad.output_slot(tp, fp, dim);
      for (int d = 0; d < dim; ++d) {
        grad_a[static_cast<std::size_t>(d)] += g_pos * vpos[d];
        vpos_grad[static_cast<std::size_t>(d)] += g_pos * a[static_cast<std::size_t>(d)];
      }
      for (int neg : negatives.at(t, tp)) {
        const double* vneg = model.output_row(tp, neg);
        double ndot = 0.0;
        for (int d = 0; d < dim; ++d) ndot += a[static_cast<std::size_t>(d)] * vneg[d];
        const double g_neg = inv_t * sigmoid(ndot);
        auto& vneg_grad = grad.output_slot(tp, neg, dim);
        for (int d = 0; d < dim; ++d) {
          grad_a[static_cast<std::size_t>(d)] += g_neg * vneg[d];
          vneg_grad[static_cast<std::size_t>(d)] += g_neg * a[static_cast<std::size_t>(d)];
        }
      }
    }
    for (int m = 0; m < static_cast<int>(z.size()); ++m) {
      if (!z[static_cast<std::size_t>(m)]) continue;
      auto& h_grad = grad.input_slot(m, t, f, dim);
      for (int d = 0; d < dim; ++d) h_grad[static_cast<std::size_t>(d)] += grad_a[static_cast<std::size_t>(d)];
    }
  }
  if (model.lambda_attr() > 0.0) {
    for (int m = 1; m < static_cast<int>(z.size()); ++m) {
      if (!z[static_cast<std::size_t>(m)]) continue;
      for (int t = 0; t < T; ++t) {
        const int f = ids[static_cast<std::size_t>(t)];
        const double* h = model.input_row(m, t, f);
        auto& h_grad = grad.input_slot(m, t, f, dim);
        for (int d = 0; d < dim; ++d) h_grad[static_cast<std::size_t>(d)] += 2.0 * model.lambda_attr() * h[d];
      }
    }
  }
  return grad;
}

struct FemaConfig {
  int dim = 100;
  int k = 15;
  int epochs = 5;
  double lr = 0.05;
  double lambda_attr = 0.1;
  uint64_t seed = 1;
  int threads = 1;
};

namespace detail {

struct CompactFemaInstance {
  std::array<int32_t, kEmbeddedTemplateCount> ids;
  int32_t z_pattern;
};

// One SGD step over an instance: output rows update immediately, input rows
// once per template after its pair loop. Returns the pre-update loss terms
// when `track_loss` is set, otherwise 0 (skips the log evaluations).
inline double fema_sgd_step(FeatureEmbeddingModel& model, const CompactFemaInstance& inst,
                            const std::vector<std::vector<uint8_t>>& z_patterns,
                            const NegativeSampler& sampler, double lr, Rng& rng,
                            bool track_loss) {
  const int T = model.num_templates();
  const int dim = model.dim();
  const int k = model.k();
  const double inv_t = 1.0 / static_cast<double>(T);
  const double lambda = model.lambda_attr();
  const auto& z = z_patterns[static_cast<std::size_t>(inst.z_pattern)];
  double acc = 0.0;
  double reg_total = 0.0;
  std::vector<double> a(static_cast<std::size_t>(dim));
  std::vector<double> grad_a(static_cast<std::size_t>(dim));
  for (int t = 0; t < T; ++t) {
    const int f = inst.ids[static_cast<std::size_t>(t)];
    fema_input_vector(model, z, t, f, a);
    std::fill(grad_a.begin(), grad_a.end(), 0.0);
    for (int tp = 0; tp < T; ++tp) {
      if (tp == t) continue;
      const int fp = inst.ids[static_cast<std::size_t>(tp)];
      double* vpos = model.output_row(tp, fp);
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += a[static_cast<std::size_t>(d)] * vpos[d];
      if (track_loss) acc += log_sigmoid(dot);
      const double g_pos = inv_t * (sigmoid(dot) - 1.0);
      for (int d = 0; d < dim; ++d) {
        grad_a[static_cast<std::size_t>(d)] += g_pos * vpos[d];
        vpos[d] -= lr * g_pos * a[static_cast<std::size_t>(d)];
      }
      for (int j = 0; j < k; ++j) {
        const int neg = sampler.sample(tp, rng);
        double* vneg = model.output_row(tp, neg);
        double ndot = 0.0;
        for (int d = 0; d < dim; ++d) ndot += a[static_cast<std::size_t>(d)] * vneg[d];
        if (track_loss) acc += log_sigmoid(-ndot);
        const double g_neg = inv_t * sigmoid(ndot);
        for (int d = 0; d < dim; ++d) {
          grad_a[static_cast<std::size_t>(d)] += g_neg * vneg[d];
          vneg[d] -= lr * g_neg * a[static_cast<std::size_t>(d)];
        }
      }
    }
    for (int m = 0; m < static_cast<int>(z.size()); ++m) {
      if (!z[static_cast<std::size_t>(m)]) continue;
      double* h = model.input_row(m, t, f);
      if (m >= 1 && lambda > 0.0) {
        double sq = 0.0;
        for (int d = 0; d < dim; ++d) sq += h[d] * h[d];
        reg_total += lambda * sq;
        const double decay = 1.0 - 2.0 * lr * lambda;
        for (int d = 0; d < dim; ++d) h[d] = h[d] * decay - lr * grad_a[static_cast<std::size_t>(d)];
      } else {
        for (int d = 0; d < dim; ++d) h[d] -= lr * grad_a[static_cast<std::size_t>(d)];
      }
    }
  }
  return -acc * inv_t + reg_total;
}

}  // namespace detail

// Stochastic-gradient training over every token instance of the corpora.
// Single-threaded runs are bit-reproducible for a fixed seed; multi-threaded
// runs update parameters lock-free and may vary.
inline FeatureEmbeddingModel train_fema(const std::vector<const Corpus*>& corpora,
                                        const FeatureVocabulary& vocab, const AttributeSpace& space,
                                        const FemaConfig& config,
                                        std::vector<double>* epoch_mean_loss = nullptr) {
  if (corpora.empty()) throw Error("train_fema needs at least one corpus");
  std::size_t total_tokens = 0;
  for (const Corpus* c : corpora) total_tokens += c ? c->num_tokens() : 0;
  if (total_tokens == 0) throw Error("train_fema: corpora contain no tokens");

  std::vector<std::size_t> sizes(kEmbeddedTemplateCount);
  for (int t = 0; t < kEmbeddedTemplateCount; ++t) sizes[static_cast<std::size_t>(t)] = vocab.template_size(t);
  FeatureEmbeddingModel model(sizes, config.dim, config.k, config.lambda_attr, space);
  model.init_uniform(config.seed);
  for (int t = 0; t < kEmbeddedTemplateCount; ++t) {
    std::vector<std::string> names(vocab.template_size(t));
    for (std::size_t i = 0; i < names.size(); ++i) names[i] = vocab.value(t, static_cast<int>(i));
    model.set_feature_names(t, std::move(names));
  }

  // Materialize compact instances; documents share z patterns.
  std::vector<std::vector<uint8_t>> z_patterns;
  std::map<std::vector<uint8_t>, int32_t> z_index;
  std::vector<detail::CompactFemaInstance> data;
  data.reserve(total_tokens);
  for (const Corpus* c : corpora) {
    if (!c) continue;
    for (const auto& doc : c->documents) {
      auto z = space.z_for(doc);
      auto it = z_index.find(z);
      if (it == z_index.end()) {
        it = z_index.emplace(z, static_cast<int32_t>(z_patterns.size())).first;
        z_patterns.push_back(z);
      }
      const int32_t zid = it->second;
      for (const auto& sent : doc.sentences) {
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
          auto values = extract_feature_values(sent, i);
          detail::CompactFemaInstance ci;
          ci.z_pattern = zid;
          for (int t = 0; t < kEmbeddedTemplateCount; ++t) {
            int id = vocab.id(t, values[static_cast<std::size_t>(t)]);
            if (id < 0) throw Error("vocabulary does not cover training corpus: " + values[static_cast<std::size_t>(t)]);
            ci.ids[static_cast<std::size_t>(t)] = id;
          }
          data.push_back(ci);
        }
      }
    }
  }

  NegativeSampler sampler(vocab);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle_rng(config.seed ^ 0x5bf0f3ed4a2c1dbeULL);

  const double total_steps = static_cast<double>(data.size()) * config.epochs;
  const bool track_loss = epoch_mean_loss != nullptr;
  std::size_t done = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    if (config.threads <= 1) {
      Rng rng(config.seed + 0x9e37 * static_cast<uint64_t>(epoch + 1));
      for (std::size_t idx : order) {
        const double progress = static_cast<double>(done++) / total_steps;
        const double lr = config.lr * (1.0 - 0.95 * progress);
        epoch_loss +=
            detail::fema_sgd_step(model, data[idx], z_patterns, sampler, lr, rng, track_loss);
      }
    } else {
      const int workers = config.threads;
      std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
      std::vector<std::thread> pool;
      const std::size_t chunk = (order.size() + static_cast<std::size_t>(workers) - 1) /
                                static_cast<std::size_t>(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          Rng rng(config.seed + 0x9e37 * static_cast<uint64_t>(epoch + 1) + static_cast<uint64_t>(w));
          const std::size_t lo = static_cast<std::size_t>(w) * chunk;
          const std::size_t hi = std::min(order.size(), lo + chunk);
          for (std::size_t i = lo; i < hi; ++i) {
            const double progress =
                (static_cast<double>(epoch) * static_cast<double>(order.size()) + static_cast<double>(i)) /
                total_steps;
            const double lr = config.lr * (1.0 - 0.95 * progress);
            losses[static_cast<std::size_t>(w)] +=
                detail::fema_sgd_step(model, data[order[i]], z_patterns, sampler, lr, rng, track_loss);
          }
        });
      }
      for (auto& th : pool) th.join();
      for (double l : losses) epoch_loss += l;
      done += order.size();
    }
    const double mean = epoch_loss / static_cast<double>(data.size());
    if (!std::isfinite(mean)) {
      throw Error("non-finite training loss at epoch " + std::to_string(epoch) +
                  "; lower the learning rate");
    }
    if (epoch_mean_loss) epoch_mean_loss->push_back(mean);
  }
  if (!model.finite()) throw Error("training produced non-finite parameters");
  return model;
}

// Domain-neutral representation: concatenated shared-table rows of the 13
// embedded templates. Independent of the instance's attribute vector.
inline std::vector<double> fema_vector(const FeatureEmbeddingModel& model, const Instance& inst) {
  const auto ids = model.resolve(inst);
  const int dim = model.dim();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kEmbeddedTemplateCount) * static_cast<std::size_t>(dim));
  for (int t = 0; t < kEmbeddedTemplateCount; ++t) {
    const double* h = model.input_row(0, t, ids[static_cast<std::size_t>(t)]);
    out.insert(out.end(), h, h + dim);
  }
  return out;
}

// Mean L2 norm over all rows of the attribute-specific tables (m >= 1).
inline double mean_attribute_row_norm(const FeatureEmbeddingModel& model) {
  const int T = model.num_templates();
  const int dim = model.dim();
  double sum = 0.0;
  std::size_t rows = 0;
  for (int m = 1; m < model.space().size(); ++m) {
    for (int t = 0; t < T; ++t) {
      for (std::size_t f = 0; f < model.rows(t); ++f) {
        const double* h = model.input_row(m, t, static_cast<int>(f));
        double sq = 0.0;
        for (int d = 0; d < dim; ++d) sq += h[d] * h[d];
        sum += std::sqrt(sq);
        ++rows;
      }
    }
  }
  return rows == 0 ? 0.0 : sum / static_cast<double>(rows);
}

class FemaSource : public DenseSource {
 public:
  explicit FemaSource(const FeatureEmbeddingModel& model)
      : model_(&model), name_("fema"),
        dim_(static_cast<std::size_t>(kEmbeddedTemplateCount) * static_cast<std::size_t>(model.dim())) {}

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  void fill(const Instance& inst, std::vector<double>& out) const override {
    out = fema_vector(*model_, inst);
  }

 private:
  const FeatureEmbeddingModel* model_;
  std::string name_;
  std::size_t dim_;
};

// On disk we keep the shared (domain-neutral) table only: that is the model's
// downstream surface. Records are `template-index<TAB>feature<TAB>floats`.
inline void save_fema(const FeatureEmbeddingModel& model, const std::string& path) {
  if (!model.has_names()) throw Error("cannot save an unbound embedding model");
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  out << "HISTADAPT fema v1\n";
  out << "dim " << model.dim() << "\n";
  out << "templates " << model.num_templates() << "\n";
  out << "k " << model.k() << "\n";
  out << "lambda " << format_double(model.lambda_attr()) << "\n";
  out << "attributes";
  for (const auto& n : model.space().names()) out << ' ' << n;
  out << "\n";
  std::size_t rows = 0;
  for (int t = 0; t < model.num_templates(); ++t) rows += model.rows(t);
  out << "rows " << rows << "\n";
  out.precision(17);
  for (int t = 0; t < model.num_templates(); ++t) {
    for (std::size_t f = 0; f < model.rows(t); ++f) {
      out << t << '\t' << model.feature_name(t, static_cast<int>(f)) << '\t';
      const double* h = model.input_row(0, t, static_cast<int>(f));
      for (int d = 0; d < model.dim(); ++d) {
        if (d) out << ' ';
        out << h[d];
      }
      out << '\n';
    }
  }
}

inline FeatureEmbeddingModel load_fema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "HISTADAPT fema v1") {
    throw Error("bad header in embedding model file: " + path);
  }
  int dim = 0, T = 0, k = 0;
  double lambda = 0.0;
  std::size_t rows = 0;
  std::string key;
  in >> key >> dim >> key >> T >> key >> k >> key >> lambda;
  std::getline(in, line);           // rest of lambda line
  std::getline(in, line);           // attributes line (informational)
  in >> key >> rows;
  std::getline(in, line);
  std::vector<std::vector<std::pair<std::string, std::vector<double>>>> per_template(
      static_cast<std::size_t>(T));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw Error("truncated embedding model file: " + path);
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw Error("bad embedding record: " + line);
    int t = std::stoi(cols[0]);
    std::vector<double> vec;
    for (const auto& tok : split(cols[2], ' ')) {
      if (!tok.empty()) vec.push_back(std::stod(tok));
    }
    if (static_cast<int>(vec.size()) != dim) throw Error("bad embedding width in: " + line);
    per_template[static_cast<std::size_t>(t)].emplace_back(cols[1], std::move(vec));
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) sizes[static_cast<std::size_t>(t)] = per_template[static_cast<std::size_t>(t)].size();
  FeatureEmbeddingModel model(sizes, dim, k, lambda, AttributeSpace::shared_only());
  for (int t = 0; t < T; ++t) {
    std::vector<std::string> names;
    for (std::size_t f = 0; f < per_template[static_cast<std::size_t>(t)].size(); ++f) {
      auto& [name, vec] = per_template[static_cast<std::size_t>(t)][f];
      names.push_back(name);
      double* h = model.input_row(0, t, static_cast<int>(f));
      for (int d = 0; d < dim; ++d) h[d] = vec[static_cast<std::size_t>(d)];
    }
    model.set_feature_names(t, std::move(names));
  }
  return model;
}

}  // namespace histadapt
