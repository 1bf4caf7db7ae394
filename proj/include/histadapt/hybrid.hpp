// hybrid: sparse one-hot features plus dense representation blocks.
#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "histadapt/brown.hpp"
#include "histadapt/common.hpp"
#include "histadapt/features.hpp"

namespace histadapt {

// A trained representation model viewed as a per-instance dense block.
class DenseSource {
 public:
  virtual ~DenseSource() = default;
  virtual const std::string& name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual void fill(const Instance& inst, std::vector<double>& out) const = 0;
};

struct HybridConfig {
  double dense_scale = 1.0;          // applied after per-block L2 normalization
  std::set<int> dropped_templates;   // sparse templates excluded (ablation)
};

struct HybridVector {
  struct Block {
    std::string source;
    std::vector<double> values;
  };
  std::vector<std::size_t> sparse_ids;  // global ids, implicit value 1.0
  std::vector<Block> dense;
  std::size_t sparse_dim = 0;

  std::size_t dense_dim() const {
    std::size_t n = 0;
    for (const auto& b : dense) n += b.values.size();
    return n;
  }
};

// Sparse feature space: the 16 template vocabularies, then 5 blocks of Brown
// cluster paths (one per lexical position, C paths + UNK each) when attached.
inline std::size_t sparse_dimension(const FeatureVocabulary& vocab, const BrownModel* brown) {
  std::size_t d = vocab.total_size();
  if (brown) d += 5 * (static_cast<std::size_t>(brown->clusters()) + 1);
  return d;
}

inline HybridVector assemble_hybrid(const Instance& inst, const FeatureVocabulary& vocab,
                                    const std::vector<const DenseSource*>& dense_sources,
                                    const HybridConfig& config = {},
                                    const BrownModel* brown = nullptr) {
  HybridVector out;
  out.sparse_dim = sparse_dimension(vocab, brown);
  for (int t = 0; t < kTemplateCount; ++t) {
    if (config.dropped_templates.count(t)) continue;
    int id = vocab.id(t, inst.active[static_cast<std::size_t>(t)]);
    if (id < 0) continue;  // unseen surface feature contributes nothing
    out.sparse_ids.push_back(vocab.offset(t) + static_cast<std::size_t>(id));
  }
  if (brown) {
    const std::size_t brown_base = vocab.total_size();
    const auto block = static_cast<std::size_t>(brown->clusters()) + 1;
    for (std::size_t pos = 0; pos < 5; ++pos) {
      const BrownModel::Entry* e = brown->find(inst.active[pos]);
      const std::size_t local =
          e ? static_cast<std::size_t>(e->cluster) : block - 1;  // UNK is the last slot
      out.sparse_ids.push_back(brown_base + pos * block + local);
    }
  }
  for (const DenseSource* src : dense_sources) {
    HybridVector::Block block;
    block.source = src->name();
    src->fill(inst, block.values);
    if (block.values.size() != src->dim()) {
      throw Error("dense source '" + src->name() + "' emitted " +
                  std::to_string(block.values.size()) + " values, declared " +
                  std::to_string(src->dim()));
    }
    double sq = 0.0;
    for (double v : block.values) sq += v * v;
    if (sq > 0.0) {
      const double scale = config.dense_scale / std::sqrt(sq);
      for (double& v : block.values) v *= scale;
    }
    out.dense.push_back(std::move(block));
  }
  return out;
}

// Flat [sparse | dense] feature view used by the tagger.
struct FlatExample {
  std::vector<uint32_t> sparse;   // global sparse ids
  std::vector<double> dense;      // concatenated dense blocks
  double squared_norm = 0.0;
};

inline FlatExample flatten_hybrid(const HybridVector& h) {
  FlatExample x;
  x.sparse.reserve(h.sparse_ids.size());
  for (std::size_t id : h.sparse_ids) x.sparse.push_back(static_cast<uint32_t>(id));
  for (const auto& b : h.dense) x.dense.insert(x.dense.end(), b.values.begin(), b.values.end());
  x.squared_norm = static_cast<double>(x.sparse.size());
  for (double v : x.dense) x.squared_norm += v * v;
  return x;
}

}  // namespace histadapt
