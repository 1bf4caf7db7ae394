// sampler: count^power noise distributions for negative sampling.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "histadapt/common.hpp"
#include "histadapt/features.hpp"

namespace histadapt {

class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  static DiscreteDistribution from_counts(const std::vector<int64_t>& counts, double power) {
    DiscreteDistribution d;
    d.cumulative_.resize(counts.size());
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      total += std::pow(static_cast<double>(counts[i]), power);
      d.cumulative_[i] = total;
    }
    if (total <= 0.0) throw Error("cannot build distribution from empty counts");
    for (auto& c : d.cumulative_) c /= total;
    d.cumulative_.back() = 1.0;
    return d;
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

  double prob(std::size_t i) const {
    return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// Per-template noise distribution, probability proportional to count^0.75.
class NegativeSampler {
 public:
  explicit NegativeSampler(const FeatureVocabulary& vocab, double power = 0.75) {
    for (int t = 0; t < kTemplateCount; ++t) {
      if (vocab.template_size(t) > 0) {
        dists_[static_cast<std::size_t>(t)] = DiscreteDistribution::from_counts(vocab.counts(t), power);
      }
    }
  }

  int sample(int t, Rng& rng) const { return dists_[static_cast<std::size_t>(t)].draw(rng); }

  const DiscreteDistribution& distribution(int t) const {
    return dists_[static_cast<std::size_t>(t)];
  }

 private:
  std::array<DiscreteDistribution, kTemplateCount> dists_;
};

}  // namespace histadapt
