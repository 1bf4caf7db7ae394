#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "histadapt/sampler.hpp"

using namespace histadapt;

TEST_SUITE("sampler") {

TEST_CASE("probabilities follow count^0.75 and sum to one") {
  std::vector<int64_t> counts = {1, 16, 81, 256};
  auto dist = DiscreteDistribution::from_counts(counts, 0.75);
  double total = 0.0, norm = 0.0;
  for (int64_t c : counts) norm += std::pow(static_cast<double>(c), 0.75);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = std::pow(static_cast<double>(counts[i]), 0.75) / norm;
    CHECK(dist.prob(i) == doctest::Approx(expected).epsilon(1e-12));
    total += dist.prob(i);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical frequencies match the noise distribution within 3 sigma") {
  std::vector<int64_t> counts = {3, 7, 19, 50, 120, 310, 800, 2000, 41, 5, 65, 13, 220, 9, 100, 550};
  auto dist = DiscreteDistribution::from_counts(counts, 0.75);
  const std::size_t draws = 1000000;
  std::vector<std::size_t> hits(counts.size(), 0);
  Rng rng(42);
  for (std::size_t i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(dist.draw(rng))];
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p = dist.prob(i);
    const double expected = p * static_cast<double>(draws);
    const double sigma = std::sqrt(static_cast<double>(draws) * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(hits[i]) - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("per-template sampler draws valid ids") {
  auto corpus = testutil::make_corpus({"a/N b/V c/N a/N b/V", "a/N c/N"});
  auto vocab = build_vocabulary({&corpus});
  NegativeSampler sampler(vocab);
  Rng rng(7);
  for (int t = 0; t < kTemplateCount; ++t) {
    for (int i = 0; i < 100; ++i) {
      int id = sampler.sample(t, rng);
      CHECK(id >= 0);
      CHECK(static_cast<std::size_t>(id) < vocab.template_size(t));
    }
  }
}

}  // TEST_SUITE
