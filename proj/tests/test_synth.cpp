#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "histadapt/corpus.hpp"
#include "histadapt/synth.hpp"

using namespace histadapt;

TEST_SUITE("synth") {

TEST_CASE("zero mutation fraction keeps the target inside the source vocabulary") {
  SynthConfig config;
  config.sentences_per_domain = 200;
  config.vocab_size = 150;
  config.mutation_fraction = 0.0;
  config.seed = 2;
  auto result = synth_generate(config);
  CHECK(result.achieved_oov_rate == 0.0);
  CHECK(result.mutated_types == 0);
  auto source_vocab = result.source.vocabulary();
  for (const auto& form : result.target.vocabulary()) {
    CHECK(source_vocab.count(form) == 1);
  }
}

TEST_CASE("token OOV rate is monotone in the mutation fraction at a fixed seed") {
  double last = -1.0;
  for (double f : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    SynthConfig config;
    config.sentences_per_domain = 150;
    config.vocab_size = 120;
    config.mutation_fraction = f;
    config.seed = 6;
    auto result = synth_generate(config);
    CHECK(result.achieved_oov_rate >= last);
    last = result.achieved_oov_rate;
  }
  CHECK(last > 0.0);
}

TEST_CASE("an OOV-rate target is achieved within tolerance") {
  SynthConfig config;
  config.sentences_per_domain = 1000;
  config.vocab_size = 600;
  config.target_oov_rate = 0.23;
  config.oov_tolerance = 0.02;
  config.seed = 8;
  auto result = synth_generate(config);
  CHECK(result.achieved_oov_rate >= 0.21);
  CHECK(result.achieved_oov_rate <= 0.25);
}

TEST_CASE("an infeasible OOV target is an error") {
  SynthConfig config;
  config.sentences_per_domain = 100;
  config.vocab_size = 80;
  config.target_oov_rate = 0.95;  // punctuation alone keeps the rate below this
  config.seed = 1;
  CHECK_THROWS_AS(synth_generate(config), Error);
}

TEST_CASE("the gold lexicon is the exact inverse of the mutations") {
  SynthConfig config;
  config.sentences_per_domain = 200;
  config.vocab_size = 150;
  config.mutation_fraction = 0.4;
  config.seed = 12;
  auto result = synth_generate(config);
  REQUIRE(result.mutated_types > 0);
  CHECK(result.gold.size() == result.mutated_types);
  auto source_vocab = result.source.vocabulary();
  std::set<std::string> replacements;
  for (const auto& [mutated, entry] : result.gold.entries()) {
    CHECK(entry.confidence == 1.0);
    CHECK(source_vocab.count(mutated) == 0);          // mutated forms are new
    CHECK(source_vocab.count(entry.replacement) == 1);  // originals are source spellings
    CHECK(replacements.insert(entry.replacement).second);  // 1:1
  }
}

TEST_CASE("declared sizes match the generated corpora") {
  SynthConfig config;
  config.sentences_per_domain = 120;
  config.vocab_size = 100;
  config.mutation_fraction = 0.1;
  config.seed = 3;
  auto result = synth_generate(config);
  CHECK(result.source.num_sentences() == 120);
  CHECK(result.target.num_sentences() == 120);
  CHECK(result.declared_sentences_per_domain == 120);
  auto rows = corpus_stats(result.source, "epoch");
  CHECK(rows.back().sentences == 120);

  SUBCASE("documents carry corpus, epoch, and genre attributes") {
    for (const Corpus* c : {&result.source, &result.target}) {
      for (const auto& doc : c->documents) {
        CHECK(doc.attribute("corpus") != nullptr);
        CHECK(doc.attribute("epoch") != nullptr);
        CHECK(doc.attribute("genre") != nullptr);
      }
    }
    CHECK(*result.source.documents[0].attribute("corpus") !=
          *result.target.documents[0].attribute("corpus"));
  }

  SUBCASE("the grammar emits at least 12 distinct PTB tags") {
    std::set<std::string> tags;
    for (const auto& t : flatten_tags(result.source)) tags.insert(t);
    CHECK(tags.size() >= 12);
  }
}

}  // TEST_SUITE
