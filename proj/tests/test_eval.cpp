#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "histadapt/eval.hpp"
#include "histadapt/synth.hpp"

using namespace histadapt;

TEST_SUITE("eval") {

TEST_CASE("two-token hand computation") {
  auto gold = testutil::make_corpus({"alpha/DT beta/NN"});
  std::unordered_set<std::string> vocab = {"alpha"};
  auto report = evaluate(gold, {"DT", "VB"}, vocab);
  CHECK(report.overall() == doctest::Approx(0.5));
  CHECK(report.iv_accuracy() == doctest::Approx(1.0));
  CHECK(report.oov_accuracy() == doctest::Approx(0.0));
  CHECK(report.oov_rate() == doctest::Approx(0.5));
}

TEST_CASE("the published figures satisfy the decomposition identity") {
  // IV 81.68, OOV 48.96 at a 23.0% OOV rate combine to the reported 74.15.
  const double combined = 0.77 * 81.68 + 0.23 * 48.96;
  CHECK(std::abs(combined - 74.15) <= 0.01);
}

TEST_CASE("perfect predictions yield unit accuracies and no error rows") {
  auto gold = testutil::make_corpus({"a/DT b/NN c/VB", "d/DT e/NN"});
  auto report = evaluate(gold, flatten_tags(gold), gold.vocabulary());
  CHECK(report.overall() == doctest::Approx(1.0));
  CHECK(report.iv_accuracy() == doctest::Approx(1.0));
  CHECK(report.oov_tokens == 0);
  for (const auto& row : report.rows) CHECK(row.error_count == 0);
}

TEST_CASE("decomposition identity holds exactly on random fixtures") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(60));
    std::vector<std::string> sents;
    std::string line;
    for (int i = 0; i < n; ++i) {
      line += "w" + std::to_string(rng.uniform_index(20)) + "/T" +
              std::to_string(rng.uniform_index(4)) + " ";
    }
    sents.push_back(line);
    auto gold = testutil::make_corpus(sents);
    std::vector<std::string> pred;
    std::unordered_set<std::string> vocab;
    for (const auto& d : gold.documents)
      for (const auto& s : d.sentences)
        for (const auto& t : s.tokens) {
          pred.push_back(rng.uniform() < 0.6 ? t.tag : "T9");
          if (rng.uniform() < 0.7) vocab.insert(t.form);
        }
    auto report = evaluate(gold, pred, vocab);
    const double weighted =
        (static_cast<double>(report.iv_tokens) * report.iv_accuracy() +
         static_cast<double>(report.oov_tokens) * report.oov_accuracy()) /
        static_cast<double>(report.tokens);
    CHECK(std::abs(report.overall() - weighted) <= 1e-12);
  }
}

TEST_CASE("per-tag rows sort by frequency and mine the most common error") {
  auto gold = testutil::make_corpus(
      {"x/NN x/NN x/NN y/NN z/VB z/VB", "w/DT x/NN y/NN z/VB"});
  //  NN: 6 tokens; VB: 3; DT: 1
  std::vector<std::string> pred = {"NN", "JJ", "JJ", "VB", "VB", "VB", "DT", "JJ", "NN", "NN"};
  auto report = evaluate(gold, pred, gold.vocabulary());
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].tag == "NN");
  CHECK(report.rows[1].tag == "VB");
  CHECK(report.rows[2].tag == "DT");
  // NN errors: x->JJ (3 times), y->VB (1)
  CHECK(report.rows[0].error_word == "x");
  CHECK(report.rows[0].error_pred == "JJ");
  CHECK(report.rows[0].error_count == 3);

  SUBCASE("ties break lexicographically") {
    auto gold2 = testutil::make_corpus({"b/NN a/NN"});
    auto r2 = evaluate(gold2, {"X", "X"}, gold2.vocabulary());
    CHECK(r2.rows[0].error_word == "a");
  }
}

TEST_CASE("a length mismatch is an error") {
  auto gold = testutil::make_corpus({"a/DT b/NN"});
  CHECK_THROWS_AS(evaluate(gold, {"DT"}, gold.vocabulary()), Error);
}

TEST_CASE("evaluation is invariant under sentence permutation") {
  auto gold = testutil::make_corpus({"a/DT b/NN", "c/VB d/NN e/DT", "f/VB"});
  std::vector<std::string> pred = {"DT", "VB", "VB", "NN", "DT", "NN"};
  auto permuted = testutil::make_corpus({"f/VB", "a/DT b/NN", "c/VB d/NN e/DT"});
  std::vector<std::string> pred_permuted = {"NN", "DT", "VB", "VB", "NN", "DT"};
  std::unordered_set<std::string> vocab = {"a", "c", "f"};
  auto r1 = evaluate(gold, pred, vocab);
  auto r2 = evaluate(permuted, pred_permuted, vocab);
  CHECK(r1.overall() == r2.overall());
  CHECK(r1.iv_accuracy() == r2.iv_accuracy());
  CHECK(r1.oov_accuracy() == r2.oov_accuracy());
  CHECK(r1.rows.size() == r2.rows.size());
}

TEST_CASE("error overlap set arithmetic") {
  // Five tokens; baseline wrong on positions 1..4, right on 0.
  auto gold = testutil::make_corpus({"t0/G t1/G t2/G t3/G t4/G"});
  std::vector<std::string> baseline = {"G", "X", "X", "X", "X"};
  // A corrects {1,2,3}; B corrects {2,3,4}
  std::vector<std::string> a = {"G", "G", "G", "G", "X"};
  std::vector<std::string> b = {"G", "X", "G", "G", "G"};
  auto report = error_overlap(gold, baseline, a, b);
  CHECK(report.corrected_a == 3);
  CHECK(report.corrected_b == 3);
  CHECK(report.intersection == 2);
  CHECK(report.fraction_of_a == doctest::Approx(2.0 / 3.0));
  CHECK(report.fraction_of_b == doctest::Approx(2.0 / 3.0));

  SUBCASE("a system identical to the baseline corrects nothing") {
    auto r2 = error_overlap(gold, baseline, a, baseline);
    CHECK(r2.corrected_b == 0);
    CHECK(r2.b_empty);
    CHECK(r2.fraction_of_b == 0.0);
  }
  SUBCASE("misaligned vectors are an error") {
    CHECK_THROWS_AS(error_overlap(gold, baseline, {"G"}, b), Error);
  }
}

TEST_CASE("ablation emits the all-features row plus one row per group") {
  SynthConfig sc;
  sc.sentences_per_domain = 800;
  sc.vocab_size = 300;
  sc.mutation_fraction = 0.10;
  sc.seed = 33;
  auto data = synth_generate(sc);
  auto vocab = build_vocabulary({&data.source, &data.target});
  FeaturePipeline pipeline;
  pipeline.vocab = &vocab;
  auto rows = ablation_run(data.source, data.target, {"suffix", "orthographic"}, pipeline,
                           TaggerConfig{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "all");
  CHECK(rows[1].name == "-suffix");
  CHECK(rows[2].name == "-orthographic");

  SUBCASE("dropping orthographic features barely moves the overall accuracy") {
    CHECK(std::abs(rows[2].report.overall() - rows[0].report.overall()) <= 0.003);
  }
  SUBCASE("unknown groups are errors") {
    CHECK_THROWS_AS(ablation_run(data.source, data.target, {"nonsense"}, pipeline, TaggerConfig{}),
                    Error);
  }
}

}  // TEST_SUITE
