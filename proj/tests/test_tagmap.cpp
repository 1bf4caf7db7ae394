#include <doctest.h>

#include "helpers.hpp"
#include "histadapt/tagmap.hpp"

using namespace histadapt;

TEST_SUITE("tagmap") {

TEST_CASE("complex tags keep their first simple component") {
  CHECK(simplify_complex_tag("PRO+N") == "PRO");
  CHECK(simplify_complex_tag("ADJ+NS") == "ADJ");
  CHECK(simplify_complex_tag("NN") == "NN");
  CHECK(simplify_complex_tag("A+B+C") == "A");
}

TEST_CASE("builtin table has exactly the 83 entries") {
  auto mapper = TagMapper::builtin_pche_ptb();
  CHECK(mapper.size() == 83);
}

TEST_CASE("spot checks against the published table") {
  auto mapper = TagMapper::builtin_pche_ptb();
  CHECK(mapper.map("BED") == "VBD");
  CHECK(mapper.map("Q") == "JJ");
  CHECK(mapper.map("WPRO$") == "WP$");
  CHECK(mapper.map("FP") == "CC");
  CHECK(mapper.map("BEP") == "VBZ");
  CHECK(mapper.map("D") == "DT");
  CHECK(mapper.map("NPRS$") == "NNPS");
  CHECK(mapper.map("WARD") == "VB");
  CHECK(mapper.map("X") == "X");
}

TEST_CASE("both quote forms map to the closing quote") {
  auto mapper = TagMapper::builtin_pche_ptb();
  CHECK(mapper.map("'") == "''");
  CHECK(mapper.map("\"") == "''");
  CHECK(mapper.map(",") == ",");
  CHECK(mapper.map(".") == ".");
}

TEST_CASE("complex tags are simplified before mapping") {
  auto mapper = TagMapper::builtin_pche_ptb();
  CHECK(mapper.map("PRO+N") == "PRP");
  CHECK(mapper.map("ADJ+NS") == "JJ");
}

TEST_CASE("the remap flag redirects Q to DT and nothing else") {
  auto mapper = TagMapper::builtin_pche_ptb();
  auto remapped = TagMapper::builtin_pche_ptb();
  remapped.set_remap_q(true);
  CHECK(remapped.map("Q") == "DT");
  for (const auto& [src, dst] : mapper.entries()) {
    if (src == "Q") continue;
    CHECK(remapped.map(src) == dst);
  }
}

TEST_CASE("mapping is total over the shipped inventory") {
  auto mapper = TagMapper::builtin_pche_ptb();
  for (const auto& [src, _] : mapper.entries()) {
    CHECK_NOTHROW(mapper.map(src));
  }
}

TEST_CASE("unmapped tags raise an error naming the tag") {
  auto mapper = TagMapper::builtin_pche_ptb();
  CHECK_THROWS_WITH_AS(mapper.map("ZZZ"), doctest::Contains("ZZZ"), Error);
}

TEST_CASE("the bundled mapping file matches the builtin table") {
  auto mapper = TagMapper::builtin_pche_ptb();
  auto loaded = TagMapper::load(std::string(HISTADAPT_DATA_DIR) + "/pche_to_ptb.tsv");
  REQUIRE(loaded.size() == mapper.size());
  CHECK(loaded.entries() == mapper.entries());
}

TEST_CASE("mapping a corpus preserves token counts") {
  auto corpus = testutil::make_corpus({"he/PRO drewe/VBD vnto/P hym/PRO+N ryottours/NS ./."});
  auto mapped = map_corpus_tags(corpus, TagMapper::builtin_pche_ptb());
  CHECK(mapped.num_tokens() == corpus.num_tokens());
  const auto& tokens = mapped.documents[0].sentences[0].tokens;
  CHECK(tokens[0].tag == "PRP");
  CHECK(tokens[1].tag == "VBD");
  CHECK(tokens[2].tag == "IN");
  CHECK(tokens[3].tag == "PRP");
  CHECK(tokens[4].tag == "NNS");
  CHECK(tokens[5].tag == ".");
}

}  // TEST_SUITE
