#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "histadapt/features.hpp"

using namespace histadapt;

TEST_SUITE("features") {

TEST_CASE("template inventory: 5 lexical, 8 affix, 3 orthographic") {
  int lexical = 0, affix = 0, ortho = 0;
  for (const auto& t : templates()) {
    if (t.group == TemplateGroup::lexical) ++lexical;
    if (t.group == TemplateGroup::affix) ++affix;
    if (t.group == TemplateGroup::orthographic) ++ortho;
  }
  CHECK(lexical == 5);
  CHECK(affix == 8);
  CHECK(ortho == 3);
  CHECK(kTemplateCount == 16);
  CHECK(kEmbeddedTemplateCount == 13);
}

TEST_CASE("extraction at 'drewe' in the example sentence") {
  auto corpus =
      testutil::make_corpus({"and drewe vnto hym all ryottours wylde dysposed persones"});
  auto values = extract_feature_values(corpus.documents[0].sentences[0], 1);
  CHECK(values[0] == "<s>");
  CHECK(values[1] == "and");
  CHECK(values[2] == "drewe");
  CHECK(values[3] == "vnto");
  CHECK(values[4] == "hym");
  CHECK(values[5] == "d");
  CHECK(values[6] == "dr");
  CHECK(values[7] == "dre");
  CHECK(values[8] == "drew");
  CHECK(values[9] == "e");
  CHECK(values[10] == "we");
  CHECK(values[11] == "ewe");
  CHECK(values[12] == "rewe");
  CHECK(values[13] == "0");
  CHECK(values[14] == "0");
  CHECK(values[15] == "0");
}

TEST_CASE("short words truncate affixes to the whole word") {
  auto corpus = testutil::make_corpus({"a"});
  auto values = extract_feature_values(corpus.documents[0].sentences[0], 0);
  for (int t = 5; t <= 12; ++t) CHECK(values[static_cast<std::size_t>(t)] == "a");
  CHECK(values[0] == "<s>");
  CHECK(values[1] == "<s>");
  CHECK(values[2] == "a");
  CHECK(values[3] == "</s>");
  CHECK(values[4] == "</s>");
}

TEST_CASE("orthographic classes on a year range token") {
  auto corpus = testutil::make_corpus({"1840-1914"});
  auto values = extract_feature_values(corpus.documents[0].sentences[0], 0);
  CHECK(values[13] == "1");  // digit
  CHECK(values[14] == "0");  // uppercase
  CHECK(values[15] == "1");  // hyphen
}

TEST_CASE("affixes respect UTF-8 code point boundaries") {
  auto corpus = testutil::make_corpus({"\xc3\xa9t\xc3\xa9"});  // "été"
  auto values = extract_feature_values(corpus.documents[0].sentences[0], 0);
  CHECK(values[5] == "\xc3\xa9");
  CHECK(values[6] == "\xc3\xa9t");
  CHECK(values[9] == "\xc3\xa9");
  CHECK(values[10] == "t\xc3\xa9");
}

TEST_CASE("extraction is local to the +/-2 window") {
  auto a = testutil::make_corpus({"w0 w1 w2 w3 w4 w5 w6"});
  auto b = testutil::make_corpus({"w0 w1 w2 w3 w4 w5 CHANGED"});
  auto va = extract_feature_values(a.documents[0].sentences[0], 3);
  auto vb = extract_feature_values(b.documents[0].sentences[0], 3);
  CHECK(va == vb);
  auto vc = extract_feature_values(b.documents[0].sentences[0], 4);
  CHECK(va != vc);
}

TEST_CASE("instance carries the document's attribute vector") {
  auto corpus = testutil::parse_text("#meta corpus=c1\n#meta epoch=e1\nw\tN\n");
  std::vector<const Corpus*> cs = {&corpus};
  auto space = AttributeSpace::from_corpora(cs, {"corpus", "epoch"});
  REQUIRE(space.size() == 3);
  auto inst = extract_instance(corpus.documents[0].sentences[0], 0, space, corpus.documents[0]);
  CHECK(inst.attribute_z[0] == 1);
  CHECK(inst.attribute_z[1] == 1);
  CHECK(inst.attribute_z[2] == 1);
  CHECK(inst.qualified(2) == "w0:w");
}

TEST_CASE("vocabulary over disjoint corpora unions the types") {
  std::vector<std::string> a_words, b_words;
  for (int i = 0; i < 10; ++i) a_words.push_back("a" + std::to_string(i));
  for (int i = 0; i < 10; ++i) b_words.push_back("b" + std::to_string(i));
  auto a = testutil::make_corpus({[&] {
    std::string s;
    for (const auto& w : a_words) s += w + "/N ";
    return s;
  }()});
  auto b = testutil::make_corpus({[&] {
    std::string s;
    for (const auto& w : b_words) s += w + "/N ";
    return s;
  }()});
  auto vocab = build_vocabulary({&a, &b});
  CHECK(vocab.template_size(2) == 20);  // w0: every type, no boundary symbols
  // w-1 adds <s> and never sees the last type of either sentence.
  CHECK(vocab.template_size(1) == 20 - 2 + 1);
  // w+2 adds </s> and never sees the first two types of either sentence.
  CHECK(vocab.template_size(4) == 20 - 4 + 1);

  for (const auto& w : b_words) CHECK(vocab.id(2, w) >= 0);
}

TEST_CASE("adding the same corpus twice doubles counts, not ids") {
  auto corpus = testutil::make_corpus({"x/N y/N"});
  auto once = build_vocabulary({&corpus});
  auto twice = build_vocabulary({&corpus, &corpus});
  CHECK(once.template_size(2) == twice.template_size(2));
  CHECK(twice.counts(2)[0] == 2 * once.counts(2)[0]);
}

TEST_CASE("vocabulary dump/load round trip preserves ids, counts, and hash") {
  auto corpus = testutil::make_corpus({"alpha/N beta/V gamma/N", "beta/V alpha/N"});
  auto vocab = build_vocabulary({&corpus});
  std::ostringstream out;
  vocab.dump(out);
  std::istringstream in(out.str());
  auto loaded = FeatureVocabulary::load_stream(in);
  CHECK(loaded.total_size() == vocab.total_size());
  CHECK(loaded.hash() == vocab.hash());
  for (int t = 0; t < kTemplateCount; ++t) {
    REQUIRE(loaded.template_size(t) == vocab.template_size(t));
    for (std::size_t i = 0; i < vocab.template_size(t); ++i) {
      CHECK(loaded.value(t, static_cast<int>(i)) == vocab.value(t, static_cast<int>(i)));
    }
  }
}

TEST_CASE("global ids are offset by template") {
  auto corpus = testutil::make_corpus({"x/N"});
  auto vocab = build_vocabulary({&corpus});
  CHECK(vocab.global_id(2, "x") == vocab.offset(2));
  CHECK(vocab.offset(3) > vocab.offset(2));
  CHECK_THROWS_AS(vocab.global_id(2, "unseen"), Error);
}

}  // TEST_SUITE
