#include "askgen/corpus.hpp"
#include "askgen/text.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace askgen;

TEST(Text, CodePointLengthAndSlice) {
    const std::string s = "José Ruiz";
    EXPECT_EQ(text::length(s), 9u);
    EXPECT_EQ(text::slice(s, 0, 4).value(), "José");
    EXPECT_EQ(text::slice(s, 5, 9).value(), "Ruiz");
    EXPECT_FALSE(text::slice(s, 5, 10).has_value());
    EXPECT_FALSE(text::slice(s, 6, 5).has_value());
}

TEST(Text, FoldCaseIsUnicodeLowercase) {
    EXPECT_EQ(text::fold_case("ÉCOLE Boston"), "école boston");
    EXPECT_EQ(text::match_key("  New\tYORK  "), "new york");
}

TEST(Text, StripPunctToFixpoint) {
    EXPECT_EQ(text::strip_punct("\"Hamlet\""), "Hamlet");
    EXPECT_EQ(text::strip_punct("«Leprosy»,."), "Leprosy");
    EXPECT_EQ(text::strip_punct("(( ))"), "");
    EXPECT_EQ(text::strip_punct("Crohn's"), "Crohn's");
}

TEST(Text, CaseClasses) {
    EXPECT_TRUE(text::is_all_lowercase("iphone 12"));
    EXPECT_FALSE(text::is_all_lowercase("iPhone 12"));
    EXPECT_FALSE(text::is_all_lowercase("1984"));
    EXPECT_TRUE(text::has_upper("ǅ"));  // title case counts as upper
}

TEST(Text, MalformedUtf8DecodesToReplacement) {
    const std::string bad = "a\xff" "b";
    const auto cps = text::decode(bad);
    ASSERT_EQ(cps.size(), 3u);
    EXPECT_EQ(cps[1], text::replacement_char);
}

TEST(Corpus, MakeSentenceOffsetsAreCodePoints) {
    const auto s = make_sentence("a", "Ünal  met José .");
    ASSERT_EQ(s.tokens.size(), 4u);
    EXPECT_EQ(s.tokens[0].start, 0u);
    EXPECT_EQ(s.tokens[0].end, 4u);
    EXPECT_EQ(s.tokens[1].start, 6u);
    EXPECT_EQ(s.tokens[2].surface, "José");
    EXPECT_EQ(s.tokens[2].start, 10u);
    EXPECT_EQ(s.tokens[2].end, 14u);
    EXPECT_TRUE(check_sentence(s).empty());
}

TEST(Corpus, CheckSentenceRejectsBadTokens) {
    auto s = make_sentence("a", "Heart disease");
    s.tokens[1].surface = "Disease";
    EXPECT_NE(check_sentence(s), "");
    s = make_sentence("a", "Heart disease");
    std::swap(s.tokens[0], s.tokens[1]);
    EXPECT_NE(check_sentence(s), "");
    s = make_sentence("a", "Heart disease");
    s.tokens[1].end = 40;
    EXPECT_NE(check_sentence(s), "");
}

TEST(Corpus, JsonlRoundTripAndLineNumbers) {
    Corpus c;
    auto s = make_sentence("s1", "Leprosy is curable .");
    s.candidates = std::vector<CharSpan>{{0, 7}};
    c.add(s);
    c.add(make_sentence("s2", "No candidates here"));
    std::stringstream buf;
    write_corpus(buf, c);
    const auto back = read_corpus(buf, "mem");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.at("s1").tokens.size(), 4u);
    EXPECT_TRUE(back.at("s1").candidates.has_value());
    EXPECT_FALSE(back.at("s2").candidates.has_value());

    std::istringstream bad(to_json(s).dump() + "\n\n{\"sentence_id\": \"x\"}\n");
    try {
        read_corpus(bad, "corpus.jsonl");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("corpus.jsonl:3"), std::string::npos);
    }
}

TEST(Corpus, DuplicateIdIsDataError) {
    const auto s = make_sentence("s1", "A b");
    std::istringstream in(to_json(s).dump() + "\n" + to_json(s).dump() + "\n");
    try {
        read_corpus(in, "c");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}
