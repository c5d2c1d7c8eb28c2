#include "askgen/default_stopwords.hpp"
#include "askgen/normalizer.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace askgen;

namespace {

using Strings = std::vector<std::string>;

RuleSet only(std::initializer_list<int> ids) {
    RuleSet r;
    r.enabled = RuleToggles(ids);
    r.stopwords = load_stopwords((oracle::data_dir() / "stopwords.txt").string());
    return r;
}

Strings run(std::string_view s, std::initializer_list<int> ids, std::string_view type = "thing") {
    return normalize_surface(s, type, only(ids));
}

std::vector<NormalizedPhrase> normalize_in(const std::string& sentence, const std::string& phrase, RuleSet rules,
                                           const std::string& type) {
    const auto s = make_sentence("s", sentence);
    const auto start = text::length(sentence.substr(0, sentence.find(phrase)));
    RetrievedPhrase p{"q", 1, phrase, 1.0, "s", start, start + text::length(phrase)};
    EXPECT_EQ(check_phrase(p, nullptr), "");
    return normalize(p, s, rules, type);
}

}  // namespace

TEST(Normalize, ReferenceExamples) {
    EXPECT_EQ(run("Leprosy,", {2}), Strings{"Leprosy"});
    EXPECT_EQ(run("the Boston Red Sox", {4}), Strings{"Boston Red Sox"});
    EXPECT_EQ(run("France and Germany", {1, 3}), (Strings{"France", "Germany"}));
    EXPECT_EQ(run("disease", {7}, "disease"), Strings{});
    EXPECT_EQ(run("US", {6}), Strings{});
    EXPECT_EQ(run("WAS", {6}), Strings{});
}

TEST(Normalize, ApplyRuleExamples) {
    const auto r = only({});
    EXPECT_EQ(apply_rule(2, "\"Hamlet\"", "t", r), Strings{"Hamlet"});
    EXPECT_EQ(apply_rule(5, "AB", "t", r), Strings{});
    EXPECT_EQ(apply_rule(5, "ABC", "t", r), Strings{"ABC"});
    EXPECT_EQ(apply_rule(3, "iPhone 12", "t", r), Strings{"iPhone 12"});
    EXPECT_EQ(apply_rule(3, "heart attack", "t", r), Strings{});
    EXPECT_EQ(apply_rule(3, "1984", "t", r), Strings{"1984"});
    EXPECT_EQ(apply_rule(4, "The", "t", r), Strings{"The"});
    EXPECT_EQ(apply_rule(4, "THE Who", "t", r), Strings{"Who"});
    EXPECT_EQ(apply_rule(4, "Theodore", "t", r), Strings{"Theodore"});
    EXPECT_EQ(apply_rule(7, "Sports  Team", "sports team", r), Strings{});
    EXPECT_EQ(apply_rule(1, "Bread and Butter and Jam", "t", r), (Strings{"Bread", "Butter", "Jam"}));
    EXPECT_EQ(apply_rule(1, "Andorra", "t", r), Strings{"Andorra"});
    EXPECT_EQ(apply_rule(1, "Tom AND Jerry", "t", r), Strings{"Tom AND Jerry"});
}

TEST(Normalize, MatchTimeRulesAreOutOfModule) {
    for (int id : {9, 10}) {
        try {
            apply_rule(id, "x", "t", only({}));
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::out_of_module);
        }
    }
    EXPECT_THROW(apply_rule(11, "x", "t", only({})), Error);
}

TEST(Normalize, OrderMatters) {
    // Rule 2 runs before Rule 4, Rule 4 before Rule 5
    EXPECT_EQ(run("\"the Who\"", {2, 4, 5}), Strings{"Who"});
    EXPECT_EQ(run("the Ox", {4, 5}), Strings{});
    // a later rule exposing work for an earlier one triggers another ordered pass
    EXPECT_EQ(run("the (Ox)", {2, 4}), Strings{"Ox"});
    EXPECT_EQ(run("The sox", {3, 4}), Strings{});
    EXPECT_EQ(run(",and Pax", {1, 2}), Strings{"Pax"});
    EXPECT_EQ(run("The sox", {4}), Strings{"sox"});
}

TEST(Normalize, BundledStopwordsCoverKnownNoise) {
    const auto file = load_stopwords((oracle::data_dir() / "stopwords.txt").string());
    std::istringstream in{std::string(default_stopwords)};
    const auto embedded = read_stopwords(in);
    EXPECT_EQ(file, embedded);
    EXPECT_TRUE(file.contains("us"));
    EXPECT_TRUE(file.contains("was"));
    EXPECT_FALSE(file.contains("#"));
}

TEST(Abbreviation, ReferenceAndHandExamples) {
    EXPECT_EQ(detect_abbreviation("Crohn's disease", "Crohn's disease (CD) is one of the inflammatory bowel diseases ."),
              "CD");
    EXPECT_EQ(detect_abbreviation("Paris", "Paris is the capital."), std::nullopt);
    // right to left: 'e' found in "heart", then no 'k' before it
    EXPECT_EQ(detect_abbreviation("heart attack", "heart attack (stroke) occurred"), std::nullopt);
    EXPECT_EQ(detect_abbreviation("tumor necrosis factor", "tumor necrosis factor (TNF; a cytokine)"), "TNF");
    // first character must start a word
    EXPECT_EQ(detect_abbreviation("Kestrel", "Kestrel (ES) is far"), std::nullopt);
    EXPECT_EQ(detect_abbreviation("Lower Vantia", "Talks began in Lower Vantia (LV) this week ."), "LV");
    EXPECT_EQ(detect_abbreviation("Lower Vantia", "Lower Vantia (1) was"), std::nullopt);
}

TEST(Abbreviation, NormalizeAttachesButDoesNotEmit) {
    RuleSet rules = only({2, 8});
    const auto out = normalize_in("Crohn's disease (CD) is one of the inflammatory bowel diseases .", "Crohn's disease",
                                  rules, "disease");
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].surface, "Crohn's disease");
    EXPECT_EQ(out[0].abbreviation, "CD");
    rules.enabled.set(8, false);
    EXPECT_EQ(normalize_in("Crohn's disease (CD) is common .", "Crohn's disease", rules, "disease")[0].abbreviation,
              std::nullopt);
}

TEST(Normalize, RandomizedProperties) {
    std::mt19937_64 rng(5);
    const Strings pieces = {"the", "The", "and", "US", "was", "Red", "sox", ",", "\"", "(", ")", "Boston", "é",
                            "iPhone", "12", "disease", "AB", ".", "«", "»", "Crohn's"};
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
            s += (i && std::uniform_int_distribution<int>(0, 3)(rng) ? " " : "") + p;
        }
        RuleSet rules = only({});
        for (int id = 1; id <= 8; ++id) rules.enabled.set(id, std::uniform_int_distribution<int>(0, 1)(rng) == 1);

        const auto out = normalize_surface(s, "disease", rules);
        // composition: ordered passes of apply_rule, repeated until stable, equal normalize
        Strings folded{std::string(text::trim(s))};
        if (folded[0].empty()) folded.clear();
        for (Strings before; before != folded || before.empty();) {
            before = folded;
            for (int id = 1; id <= 8; ++id) {
                if (!rules.enabled.enabled(id)) continue;
                Strings next;
                for (const auto& f : folded)
                    for (auto& g : apply_rule(id, f, "disease", rules)) next.push_back(g);
                folded = next;
            }
            if (folded.empty()) break;
        }
        EXPECT_EQ(out, folded) << s;

        for (const auto& f : out) {
            EXPECT_FALSE(f.empty());
            if (rules.enabled.enabled(1)) {
                const auto words = text::split_whitespace(f);
                EXPECT_EQ(std::find(words.begin(), words.end(), "and"), words.end()) << f;
            }
            if (rules.enabled.enabled(2)) {
                const auto cps = text::decode(f);
                EXPECT_FALSE(text::is_punct(cps.front()) || text::is_punct(cps.back())) << f;
            }
            // each single rule is idempotent on its own output
            for (int id : {1, 2, 3, 4, 5, 6, 7}) {
                for (const auto& once : apply_rule(id, f, "disease", rules))
                    EXPECT_EQ(apply_rule(id, once, "disease", rules), Strings{once}) << id << " " << f;
            }
            // survivors pass every enabled rule unchanged
            for (int id : {1, 2, 3, 4, 5, 6, 7})
                if (rules.enabled.enabled(id)) {
                    EXPECT_EQ(apply_rule(id, f, "disease", rules), Strings{f});
                }
        }
        if (s.find('(') == std::string::npos) {
            EXPECT_EQ(detect_abbreviation("Boston", s), std::nullopt);
        }
    }
}
