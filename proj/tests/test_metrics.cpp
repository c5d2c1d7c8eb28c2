#include "askgen/annotator.hpp"
#include "askgen/conll.hpp"
#include "askgen/metrics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace askgen;

namespace {

std::vector<EntitySpan> ents(const TagSequence& tags) { return extract_entities(tags); }

RetrievedPhrase result(std::size_t rank, std::string surface) { return {"q", rank, std::move(surface), 1.0, "s", 0, 1}; }

}  // namespace

TEST(Extract, ConllevalChunking) {
    EXPECT_EQ(ents({"B-PER", "I-PER", "O"}), (std::vector<EntitySpan>{{0, 2, "PER"}}));
    EXPECT_EQ(ents({"O", "I-LOC"}), (std::vector<EntitySpan>{{1, 2, "LOC"}}));
    EXPECT_EQ(ents({"B-PER", "B-PER"}), (std::vector<EntitySpan>{{0, 1, "PER"}, {1, 2, "PER"}}));
    EXPECT_EQ(ents({"B-PER", "I-LOC", "I-LOC"}), (std::vector<EntitySpan>{{0, 1, "PER"}, {1, 3, "LOC"}}));
    EXPECT_TRUE(ents({"O", "O"}).empty());
}

TEST(EntityF1, Examples) {
    const EntitySet one{{"s", 0, 2, "PER"}};
    auto r = entity_f1(one, one).overall;
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
    r = entity_f1(one, {{"s", 0, 1, "PER"}}).overall;
    EXPECT_EQ(r.precision, 0.0);
    EXPECT_EQ(r.recall, 0.0);
    EXPECT_EQ(r.f1, 0.0);
    r = entity_f1({}, {}).overall;
    EXPECT_EQ(r.f1, 0.0);
}

TEST(EntityF1, HandBuiltConllevalFixture) {
    const auto gold = load_conll((oracle::data_dir() / "fixtures" / "conlleval_gold.conll").string());
    const auto pred = load_conll((oracle::data_dir() / "fixtures" / "conlleval_pred.conll").string());
    ASSERT_EQ(gold.size(), 10u);
    const auto s = evaluate(gold, pred);
    // 17 gold, 17 predicted; one boundary error (PER) and one type error (ORG -> LOC)
    EXPECT_EQ(s.overall.correct, 15u);
    EXPECT_EQ(s.overall.gold, 17u);
    EXPECT_EQ(s.overall.predicted, 17u);
    EXPECT_EQ(s.overall.precision, 15.0 / 17.0);
    EXPECT_EQ(s.overall.recall, 15.0 / 17.0);
    EXPECT_EQ(s.overall.f1, 15.0 / 17.0);
    EXPECT_EQ(s.per_type.at("PER").precision, 0.75);
    EXPECT_EQ(s.per_type.at("PER").recall, 0.75);
    EXPECT_EQ(s.per_type.at("LOC").precision, 7.0 / 8.0);
    EXPECT_EQ(s.per_type.at("LOC").recall, 1.0);
    EXPECT_EQ(s.per_type.at("ORG").precision, 1.0);
    EXPECT_EQ(s.per_type.at("ORG").recall, 0.75);
    EXPECT_EQ(s.per_type.at("MISC").f1, 1.0);
    const auto j = to_json(s);
    EXPECT_EQ(j["overall"]["F1"].get<double>(), 15.0 / 17.0);
    EXPECT_TRUE(j["per_type"].contains("MISC"));
    EXPECT_NE(format_report(s).find("overall"), std::string::npos);
}

TEST(EntityF1, RandomizedAgainstPairwiseOracle) {
    std::mt19937_64 rng(23);
    const std::vector<std::string> types{"A", "B"};
    for (int trial = 0; trial < 1000; ++trial) {
        auto random_set = [&] {
            std::vector<Entity> v;
            EntitySet s;
            const auto n = std::uniform_int_distribution<int>(0, 8)(rng);
            for (int i = 0; i < n; ++i) {
                const auto start = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
                Entity e{"s" + std::to_string(std::uniform_int_distribution<int>(0, 2)(rng)), start,
                         start + std::uniform_int_distribution<std::size_t>(1, 2)(rng),
                         types[std::uniform_int_distribution<std::size_t>(0, 1)(rng)]};
                if (s.insert(e).second) v.push_back(e);
            }
            return std::pair{v, s};
        };
        const auto [gv, gs] = random_set();
        const auto [pv, ps] = random_set();
        const auto got = entity_f1(gs, ps).overall;
        const auto want = oracle::pairwise_f1(gv, pv);
        EXPECT_NEAR(got.precision, want.p, 1e-12);
        EXPECT_NEAR(got.recall, want.r, 1e-12);
        EXPECT_NEAR(got.f1, want.f1, 1e-12);
        EXPECT_LE(got.f1, std::max(got.precision, got.recall) + 1e-12);
        EXPECT_EQ(got.f1 == 0.0, want.correct == 0);
        const auto swapped = entity_f1(ps, gs).overall;
        EXPECT_EQ(swapped.precision, got.recall);
        EXPECT_EQ(swapped.recall, got.precision);
        EXPECT_EQ(swapped.f1, got.f1);
    }
}

TEST(EntityF1, ExtractInvertsEmitBio) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
        const auto layout = oracle::random_layout(rng, n, {"PER", "LOC", "ORG"});
        std::vector<std::string> toks(n, "w");
        const auto s = oracle::sentence_of("s", toks);
        std::vector<MatchSpan> spans;
        for (const auto& e : layout) spans.push_back({"s", e.start, e.end, "k", e.type, false});
        const auto bio = emit_bio({s}, spans);
        EXPECT_TRUE(is_well_formed(bio[0].tags));
        EXPECT_EQ(extract_entities(bio[0].tags), layout);
    }
}

TEST(Conll, WriteParseIdentityAndErrors) {
    std::vector<LabeledSentence> v{{"0", {"Heart", "disease"}, {"B-disease", "I-disease"}},
                                   {"1", {"José", "."}, {"B-PER", "O"}}};
    std::stringstream buf;
    write_conll(buf, v);
    EXPECT_EQ(buf.str(), "Heart\tB-disease\ndisease\tI-disease\n\nJosé\tB-PER\n.\tO\n");
    EXPECT_EQ(read_conll(buf, "mem"), v);

    std::istringstream bad("a\tO\nb O\n");
    try {
        read_conll(bad, "x.conll");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    std::istringstream bad_tag("a\tX-PER\n");
    EXPECT_THROW(read_conll(bad_tag, "x"), DataError);
    std::istringstream crlf("a\tO\r\n\r\nb\tB-X\r\n");
    EXPECT_EQ(read_conll(crlf, "x").size(), 2u);
}

TEST(Evaluate, MismatchedInputsAreDataErrors) {
    std::vector<LabeledSentence> g{{"0", {"a"}, {"O"}}};
    std::vector<LabeledSentence> p{{"0", {"a", "b"}, {"O", "O"}}};
    EXPECT_THROW(evaluate(g, p), Error);
    EXPECT_THROW(evaluate(g, {}), Error);
}

TEST(RetrievalMetrics, PrecisionAtK) {
    std::vector<RetrievedPhrase> r;
    RetrievalJudgments j;
    for (std::size_t i = 1; i <= 100; ++i) {
        r.push_back(result(i, "p" + std::to_string(i)));
        j[{"q", i}] = i > 3;
    }
    EXPECT_DOUBLE_EQ(precision_at_k(r, j, 100), 0.97);
    for (auto& [key, v] : j) v = false;
    EXPECT_EQ(precision_at_k(r, j, 100), 0.0);
    r.resize(4);
    for (auto& [key, v] : j) v = key.second % 2 == 0;
    EXPECT_EQ(precision_at_k(r, j, 100), 0.5);  // denominator is the 4 results
    EXPECT_EQ(precision_at_k({}, j, 100), 0.0);

    j.erase({"q", 3});
    try {
        precision_at_k(r, j, 100);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::incomplete_judgments);
        EXPECT_NE(std::string(e.what()).find("rank 3"), std::string::npos);
    }
}

TEST(RetrievalMetrics, Diversity) {
    EXPECT_EQ(diversity({result(1, "A"), result(2, "a"), result(3, "B")}, 3), 2u);
    EXPECT_EQ(diversity({}, 100), 0u);
    std::vector<RetrievedPhrase> r;
    for (std::size_t i = 1; i <= 100; ++i) r.push_back(result(i, "p" + std::to_string(i)));
    EXPECT_EQ(diversity(r, 100), 100u);
    EXPECT_EQ(diversity(r, 10), 10u);
}

TEST(RetrievalMetrics, JudgmentFileAndMacroAverage) {
    std::istringstream in(R"({"question_id": "a", "rank": 1, "correct": true}
{"question_id": "a", "rank": 2, "correct": false}
{"question_id": "b", "rank": 1, "correct": true}
)");
    const auto j = read_judgments(in, "j");
    ResultSet rs;
    rs["a"] = {{"a", 1, "X", 1, "s", 0, 1}, {"a", 2, "x", 0.5, "s", 0, 1}};
    rs["b"] = {{"b", 1, "Y", 1, "s", 0, 1}};
    const auto q = retrieval_quality(rs, j, 100);
    EXPECT_EQ(q.precision.at("a"), 0.5);
    EXPECT_EQ(q.precision.at("b"), 1.0);
    EXPECT_EQ(q.macro_precision, 0.75);
    EXPECT_EQ(q.diversity.at("a"), 1u);
    EXPECT_EQ(q.macro_diversity, 1.0);

    std::istringstream dup(R"({"question_id": "a", "rank": 1, "correct": true}
{"question_id": "a", "rank": 1, "correct": false}
)");
    EXPECT_THROW(read_judgments(dup, "j"), DataError);
}
