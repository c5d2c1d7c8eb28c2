#include "askgen/config.hpp"
#include "askgen/querygen.hpp"

#include <gtest/gtest.h>

using namespace askgen;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::invariant;
}

}  // namespace

TEST(Formulate, TemplateExamples) {
    EXPECT_EQ(formulate("disease", templates::which()), "Which disease?");
    EXPECT_EQ(formulate("sports team", templates::which()), "Which sports team?");
}

TEST(Formulate, VerbatimInsertionAndPresets) {
    EXPECT_EQ(formulate("an Enzyme", templates::list_of()), "list of an Enzyme");
    EXPECT_EQ(formulate("city", templates::example_of()), "example of city");
    EXPECT_EQ(formulate("city", templates::what()), "What city?");
    EXPECT_EQ(formulate("city", templates::bare()), "city");
    EXPECT_EQ(formulate("x", QuestionTemplate("«[TYPE]», please!")), "«x», please!");
}

TEST(Formulate, Errors) {
    EXPECT_EQ(kind_of([] { formulate("", templates::which()); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { formulate("  \t", templates::which()); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { QuestionTemplate("Which type?"); }), ErrorKind::invalid_template);
    EXPECT_EQ(kind_of([] { QuestionTemplate("[TYPE] or [TYPE]"); }), ErrorKind::invalid_template);
}

TEST(Formulate, RoundTripRemovesLabelAtInsertionPoint) {
    for (const char* name : {"which", "list_of", "example_of", "what", "bare"}) {
        const auto t = resolve_template(name);
        for (const char* label : {"disease", "sports team", "x"}) {
            auto q = formulate(label, t);
            ASSERT_EQ(q, formulate(label, t));  // pure
            q.replace(t.prefix().size(), std::string_view(label).size(), type_placeholder);
            EXPECT_EQ(q, t.pattern());
        }
    }
}

TEST(QuestionSet, NineSubQuestionsForCoNLLPreset) {
    const auto cfg = parse_config({{"preset", "conll2003"}});
    const auto qs = build_question_set(cfg.questions);
    EXPECT_EQ(qs.size(), 9u);
    std::set<std::string> ids;
    for (const auto& q : qs) ids.insert(q.question_id);
    EXPECT_EQ(ids.size(), 9u);
}

TEST(QuestionSet, SingletonAndOverrides) {
    QuestionSetSpec spec;
    spec.default_k_l = 10;
    spec.output_types.push_back({"disease", {{"disease", std::nullopt, std::nullopt, std::nullopt}}, std::nullopt,
                                 std::nullopt});
    auto qs = build_question_set(spec);
    ASSERT_EQ(qs.size(), 1u);
    EXPECT_EQ(qs[0].type_label, "disease");
    EXPECT_EQ(qs[0].question_text, "Which disease?");
    EXPECT_EQ(qs[0].k_l, 10u);
    EXPECT_EQ(qs[0].rules, common_rules());

    spec.output_types[0].rules = RuleToggles{3};
    spec.output_types[0].k_l = 5;
    spec.output_types[0].labels.push_back({"illness", "q2", 7, RuleToggles{4, 9}});
    qs = build_question_set(spec);
    ASSERT_EQ(qs.size(), 2u);
    EXPECT_EQ(qs[0].rules, RuleToggles{3});
    EXPECT_EQ(qs[0].k_l, 5u);
    EXPECT_EQ(qs[1].question_id, "q2");
    EXPECT_EQ(qs[1].k_l, 7u);
    EXPECT_EQ(qs[1].rules, (RuleToggles{4, 9}));
    EXPECT_EQ(qs[1].output_type, "disease");
}

TEST(QuestionSet, ConfigErrors) {
    QuestionSetSpec spec;
    spec.default_k_l = 0;
    spec.output_types.push_back({"t", {{"a", std::nullopt, std::nullopt, std::nullopt}}, std::nullopt, std::nullopt});
    EXPECT_EQ(kind_of([&] { build_question_set(spec); }), ErrorKind::config);
    spec.default_k_l = 3;
    spec.output_types[0].labels.push_back({"b", "t:a", std::nullopt, std::nullopt});
    EXPECT_EQ(kind_of([&] { build_question_set(spec); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { build_question_set(QuestionSetSpec{}); }), ErrorKind::config);
}

TEST(QuestionSet, CountEqualsDeclaredPairs) {
    for (const auto& name : presets::names()) {
        const auto cfg = parse_config({{"preset", name}});
        std::size_t pairs = 0;
        for (const auto& t : cfg.questions.output_types) pairs += t.labels.size();
        EXPECT_EQ(build_question_set(cfg.questions).size(), pairs) << name;
    }
}
