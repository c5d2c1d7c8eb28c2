#pragma once

// Pipeline configuration: one JSON file, optionally layered on top of a bundled benchmark preset.
//
//   {
//     "preset": "conll2003",            // optional; user keys override preset keys
//     "template": "which",              // preset name or a literal pattern with [TYPE]
//     "k_l": 100,                       // default sentence budget per sub-question
//     "rules": [2, 5, 6, 7, 8, 10],     // default rule toggles
//     "min_length": 3,
//     "output_types": [
//       {"name": "person", "k_l": 50, "rules": [1, 3, 4],
//        "labels": ["athlete", {"label": "actor", "id": "q7", "k_l": 10, "rules": [3]}]}
//     ],
//     "corpus": "corpus.jsonl", "results": "results.jsonl",
//     "endpoint": "http://localhost:8080/search", "timeout_ms": 10000, "attempts": 3, "top_n": 100,
//     "stopwords": "stopwords.txt", "quality_phrases": "phrases.txt",
//     "selftrain": {"t_begin": 900, "t_update": 300, "max_iterations": 1500},
//     "seed": 42, "output_dir": "out"
//   }
//
// Relative paths are resolved against the directory holding the config file.

#include "askgen/error.hpp"
#include "askgen/io.hpp"
#include "askgen/jsonl.hpp"
#include "askgen/querygen.hpp"
#include "askgen/rules.hpp"
#include "askgen/selftrain.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace askgen {

namespace presets {

namespace detail {

inline json type(const char* name, std::initializer_list<const char*> labels, long long k_l,
                 std::initializer_list<int> rules) {
    std::vector<int> ids = common_rules().ids();
    ids.insert(ids.end(), rules.begin(), rules.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    json ls = json::array();
    for (const auto* l : labels) ls.push_back(l);
    return {{"name", name}, {"labels", std::move(ls)}, {"k_l", k_l}, {"rules", std::move(ids)}};
}

inline json label(const char* text, std::initializer_list<int> rules) {
    std::vector<int> ids = common_rules().ids();
    ids.insert(ids.end(), rules.begin(), rules.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return {{"label", text}, {"rules", std::move(ids)}};
}

inline json schedule(std::size_t t_begin, std::size_t t_update) {
    return {{"t_begin", t_begin}, {"t_update", t_update}, {"max_iterations", 5 * t_update}};
}

}  // namespace detail

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"conll2003",        "wikigold",          "wnut16",
                                            "ncbi-disease",     "bc5cdr",            "chemdner",
                                            "crossner-enzyme",  "crossner-astronomy", "crossner-award",
                                            "crossner-conference"};
    return n;
}

/// Sub-questions, budgets and rule lists of the benchmark setups, plus their self-training schedule.
inline json get(const std::string& name) {
    using detail::label;
    using detail::schedule;
    using detail::type;
    if (name == "conll2003")
        return {{"template", "which"},
                {"output_types",
                 {type("person", {"athlete", "politician", "actor"}, 5000, {1, 3, 4}),
                  type("location", {"country", "city", "state in the USA"}, 5000, {1, 3, 4}),
                  type("organization", {"sports team", "company", "institution"}, 5000, {1, 3, 4})}},
                {"selftrain", schedule(900, 300)}};
    if (name == "wikigold")
        return {{"template", "which"},
                {"output_types",
                 {type("person", {"athlete", "politician", "actor", "director", "musician"}, 4000, {1, 3, 4}),
                  type("location", {"country", "city", "state in the USA", "road", "island"}, 4000, {1, 3, 4}),
                  type("organization", {"sports team", "company", "institution", "association", "band"}, 4000,
                       {1, 3, 4})}},
                {"selftrain", schedule(500, 300)}};
    if (name == "wnut16") {
        json product = type("product", {}, 1000, {1, 3, 4});
        product["labels"] = {label("mobile app", {3}), label("software", {1, 3, 4}),
                             label("operating system", {1, 3, 4}), label("car", {1, 3, 4}),
                             label("smart phone", {1, 3, 4})};
        json facility = type("facility", {}, 1000, {3});
        facility["labels"] = {"facility", "cafe", "restaurant", "college", "music venue",
                              label("sports facility", {1, 3, 4})};
        json company = type("company", {}, 1000, {1, 3, 4});
        company["labels"] = {"company", "technology company", label("news agency", {1, 3}),
                             label("magazine", {1, 3})};
        return {{"template", "which"},
                {"output_types",
                 {type("person", {"athlete", "politician", "actor", "author"}, 1000, {1, 3, 4}),
                  type("location", {"country", "city", "state in the USA"}, 1000, {1, 3, 4}), product, facility,
                  company, type("sports_team", {"sports team"}, 1000, {1, 3, 4}),
                  type("tv_show", {"TV show"}, 1000, {3}), type("movie", {"movie"}, 1000, {3}),
                  type("music_artist", {"band", "rapper", "musician", "singer"}, 1000, {3})}},
                {"selftrain", schedule(900, 450)}};
    }
    if (name == "ncbi-disease")
        return {{"template", "which"},
                {"output_types", {type("disease", {"disease"}, 35000, {4, 9})}},
                {"selftrain", schedule(900, 300)}};
    if (name == "bc5cdr")
        return {{"template", "which"},
                {"output_types",
                 {type("disease", {"disease"}, 15000, {4, 9}),
                  type("chemical", {"chemical compound", "drug"}, 15000, {4, 9})}},
                {"selftrain", schedule(500, 200)}};
    if (name == "chemdner")
        return {{"template", "which"},
                {"output_types", {type("chemical", {"chemical compound", "drug"}, 10000, {4, 9})}},
                {"selftrain", schedule(900, 300)}};
    if (name == "crossner-enzyme")
        return {{"template", "which"},
                {"output_types", {type("enzyme", {"enzyme"}, 5000, {1, 4, 9})}},
                {"selftrain", schedule(350, 700)}};
    if (name == "crossner-astronomy")
        return {{"template", "which"},
                {"output_types", {type("astronomical_object", {"astronomical object"}, 5000, {1, 3, 4})}},
                {"selftrain", schedule(500, 300)}};
    if (name == "crossner-award")
        return {{"template", "which"},
                {"output_types", {type("award", {"award"}, 10000, {1, 3, 4})}},
                {"selftrain", schedule(350, 400)}};
    if (name == "crossner-conference")
        return {{"template", "which"},
                {"output_types", {type("conference", {"conference on artificial intelligence"}, 5000, {3})}},
                {"selftrain", schedule(200, 100)}};
    fail(ErrorKind::config, "unknown preset '" + name + "'");
}

}  // namespace presets

struct PipelineConfig {
    json effective;  // preset merged with user keys; what the config hash covers
    std::filesystem::path base_dir;

    QuestionSetSpec questions;
    std::optional<std::filesystem::path> corpus;
    std::optional<std::filesystem::path> results;
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> quality_phrases;
    std::optional<std::string> endpoint;
    int timeout_ms = 10000;
    int attempts = 3;
    std::size_t top_n = 100;
    std::size_t min_length = 3;
    SelfTrainConfig selftrain;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";

    std::string hash() const { return sha256_hex(effective.dump()); }
};

namespace detail {

inline RuleToggles parse_rules(const json& j, const std::string& where) {
    if (!j.is_array()) fail(ErrorKind::config, where + ": rules must be an array of rule ids");
    RuleToggles t;
    for (const auto& id : j) {
        if (!id.is_number_integer() || id.get<int>() < first_rule || id.get<int>() > last_rule)
            fail(ErrorKind::config, where + ": rule ids must be integers in 1..10");
        t.set(id.get<int>(), true);
    }
    return t;
}

inline std::optional<long long> parse_k(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) fail(ErrorKind::config, where + ": k_l must be an integer");
    return it->get<long long>();
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// Builds a config from JSON. Presets are merged first, then `user` keys replace them.
inline PipelineConfig parse_config(const json& user, const std::filesystem::path& base_dir = ".") {
    if (!user.is_object()) fail(ErrorKind::config, "configuration must be a JSON object");
    json eff = json::object();
    if (auto it = user.find("preset"); it != user.end()) {
        if (!it->is_string()) fail(ErrorKind::config, "preset must be a string");
        eff = presets::get(it->get<std::string>());
    }
    eff.merge_patch(user);

    PipelineConfig c;
    c.effective = eff;
    c.base_dir = base_dir;
    try {
        c.questions.question_template = resolve_template(eff.value("template", std::string("which")));
        c.questions.default_k_l = detail::parse_k(eff, "k_l", "config");
        if (auto it = eff.find("rules"); it != eff.end()) c.questions.default_rules = detail::parse_rules(*it, "config");

        const auto types = eff.find("output_types");
        if (types == eff.end() || !types->is_array() || types->empty())
            fail(ErrorKind::config, "config must declare a non-empty output_types array");
        for (const auto& t : *types) {
            OutputTypeSpec spec;
            spec.name = t.at("name").get<std::string>();
            const std::string where = "output type '" + spec.name + "'";
            spec.k_l = detail::parse_k(t, "k_l", where);
            if (auto it = t.find("rules"); it != t.end()) spec.rules = detail::parse_rules(*it, where);
            const auto labels = t.find("labels");
            if (labels == t.end() || !labels->is_array() || labels->empty())
                fail(ErrorKind::config, where + " needs a non-empty labels array");
            for (const auto& l : *labels) {
                LabelSpec ls;
                if (l.is_string()) {
                    ls.label = l.get<std::string>();
                } else {
                    ls.label = l.at("label").get<std::string>();
                    if (auto it = l.find("id"); it != l.end()) ls.id = it->get<std::string>();
                    ls.k_l = detail::parse_k(l, "k_l", where);
                    if (auto it = l.find("rules"); it != l.end()) ls.rules = detail::parse_rules(*it, where);
                }
                spec.labels.push_back(std::move(ls));
            }
            c.questions.output_types.push_back(std::move(spec));
        }

        auto path_opt = [&](const char* key) -> std::optional<std::filesystem::path> {
            auto it = eff.find(key);
            if (it == eff.end() || it->is_null()) return std::nullopt;
            return detail::resolve(base_dir, it->get<std::string>());
        };
        c.corpus = path_opt("corpus");
        c.results = path_opt("results");
        c.stopwords = path_opt("stopwords");
        c.quality_phrases = path_opt("quality_phrases");
        if (auto it = eff.find("endpoint"); it != eff.end() && !it->is_null()) c.endpoint = it->get<std::string>();
        c.timeout_ms = eff.value("timeout_ms", 10000);
        c.attempts = eff.value("attempts", 3);
        c.top_n = eff.value("top_n", std::size_t{100});
        c.min_length = eff.value("min_length", std::size_t{3});
        if (c.min_length < 1) fail(ErrorKind::config, "min_length must be positive");
        c.seed = eff.value("seed", std::uint64_t{42});
        c.output_dir = detail::resolve(base_dir, eff.value("output_dir", std::string("out")));

        if (auto it = eff.find("selftrain"); it != eff.end()) {
            c.selftrain.t_begin = it->value("t_begin", std::size_t{1});
            c.selftrain.t_update = it->value("t_update", std::size_t{1});
            c.selftrain.max_iterations = it->value("max_iterations", 5 * c.selftrain.t_update);
        }
        c.selftrain.seed = c.seed;
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("malformed configuration: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) throw;
        fail(ErrorKind::config, e.what());
    }
    return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, path.string() + ": " + e.what());
    }
    return parse_config(j, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

/// Pre-flight check: every referenced input exists.
inline void check_inputs_exist(const PipelineConfig& c) {
    auto check = [](const std::optional<std::filesystem::path>& p, const char* what) {
        if (p && !std::filesystem::is_regular_file(*p))
            fail(ErrorKind::config, std::string(what) + " file '" + p->string() + "' does not exist");
    };
    check(c.corpus, "corpus");
    check(c.stopwords, "stopword");
    check(c.quality_phrases, "quality-phrase");
}

}  // namespace askgen
