#pragma once

#include "askgen/error.hpp"
#include "askgen/rules.hpp"
#include "askgen/text.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace askgen {

inline constexpr std::string_view type_placeholder = "[TYPE]";

/// Question pattern with exactly one `[TYPE]` placeholder.
class QuestionTemplate {
public:
    explicit QuestionTemplate(std::string pattern) : pattern_(std::move(pattern)) {
        const auto first = pattern_.find(type_placeholder);
        if (first == std::string::npos)
            fail(ErrorKind::invalid_template, "template '" + pattern_ + "' has no [TYPE] placeholder");
        if (pattern_.find(type_placeholder, first + 1) != std::string::npos)
            fail(ErrorKind::invalid_template, "template '" + pattern_ + "' has more than one [TYPE] placeholder");
        position_ = first;
    }

    const std::string& pattern() const noexcept { return pattern_; }
    std::size_t placeholder_position() const noexcept { return position_; }

    std::string_view prefix() const { return std::string_view(pattern_).substr(0, position_); }
    std::string_view suffix() const {
        return std::string_view(pattern_).substr(position_ + type_placeholder.size());
    }

    friend bool operator==(const QuestionTemplate&, const QuestionTemplate&) = default;

private:
    std::string pattern_;
    std::size_t position_ = 0;
};

namespace templates {
inline QuestionTemplate which() { return QuestionTemplate("Which [TYPE]?"); }
inline QuestionTemplate list_of() { return QuestionTemplate("list of [TYPE]"); }
inline QuestionTemplate example_of() { return QuestionTemplate("example of [TYPE]"); }
inline QuestionTemplate what() { return QuestionTemplate("What [TYPE]?"); }
inline QuestionTemplate bare() { return QuestionTemplate("[TYPE]"); }
}  // namespace templates

/// Named presets: "which" (default), "list_of", "example_of", "what", "bare".
/// Anything else is treated as a literal pattern.
inline QuestionTemplate resolve_template(std::string_view name_or_pattern) {
    if (name_or_pattern.empty() || name_or_pattern == "which") return templates::which();
    if (name_or_pattern == "list_of") return templates::list_of();
    if (name_or_pattern == "example_of") return templates::example_of();
    if (name_or_pattern == "what") return templates::what();
    if (name_or_pattern == "bare") return templates::bare();
    return QuestionTemplate(std::string(name_or_pattern));
}

/// Inserts `type_label` verbatim (no case change) in place of the placeholder.
inline std::string formulate(std::string_view type_label, const QuestionTemplate& tmpl) {
    if (text::trim(type_label).empty()) fail(ErrorKind::invalid_argument, "type label is empty");
    std::string out(tmpl.prefix());
    out.append(type_label);
    out.append(tmpl.suffix());
    return out;
}

struct SubQuestion {
    std::string question_id;
    std::string type_label;
    std::string output_type;
    std::string question_text;
    std::size_t k_l = 1;
    RuleToggles rules;

    friend bool operator==(const SubQuestion&, const SubQuestion&) = default;
};

struct LabelSpec {
    std::string label;
    std::optional<std::string> id;
    std::optional<long long> k_l;
    std::optional<RuleToggles> rules;
};

struct OutputTypeSpec {
    std::string name;
    std::vector<LabelSpec> labels;
    std::optional<long long> k_l;
    std::optional<RuleToggles> rules;
};

struct QuestionSetSpec {
    QuestionTemplate question_template = templates::which();
    std::optional<long long> default_k_l;
    RuleToggles default_rules = common_rules();
    std::vector<OutputTypeSpec> output_types;
};

/// Expands output types x labels into sub-questions, in declaration order.
/// Most specific setting wins: label, then output type, then global default.
inline std::vector<SubQuestion> build_question_set(const QuestionSetSpec& spec) {
    if (spec.output_types.empty()) fail(ErrorKind::config, "configuration declares no output types");
    std::vector<SubQuestion> out;
    std::set<std::string> ids;
    for (const auto& type : spec.output_types) {
        if (text::trim(type.name).empty()) fail(ErrorKind::config, "output type with empty name");
        if (type.labels.empty()) fail(ErrorKind::config, "output type '" + type.name + "' has no labels");
        for (const auto& label : type.labels) {
            SubQuestion q;
            q.type_label = label.label;
            q.output_type = type.name;
            q.question_id = label.id.value_or(type.name + ":" + label.label);
            const auto k = label.k_l ? label.k_l : (type.k_l ? type.k_l : spec.default_k_l);
            if (!k) fail(ErrorKind::config, "no k_l for question '" + q.question_id + "'");
            if (*k <= 0)
                fail(ErrorKind::config, "k_l must be positive for question '" + q.question_id + "' (got " +
                                            std::to_string(*k) + ")");
            q.k_l = static_cast<std::size_t>(*k);
            q.rules = label.rules ? *label.rules : (type.rules ? *type.rules : spec.default_rules);
            try {
                q.question_text = formulate(label.label, spec.question_template);
            } catch (const Error& e) {
                fail(ErrorKind::config, "output type '" + type.name + "': " + e.what());
            }
            if (!ids.insert(q.question_id).second)
                fail(ErrorKind::config, "duplicate question_id '" + q.question_id + "'");
            out.push_back(std::move(q));
        }
    }
    return out;
}

}  // namespace askgen
