#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace askgen {

using TagSequence = std::vector<std::string>;
using TokenSequence = std::vector<std::string>;

struct LabeledSentence {
    std::string sentence_id;
    TokenSequence tokens;
    TagSequence tags;

    friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

inline constexpr std::string_view outside_tag = "O";

inline bool is_begin(std::string_view tag) { return tag.size() > 2 && tag.starts_with("B-"); }
inline bool is_inside(std::string_view tag) { return tag.size() > 2 && tag.starts_with("I-"); }

/// Entity type of a B-/I- tag; empty for O and anything unrecognised.
inline std::string_view tag_type(std::string_view tag) {
    return (is_begin(tag) || is_inside(tag)) ? tag.substr(2) : std::string_view{};
}

/// May `tag` follow `prev`? Only I-t is constrained: it needs B-t or I-t before it.
/// An empty `prev` stands for the sentence start.
inline bool transition_allowed(std::string_view prev, std::string_view tag) {
    if (!is_inside(tag)) return true;
    return (is_begin(prev) || is_inside(prev)) && tag_type(prev) == tag_type(tag);
}

inline bool is_well_formed(const TagSequence& tags) {
    std::string_view prev;
    for (const auto& t : tags) {
        if (t != outside_tag && !is_begin(t) && !is_inside(t)) return false;
        if (!transition_allowed(prev, t)) return false;
        prev = t;
    }
    return true;
}

}  // namespace askgen
