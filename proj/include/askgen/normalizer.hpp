#pragma once

#include "askgen/corpus.hpp"
#include "askgen/error.hpp"
#include "askgen/retrieval.hpp"
#include "askgen/rules.hpp"
#include "askgen/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace askgen {

struct RuleSet {
    RuleToggles enabled = common_rules();
    std::unordered_set<std::string> stopwords;
    std::size_t min_length = 3;
};

/// One lowercase word per line; '#' starts a comment line.
inline std::unordered_set<std::string> read_stopwords(std::istream& in) {
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto word = text::trim(line);
        if (word.empty() || word.front() == '#') continue;
        out.insert(text::fold_case(word));
    }
    return out;
}

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open stopword list '" + path + "'");
    return read_stopwords(in);
}

struct NormalizedPhrase {
    std::string surface;
    RetrievedPhrase origin;
    std::string type_label;
    std::string output_type;
    std::optional<std::string> abbreviation;
};

struct AbbreviationPair {
    std::string long_form;
    std::string short_form;

    friend bool operator==(const AbbreviationPair&, const AbbreviationPair&) = default;
};

namespace detail {

inline std::vector<std::string> keep_nonempty(std::string_view s) {
    const auto t = text::trim(s);
    if (t.empty()) return {};
    return {std::string(t)};
}

inline std::vector<std::string> split_on_and(std::string_view fragment) {
    const auto words = text::split_whitespace(fragment);
    if (std::find(words.begin(), words.end(), "and") == words.end()) return keep_nonempty(fragment);
    std::vector<std::string> out;
    std::vector<std::string> cur;
    for (const auto& w : words) {
        if (w == "and") {
            if (!cur.empty()) out.push_back(text::join(cur, " "));
            cur.clear();
        } else {
            cur.push_back(w);
        }
    }
    if (!cur.empty()) out.push_back(text::join(cur, " "));
    return out;
}

inline std::string strip_definite_article(std::string_view fragment) {
    std::string_view s = text::trim(fragment);
    for (;;) {
        if (s.size() < 4 || text::fold_case(s.substr(0, 3)) != "the") break;
        std::size_t pos = 3;
        if (!text::is_space(text::next_code_point(s, pos))) break;
        const auto rest = text::trim(s.substr(3));
        if (rest.empty()) break;
        s = rest;
    }
    return std::string(s);
}

}  // namespace detail

/// Applies a single phrase-level rule (1..8) to one fragment. Rules 9 and 10 act at match time.
inline std::vector<std::string> apply_rule(int rule_id, std::string_view fragment, std::string_view type_label,
                                           const RuleSet& rules) {
    switch (rule_id) {
    case 1:
        return detail::split_on_and(fragment);
    case 2:
        return detail::keep_nonempty(text::strip_punct(fragment));
    case 3:
        if (text::is_all_lowercase(fragment)) return {};
        return detail::keep_nonempty(fragment);
    case 4:
        return detail::keep_nonempty(detail::strip_definite_article(fragment));
    case 5:
        if (text::length(text::trim(fragment)) < rules.min_length) return {};
        return detail::keep_nonempty(fragment);
    case 6:
        if (rules.stopwords.contains(text::fold_case(text::trim(fragment)))) return {};
        return detail::keep_nonempty(fragment);
    case 7:
        if (text::match_key(fragment) == text::match_key(type_label)) return {};
        return detail::keep_nonempty(fragment);
    case 8:
        return detail::keep_nonempty(fragment);
    case 9:
    case 10:
        fail(ErrorKind::out_of_module,
             "rule " + std::to_string(rule_id) + " is applied during dictionary matching, not normalization");
    default:
        fail(ErrorKind::invalid_argument, "rule id " + std::to_string(rule_id) + " outside 1..10");
    }
}

/// Folds the enabled rules 1..8, in order, over the fragment list, and repeats the whole pass until
/// it changes nothing. A later rule can expose what an earlier one removes ("The sox" passes the
/// lowercase filter, then loses its article); the repeat makes every surviving fragment pass every
/// enabled rule. Rules only shorten or drop fragments, so this terminates.
inline std::vector<std::string> normalize_surface(std::string_view surface, std::string_view type_label,
                                                  const RuleSet& rules) {
    std::vector<std::string> fragments = detail::keep_nonempty(surface);
    for (;;) {
        auto current = fragments;
        for (int id = 1; id <= 8 && !current.empty(); ++id) {
            if (!rules.enabled.enabled(id)) continue;
            std::vector<std::string> next;
            for (const auto& f : current)
                for (auto& g : apply_rule(id, f, type_label, rules)) next.push_back(std::move(g));
            current = std::move(next);
        }
        if (current == fragments) return fragments;
        fragments = std::move(current);
    }
}

/// Schwartz-Hearst short-form check: can the short form's characters be found right to left in the
/// long form, with its first character at the start of a word?
inline bool short_form_matches(std::string_view short_form, std::string_view long_form) {
    const auto sf = text::decode(text::fold_case(short_form));
    const auto lf = text::decode(text::fold_case(long_form));
    long s = static_cast<long>(sf.size()) - 1;
    long l = static_cast<long>(lf.size()) - 1;
    for (; s >= 0; --s) {
        const auto c = sf[static_cast<std::size_t>(s)];
        if (!text::is_alnum(c)) continue;
        while (l >= 0 && (lf[static_cast<std::size_t>(l)] != c ||
                          (s == 0 && l > 0 && text::is_alnum(lf[static_cast<std::size_t>(l - 1)]))))
            --l;
        if (l < 0) return false;
        --l;
    }
    return true;
}

inline bool valid_short_form(std::string_view candidate, std::string_view long_form) {
    const std::size_t len = text::length(candidate);
    if (len < 2 || len > 10) return false;
    if (text::split_whitespace(candidate).size() > 2) return false;
    if (!text::has_alpha(candidate)) return false;
    std::size_t pos = 0;
    if (!text::is_alnum(text::next_code_point(candidate, pos))) return false;
    const std::size_t long_words = text::split_whitespace(long_form).size();
    if (long_words > std::min(len + 5, len * 2)) return false;
    return short_form_matches(candidate, long_form);
}

/// Looks for "<long_form> (<short>)" in the sentence and returns the short form when it passes the
/// Schwartz-Hearst constraints.
inline std::optional<std::string> detect_abbreviation(std::string_view long_form, std::string_view sentence) {
    if (long_form.empty() || sentence.find('(') == std::string_view::npos) return std::nullopt;
    for (std::size_t at = sentence.find(long_form); at != std::string_view::npos;
         at = sentence.find(long_form, at + 1)) {
        std::size_t pos = at + long_form.size();
        while (pos < sentence.size() && (sentence[pos] == ' ' || sentence[pos] == '\t')) ++pos;
        if (pos >= sentence.size() || sentence[pos] != '(') continue;
        int depth = 0;
        std::size_t close = std::string_view::npos;
        for (std::size_t i = pos; i < sentence.size(); ++i) {
            if (sentence[i] == '(') ++depth;
            if (sentence[i] == ')' && --depth == 0) {
                close = i;
                break;
            }
        }
        if (close == std::string_view::npos) continue;
        std::string_view inside = sentence.substr(pos + 1, close - pos - 1);
        if (const auto cut = inside.find_first_of(",;"); cut != std::string_view::npos) inside = inside.substr(0, cut);
        inside = text::trim(inside);
        if (valid_short_form(inside, long_form)) return std::string(inside);
    }
    return std::nullopt;
}

/// Turns one retrieved phrase into zero or more dictionary candidates.
inline std::vector<NormalizedPhrase> normalize(const RetrievedPhrase& phrase, const CorpusSentence& evidence,
                                               const RuleSet& rules, std::string_view type_label,
                                               std::string_view output_type = {}) {
    std::vector<NormalizedPhrase> out;
    for (auto& surface : normalize_surface(phrase.surface, type_label, rules)) {
        NormalizedPhrase n{std::move(surface), phrase, std::string(type_label),
                           std::string(output_type.empty() ? type_label : output_type), std::nullopt};
        if (rules.enabled.enabled(8)) n.abbreviation = detect_abbreviation(n.surface, evidence.text);
        out.push_back(std::move(n));
    }
    return out;
}

}  // namespace askgen
