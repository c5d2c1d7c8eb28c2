#pragma once

#include "askgen/bio.hpp"
#include "askgen/corpus.hpp"
#include "askgen/error.hpp"
#include "askgen/normalizer.hpp"
#include "askgen/text.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace askgen {

// ---------------------------------------------------------------------------
// Pseudo-dictionary
// ---------------------------------------------------------------------------

using TypeCounts = std::map<std::string, std::uint64_t>;

struct DictionaryEntry {
    std::string display;
    TypeCounts counts;

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (const auto& [type, c] : counts) n += c;
        return n;
    }
};

/// Normalized phrases keyed by their lowercase, whitespace-normalized form.
/// Abbreviations hang off their long form and never become entries themselves.
class PseudoDictionary {
public:
    void add(std::string_view surface, const std::string& type, std::uint64_t count = 1) {
        if (count == 0) return;
        auto key = text::match_key(surface);
        if (key.empty()) return;
        auto [it, inserted] = entries_.try_emplace(std::move(key));
        if (inserted) it->second.display = std::string(text::trim(surface));
        it->second.counts[type] += count;
    }

    void add_abbreviation(std::string_view long_form, std::string_view short_form) {
        auto long_key = text::match_key(long_form);
        auto short_key = text::match_key(short_form);
        if (long_key.empty() || short_key.empty()) return;
        abbreviations_[std::move(short_key)].insert(std::move(long_key));
    }

    const DictionaryEntry* find(std::string_view key) const {
        auto it = entries_.find(std::string(key));
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, DictionaryEntry>& entries() const noexcept { return entries_; }
    /// short-form key -> long-form keys it abbreviates
    const std::map<std::string, std::set<std::string>>& abbreviations() const noexcept { return abbreviations_; }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const std::vector<std::string>& quality_phrases() const noexcept { return quality_phrases_; }
    void set_quality_phrases(std::vector<std::string> phrases) { quality_phrases_ = std::move(phrases); }

private:
    std::map<std::string, DictionaryEntry> entries_;
    std::map<std::string, std::set<std::string>> abbreviations_;
    std::vector<std::string> quality_phrases_;
};

/// Each normalized phrase adds one to its output type's count; display casing is first-seen.
inline PseudoDictionary build_dictionary(const std::vector<NormalizedPhrase>& normalized) {
    PseudoDictionary dict;
    for (const auto& n : normalized) dict.add(n.surface, n.output_type);
    for (const auto& n : normalized)
        if (n.abbreviation) dict.add_abbreviation(n.surface, *n.abbreviation);
    return dict;
}

/// `phrase<TAB>type<TAB>count`, sorted by phrase then type.
inline void write_dictionary_tsv(std::ostream& out, const PseudoDictionary& dict) {
    std::vector<std::tuple<std::string, std::string, std::uint64_t>> rows;
    for (const auto& [key, entry] : dict.entries())
        for (const auto& [type, count] : entry.counts) rows.emplace_back(entry.display, type, count);
    std::sort(rows.begin(), rows.end());
    for (const auto& [phrase, type, count] : rows) out << phrase << '\t' << type << '\t' << count << '\n';
}

inline std::vector<std::string> read_phrase_list(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto p = text::trim(line);
        if (!p.empty()) out.emplace_back(p);
    }
    return out;
}

inline std::vector<std::string> load_phrase_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open phrase list '" + path + "'");
    return read_phrase_list(in);
}

// ---------------------------------------------------------------------------
// Token-level multi-pattern matcher
// ---------------------------------------------------------------------------

/// Half-open token window [start, end) matching pattern `pattern`.
struct RawMatch {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t pattern = 0;

    friend auto operator<=>(const RawMatch&, const RawMatch&) = default;
};

/// Trie over interned lowercase tokens. From every start position it walks as far as the trie
/// allows, reporting each terminal node, so lookups cost O(tokens x longest pattern).
class PhraseMatcher {
public:
    PhraseMatcher() { nodes_.emplace_back(); }

    explicit PhraseMatcher(const std::vector<std::string>& keys) : PhraseMatcher() {
        for (const auto& k : keys) add(k);
    }

    /// Returns the pattern index; re-adding an existing key returns its original index.
    std::size_t add(std::string_view phrase) {
        const auto words = text::split_whitespace(text::fold_case(phrase));
        if (words.empty()) fail(ErrorKind::invalid_argument, "empty pattern");
        std::uint32_t node = 0;
        for (const auto& w : words) {
            const std::uint64_t edge = edge_key(node, intern(w));
            auto it = edges_.find(edge);
            if (it == edges_.end()) {
                it = edges_.emplace(edge, static_cast<std::uint32_t>(nodes_.size())).first;
                nodes_.emplace_back();
            }
            node = it->second;
        }
        if (!nodes_[node].pattern) {
            nodes_[node].pattern = patterns_.size();
            patterns_.push_back(text::join(words, " "));
        }
        return *nodes_[node].pattern;
    }

    const std::string& pattern(std::size_t i) const { return patterns_.at(i); }
    std::size_t pattern_count() const noexcept { return patterns_.size(); }

    /// All matching windows over already-folded tokens, ordered by (start, end).
    std::vector<RawMatch> find_all(const std::vector<std::string>& folded_tokens) const {
        std::vector<std::uint32_t> ids;
        ids.reserve(folded_tokens.size());
        for (const auto& t : folded_tokens) {
            auto it = vocab_.find(t);
            ids.push_back(it == vocab_.end() ? unknown_token : it->second);
        }
        std::vector<RawMatch> out;
        for (std::size_t start = 0; start < ids.size(); ++start) {
            std::uint32_t node = 0;
            for (std::size_t end = start; end < ids.size(); ++end) {
                if (ids[end] == unknown_token) break;
                auto it = edges_.find(edge_key(node, ids[end]));
                if (it == edges_.end()) break;
                node = it->second;
                if (nodes_[node].pattern) out.push_back({start, end + 1, *nodes_[node].pattern});
            }
        }
        return out;
    }

private:
    static constexpr std::uint32_t unknown_token = 0xFFFFFFFFu;

    struct Node {
        std::optional<std::size_t> pattern;
    };

    static std::uint64_t edge_key(std::uint32_t node, std::uint32_t token) {
        return (static_cast<std::uint64_t>(node) << 32) | token;
    }

    std::uint32_t intern(const std::string& w) {
        auto [it, inserted] = vocab_.try_emplace(w, static_cast<std::uint32_t>(vocab_.size()));
        return it->second;
    }

    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> edges_;
    std::unordered_map<std::string, std::uint32_t> vocab_;
    std::vector<std::string> patterns_;
};

inline std::vector<std::string> folded_tokens(const CorpusSentence& s) {
    std::vector<std::string> out;
    out.reserve(s.tokens.size());
    for (const auto& t : s.tokens) out.push_back(text::match_key(t.surface));
    return out;
}

/// Keeps the leftmost match, preferring the longer one at equal start; drops anything overlapping.
inline std::vector<RawMatch> resolve_leftmost_longest(std::vector<RawMatch> matches) {
    std::sort(matches.begin(), matches.end(), [](const RawMatch& a, const RawMatch& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end > b.end;
        return a.pattern < b.pattern;
    });
    std::vector<RawMatch> out;
    std::size_t frontier = 0;
    for (const auto& m : matches) {
        if (!out.empty() && m.start < frontier) continue;
        out.push_back(m);
        frontier = m.end;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dictionary matching
// ---------------------------------------------------------------------------

struct MatchSpan {
    std::string sentence_id;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    std::string phrase_key;
    std::string assigned_type;  // empty until apportioned
    bool via_abbreviation = false;

    friend bool operator==(const MatchSpan&, const MatchSpan&) = default;
};

/// Smallest quality-phrase window that strictly contains the span; the span itself otherwise.
/// Ties in size go to the leftmost window.
inline MatchSpan refine_boundaries(const MatchSpan& span, const CorpusSentence& sentence,
                                   const PhraseMatcher& quality) {
    MatchSpan out = span;
    std::optional<RawMatch> best;
    for (const auto& q : quality.find_all(folded_tokens(sentence))) {
        const bool contains = q.start <= span.token_start && q.end >= span.token_end;
        const bool strict = (q.end - q.start) > (span.token_end - span.token_start);
        if (!contains || !strict) continue;
        if (!best || (q.end - q.start) < (best->end - best->start)) best = q;
    }
    if (best) {
        out.token_start = best->start;
        out.token_end = best->end;
    }
    return out;
}

inline MatchSpan refine_boundaries(const MatchSpan& span, const CorpusSentence& sentence,
                                   const std::vector<std::string>& quality_phrases) {
    PhraseMatcher quality;
    for (const auto& p : quality_phrases)
        if (!text::match_key(p).empty()) quality.add(p);
    return refine_boundaries(span, sentence, quality);
}

/// Precompiled matcher for a dictionary plus its abbreviation patterns.
class DictionaryMatcher {
public:
    DictionaryMatcher(const PseudoDictionary& dict, const RuleSet& rules) : rules_(rules) {
        for (const auto& [key, entry] : dict.entries()) {
            const auto idx = matcher_.add(key);
            targets_.resize(std::max(targets_.size(), idx + 1));
            targets_[idx] = {key, false};
        }
        for (const auto& [short_key, long_keys] : dict.abbreviations()) {
            if (dict.find(short_key)) continue;
            if (rules.enabled.enabled(6) && rules.stopwords.contains(short_key)) continue;
            // an abbreviation shared by several long forms follows the most retrieved one
            const std::string* chosen = nullptr;
            std::uint64_t best = 0;
            for (const auto& lk : long_keys) {
                const auto* e = dict.find(lk);
                if (!e) continue;
                if (!chosen || e->total() > best) {
                    chosen = &lk;
                    best = e->total();
                }
            }
            if (!chosen) continue;
            const auto idx = matcher_.add(short_key);
            targets_.resize(std::max(targets_.size(), idx + 1));
            targets_[idx] = {*chosen, true};
        }
        if (rules.enabled.enabled(10))
            for (const auto& p : dict.quality_phrases())
                if (!text::match_key(p).empty()) quality_.add(p);
    }

    /// Every window matching an entry or abbreviation, after the Rule 9 filter, ordered by (start, end).
    std::vector<RawMatch> candidates(const CorpusSentence& sentence) const {
        auto all = matcher_.find_all(folded_tokens(sentence));
        if (!rules_.enabled.enabled(9)) return all;
        std::erase_if(all, [&](const RawMatch& m) {
            return m.end - m.start == 1 && text::is_all_lowercase(sentence.tokens[m.start].surface);
        });
        return all;
    }

    std::vector<MatchSpan> match(const CorpusSentence& sentence) const {
        std::vector<MatchSpan> spans;
        for (const auto& m : resolve_leftmost_longest(candidates(sentence))) {
            const auto& target = targets_[m.pattern];
            spans.push_back({sentence.sentence_id, m.start, m.end, target.key, {}, target.abbreviation});
        }
        if (rules_.enabled.enabled(10) && quality_.pattern_count() > 0) expand(spans, sentence);
        return spans;
    }

    const PhraseMatcher& phrase_matcher() const noexcept { return matcher_; }

private:
    struct Target {
        std::string key;
        bool abbreviation = false;
    };

    void expand(std::vector<MatchSpan>& spans, const CorpusSentence& sentence) const {
        for (std::size_t i = 0; i < spans.size(); ++i) {
            const MatchSpan wider = refine_boundaries(spans[i], sentence, quality_);
            if (wider.token_start == spans[i].token_start && wider.token_end == spans[i].token_end) continue;
            bool clash = false;
            for (std::size_t j = 0; j < spans.size() && !clash; ++j)
                clash = j != i && spans[j].token_start < wider.token_end && wider.token_start < spans[j].token_end;
            if (!clash) spans[i] = wider;
        }
    }

    RuleSet rules_;
    PhraseMatcher matcher_;
    PhraseMatcher quality_;
    std::vector<Target> targets_;
};

/// Case-insensitive token-boundary matching of every entry over every sentence. Types are unassigned.
inline std::vector<MatchSpan> match_sentences(const PseudoDictionary& dict, const std::vector<CorpusSentence>& sentences,
                                              const RuleSet& rules) {
    std::vector<MatchSpan> out;
    if (dict.empty()) return out;
    const DictionaryMatcher matcher(dict, rules);
    for (const auto& s : sentences)
        for (auto& m : matcher.match(s)) out.push_back(std::move(m));
    return out;
}

// ---------------------------------------------------------------------------
// Ambiguity apportionment
// ---------------------------------------------------------------------------

/// Largest-remainder split of `n` slots across types in proportion to their counts. Remainders are
/// compared exactly; ties go to the larger count, then the lexicographically smaller type name.
inline std::map<std::string, std::size_t> largest_remainder(const TypeCounts& counts, std::size_t n) {
    __extension__ typedef unsigned __int128 wide;
    wide total = 0;
    for (const auto& [type, c] : counts) total += c;
    std::map<std::string, std::size_t> out;
    if (total == 0) fail(ErrorKind::invalid_argument, "apportionment needs at least one positive count");

    struct Share {
        const std::string* type;
        std::uint64_t count;
        wide remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [type, c] : counts) {
        const wide numer = static_cast<wide>(n) * c;
        const auto floor = static_cast<std::size_t>(numer / total);
        out[type] = floor;
        assigned += floor;
        shares.push_back({&type, c, numer % total});
    }
    std::sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        if (a.count != b.count) return a.count > b.count;
        return *a.type < *b.type;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++out[*shares[i].type];
    return out;
}

/// Assigns types to one entry's occurrences. Occurrences are ordered by (sentence_id, token_start)
/// and dealt out in contiguous blocks, largest allocation first.
inline std::vector<MatchSpan> apportion_types(const DictionaryEntry& entry, std::vector<MatchSpan> occurrences) {
    std::sort(occurrences.begin(), occurrences.end(), [](const MatchSpan& a, const MatchSpan& b) {
        if (a.sentence_id != b.sentence_id) return a.sentence_id < b.sentence_id;
        return a.token_start < b.token_start;
    });
    const auto alloc = largest_remainder(entry.counts, occurrences.size());
    std::vector<std::pair<std::string, std::size_t>> order(alloc.begin(), alloc.end());
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        const auto ca = entry.counts.at(a.first);
        const auto cb = entry.counts.at(b.first);
        if (ca != cb) return ca > cb;
        return a.first < b.first;
    });
    std::size_t i = 0;
    for (const auto& [type, n] : order)
        for (std::size_t k = 0; k < n; ++k) occurrences[i++].assigned_type = type;
    return occurrences;
}

/// Apportions every entry's occurrences; the result keeps the input's order.
inline std::vector<MatchSpan> assign_types(const PseudoDictionary& dict, const std::vector<MatchSpan>& spans) {
    std::map<std::string, std::vector<std::size_t>> by_key;
    for (std::size_t i = 0; i < spans.size(); ++i) by_key[spans[i].phrase_key].push_back(i);
    std::vector<MatchSpan> out = spans;
    for (const auto& [key, idx] : by_key) {
        const auto* entry = dict.find(key);
        if (!entry) fail(ErrorKind::invariant, "match refers to unknown dictionary key '" + key + "'");
        std::vector<MatchSpan> occ;
        for (auto i : idx) occ.push_back(spans[i]);
        // apportion_types sorts by (sentence_id, token_start); map results back through the same order
        std::vector<std::size_t> order(idx);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (spans[a].sentence_id != spans[b].sentence_id) return spans[a].sentence_id < spans[b].sentence_id;
            return spans[a].token_start < spans[b].token_start;
        });
        const auto assigned = apportion_types(*entry, std::move(occ));
        for (std::size_t k = 0; k < order.size(); ++k) out[order[k]].assigned_type = assigned[k].assigned_type;
    }
    return out;
}

// ---------------------------------------------------------------------------
// BIO emission
// ---------------------------------------------------------------------------

/// One LabeledSentence per input sentence, in input order; sentences without spans stay all-O.
inline std::vector<LabeledSentence> emit_bio(const std::vector<CorpusSentence>& sentences,
                                             const std::vector<MatchSpan>& spans) {
    std::unordered_map<std::string, std::vector<const MatchSpan*>> by_sentence;
    for (const auto& s : spans) by_sentence[s.sentence_id].push_back(&s);
    std::vector<LabeledSentence> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        LabeledSentence ls{s.sentence_id, token_surfaces(s), TagSequence(s.tokens.size(), std::string(outside_tag))};
        std::vector<bool> used(s.tokens.size(), false);
        if (auto it = by_sentence.find(s.sentence_id); it != by_sentence.end()) {
            for (const MatchSpan* m : it->second) {
                if (m->token_start >= m->token_end || m->token_end > s.tokens.size())
                    fail(ErrorKind::invariant, "span [" + std::to_string(m->token_start) + ", " +
                                                   std::to_string(m->token_end) + ") outside sentence '" +
                                                   s.sentence_id + "'");
                if (m->assigned_type.empty())
                    fail(ErrorKind::invariant, "span in sentence '" + s.sentence_id + "' has no assigned type");
                for (auto k = m->token_start; k < m->token_end; ++k) {
                    if (used[k])
                        fail(ErrorKind::invariant, "overlapping spans in sentence '" + s.sentence_id +
                                                       "' at token " + std::to_string(k));
                    used[k] = true;
                    ls.tags[k] = (k == m->token_start ? "B-" : "I-") + m->assigned_type;
                }
            }
        }
        out.push_back(std::move(ls));
    }
    return out;
}

struct Annotation {
    std::vector<MatchSpan> spans;  // resolved and typed
    std::vector<LabeledSentence> labeled;
};

/// match -> apportion -> BIO, the whole dictionary-matching stage.
inline Annotation annotate(const PseudoDictionary& dict, const std::vector<CorpusSentence>& sentences,
                           const RuleSet& rules) {
    Annotation a;
    a.spans = assign_types(dict, match_sentences(dict, sentences, rules));
    a.labeled = emit_bio(sentences, a.spans);
    return a;
}

}  // namespace askgen
