#pragma once

#include "askgen/corpus.hpp"
#include "askgen/error.hpp"
#include "askgen/jsonl.hpp"
#include "askgen/querygen.hpp"
#include "askgen/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

namespace askgen {

struct RetrievedPhrase {
    std::string question_id;
    std::size_t rank = 1;
    std::string surface;
    double score = 0.0;
    std::string sentence_id;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const RetrievedPhrase&, const RetrievedPhrase&) = default;
};

/// Ranked phrases per question_id, each list sorted by rank.
using ResultSet = std::map<std::string, std::vector<RetrievedPhrase>>;

inline json to_json(const RetrievedPhrase& p) {
    return {{"question_id", p.question_id}, {"rank", p.rank},         {"phrase", p.surface},
            {"score", p.score},             {"sentence_id", p.sentence_id}, {"char_start", p.char_start},
            {"char_end", p.char_end}};
}

inline RetrievedPhrase phrase_from_json(const json& j) {
    RetrievedPhrase p;
    p.question_id = require_field(j, "question_id").get<std::string>();
    const auto rank = require_field(j, "rank").get<long long>();
    if (rank < 1) fail(ErrorKind::data, "rank must be >= 1");
    p.rank = static_cast<std::size_t>(rank);
    p.surface = require_field(j, "phrase").get<std::string>();
    p.score = require_field(j, "score").get<double>();
    p.sentence_id = require_field(j, "sentence_id").get<std::string>();
    p.char_start = require_field(j, "char_start").get<std::size_t>();
    p.char_end = require_field(j, "char_end").get<std::size_t>();
    return p;
}

/// Checks one record against the corpus; empty string when valid.
inline std::string check_phrase(const RetrievedPhrase& p, const Corpus* corpus) {
    if (p.char_start >= p.char_end) return "empty or inverted span";
    if (!corpus) return {};
    const CorpusSentence* s = corpus->find(p.sentence_id);
    if (!s) return "unknown sentence_id '" + p.sentence_id + "'";
    const auto slice = text::slice(s->text, p.char_start, p.char_end);
    if (!slice) return "span [" + std::to_string(p.char_start) + ", " +
                                                  std::to_string(p.char_end) + ") out of sentence bounds";
    if (*slice != p.surface)
        return "phrase '" + p.surface + "' does not match sentence slice '" + std::string(*slice) + "'";
    return {};
}

namespace detail {

struct Located {
    RetrievedPhrase phrase;
    std::size_t line;
};

inline ResultSet group_results(std::vector<Located> records, const std::string& source) {
    std::map<std::string, std::vector<Located>> grouped;
    for (auto& r : records) grouped[r.phrase.question_id].push_back(std::move(r));
    ResultSet out;
    for (auto& [qid, list] : grouped) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Located& a, const Located& b) { return a.phrase.rank < b.phrase.rank; });
        auto& dest = out[qid];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0 && list[i].phrase.rank == list[i - 1].phrase.rank)
                throw DataError(source, list[i].line,
                                "duplicate rank " + std::to_string(list[i].phrase.rank) + " for question '" + qid +
                                    "' (first at line " + std::to_string(list[i - 1].line) + ")");
            if (i > 0 && list[i].phrase.score > list[i - 1].phrase.score)
                throw DataError(source, list[i].line,
                                "score increases with rank for question '" + qid + "' at rank " +
                                    std::to_string(list[i].phrase.rank));
            dest.push_back(std::move(list[i].phrase));
        }
    }
    return out;
}

}  // namespace detail

/// Parses and validates a retrieval-results stream (one JSON record per line). Spans are checked
/// against `corpus` when one is given.
inline ResultSet ingest_results(std::istream& in, const std::string& source, const Corpus* corpus) {
    std::vector<detail::Located> records;
    for_each_jsonl(in, source, [&](const json& record, std::size_t line) {
        RetrievedPhrase p = phrase_from_json(record);
        if (auto problem = check_phrase(p, corpus); !problem.empty()) throw DataError(source, line, problem);
        records.push_back({std::move(p), line});
    });
    return detail::group_results(std::move(records), source);
}

/// Validates an in-memory list (e.g. a remote response); `source` labels errors, indices are 1-based.
inline ResultSet validate_results(std::vector<RetrievedPhrase> phrases, const std::string& source,
                                  const Corpus* corpus) {
    std::vector<detail::Located> records;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (auto problem = check_phrase(phrases[i], corpus); !problem.empty())
            throw DataError(source, i + 1, problem);
        records.push_back({std::move(phrases[i]), i + 1});
    }
    return detail::group_results(std::move(records), source);
}

inline ResultSet ingest_results(std::istream& in, const std::string& source, const Corpus& corpus) {
    return ingest_results(in, source, &corpus);
}

inline ResultSet load_results(const std::string& path, const Corpus* corpus) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open retrieval-results file '" + path + "'");
    return ingest_results(in, path, corpus);
}

inline void serialize_results(std::ostream& out, const ResultSet& results) {
    for (const auto& [qid, list] : results)
        for (const auto& p : list) out << to_json(p).dump() << '\n';
}

/// Lowercased, punctuation-stripped tokens of the type label.
/// The template's own words never count since they carry no type signal.
inline std::vector<std::string> content_tokens(const SubQuestion& question) {
    std::vector<std::string> out;
    for (const auto& tok : text::split_whitespace(question.type_label)) {
        auto stripped = text::fold_case(text::strip_punct(tok));
        if (!stripped.empty() && std::find(out.begin(), out.end(), stripped) == out.end())
            out.push_back(std::move(stripped));
    }
    return out;
}

/// Lexical-overlap stand-in for dense phrase retrieval over a corpus with pre-marked candidates.
/// Every candidate scores the number of label tokens present in its sentence; ties fall back to
/// (sentence_id, char_start) order.
inline std::vector<RetrievedPhrase> toy_retrieve(const SubQuestion& question, const Corpus& corpus,
                                                 std::size_t top_n) {
    if (!corpus.has_candidates())
        fail(ErrorKind::unsupported_corpus, "corpus has no candidate spans; toy retrieval needs them");
    const auto wanted = content_tokens(question);

    struct Scored {
        std::size_t score;
        const CorpusSentence* sentence;
        CharSpan span;
    };
    std::vector<Scored> scored;
    for (const auto& s : corpus.sentences()) {
        if (!s.candidates) continue;
        std::unordered_set<std::string> present;
        for (const auto& t : s.tokens) present.insert(text::fold_case(text::strip_punct(t.surface)));
        std::size_t score = 0;
        for (const auto& w : wanted) score += present.contains(w) ? 1 : 0;
        for (const auto& c : *s.candidates) scored.push_back({score, &s, c});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.sentence->sentence_id != b.sentence->sentence_id)
            return a.sentence->sentence_id < b.sentence->sentence_id;
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        return a.span.end < b.span.end;
    });

    std::vector<RetrievedPhrase> out;
    for (std::size_t i = 0; i < scored.size() && i < top_n; ++i) {
        const auto& s = scored[i];
        const auto slice = text::slice(s.sentence->text, s.span.start, s.span.end);
        out.push_back({question.question_id, i + 1, std::string(slice.value_or("")),
                       static_cast<double>(s.score), s.sentence->sentence_id, s.span.start, s.span.end});
    }
    return out;
}

struct SentenceBudgetResult {
    std::string question_id;
    std::vector<std::string> kept_sentences;
    std::vector<RetrievedPhrase> kept_phrases;
    bool exhausted = false;
};

/// Walks results in rank order keeping the first `k_l` distinct sentences. A phrase survives iff its
/// sentence does, including phrases met after the budget filled whose sentence was already kept.
inline SentenceBudgetResult collect_training_sentences(const std::vector<RetrievedPhrase>& results,
                                                       std::size_t k_l) {
    SentenceBudgetResult out;
    if (!results.empty()) out.question_id = results.front().question_id;
    std::unordered_set<std::string> kept;
    for (const auto& p : results) {
        if (!kept.contains(p.sentence_id)) {
            if (kept.size() >= k_l) continue;
            kept.insert(p.sentence_id);
            out.kept_sentences.push_back(p.sentence_id);
        }
        out.kept_phrases.push_back(p);
    }
    out.exhausted = out.kept_sentences.size() < k_l;
    return out;
}

}  // namespace askgen
