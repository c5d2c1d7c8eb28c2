#pragma once

#include "askgen/bio.hpp"
#include "askgen/error.hpp"
#include "askgen/jsonl.hpp"
#include "askgen/retrieval.hpp"
#include "askgen/text.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace askgen {

struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string type;

    friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

/// conlleval chunking: B always opens; an I whose type differs from the open chunk (or follows O)
/// opens a new chunk of its own type; anything that is not B-/I- closes the open chunk.
inline std::vector<EntitySpan> extract_entities(const TagSequence& tags) {
    std::vector<EntitySpan> out;
    bool open = false;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const auto& tag = tags[i];
        const auto type = tag_type(tag);
        if (is_inside(tag) && open && out.back().type == type) {
            out.back().end = i + 1;
        } else if (is_begin(tag) || is_inside(tag)) {
            out.push_back({i, i + 1, std::string(type)});
            open = true;
        } else {
            open = false;
        }
    }
    return out;
}

struct Entity {
    std::string sentence_id;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string type;

    friend auto operator<=>(const Entity&, const Entity&) = default;
};

using EntitySet = std::set<Entity>;

inline EntitySet entities_of(const std::vector<LabeledSentence>& sentences) {
    EntitySet out;
    for (const auto& s : sentences)
        for (auto& e : extract_entities(s.tags)) out.insert({s.sentence_id, e.start, e.end, std::move(e.type)});
    return out;
}

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t correct = 0;
    std::size_t gold = 0;
    std::size_t predicted = 0;
};

/// P = correct/predicted, R = correct/gold, with 0 for empty denominators and F1 = 0 when P = R = 0.
/// F1 is evaluated as 2c/(gold+predicted), the same quantity as 2PR/(P+R) with a single rounding.
inline Prf make_prf(std::size_t correct, std::size_t gold, std::size_t predicted) {
    Prf r{0.0, 0.0, 0.0, correct, gold, predicted};
    if (predicted) r.precision = static_cast<double>(correct) / static_cast<double>(predicted);
    if (gold) r.recall = static_cast<double>(correct) / static_cast<double>(gold);
    if (correct) r.f1 = 2.0 * static_cast<double>(correct) / static_cast<double>(gold + predicted);
    return r;
}

struct EntityScores {
    Prf overall;
    std::map<std::string, Prf> per_type;
};

/// Exact-match (sentence, start, end, type) scoring, micro-averaged, with per-type counts.
inline EntityScores entity_f1(const EntitySet& gold, const EntitySet& pred) {
    std::map<std::string, std::array<std::size_t, 3>> counts;  // correct, gold, predicted
    std::size_t correct = 0;
    for (const auto& g : gold) ++counts[g.type][1];
    for (const auto& p : pred) {
        ++counts[p.type][2];
        if (gold.contains(p)) {
            ++correct;
            ++counts[p.type][0];
        }
    }
    EntityScores s;
    s.overall = make_prf(correct, gold.size(), pred.size());
    for (const auto& [type, c] : counts) s.per_type[type] = make_prf(c[0], c[1], c[2]);
    return s;
}

/// Scores parallel sentence lists (same order, same token counts).
inline EntityScores evaluate(const std::vector<LabeledSentence>& gold, const std::vector<LabeledSentence>& pred) {
    if (gold.size() != pred.size())
        fail(ErrorKind::data, "gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                                  std::to_string(pred.size()));
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (gold[i].tokens.size() != pred[i].tags.size())
            fail(ErrorKind::data, "sentence " + std::to_string(i) + ": gold has " +
                                      std::to_string(gold[i].tokens.size()) + " tokens, prediction has " +
                                      std::to_string(pred[i].tags.size()) + " tags");
    EntitySet g;
    EntitySet p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto id = std::to_string(i);
        for (auto& e : extract_entities(gold[i].tags)) g.insert({id, e.start, e.end, std::move(e.type)});
        for (auto& e : extract_entities(pred[i].tags)) p.insert({id, e.start, e.end, std::move(e.type)});
    }
    return entity_f1(g, p);
}

inline json to_json(const Prf& p) {
    return {{"P", p.precision}, {"R", p.recall},     {"F1", p.f1},
            {"correct", p.correct}, {"gold", p.gold}, {"predicted", p.predicted}};
}

inline json to_json(const EntityScores& s) {
    json per_type = json::object();
    for (const auto& [type, prf] : s.per_type) per_type[type] = to_json(prf);
    return {{"overall", to_json(s.overall)}, {"per_type", std::move(per_type)}};
}

inline std::string format_report(const EntityScores& s) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    auto row = [&](const std::string& name, const Prf& p) {
        out << std::left << std::setw(20) << name << std::right << " P " << std::setw(6) << 100 * p.precision
            << "  R " << std::setw(6) << 100 * p.recall << "  F1 " << std::setw(6) << 100 * p.f1 << "  ("
            << p.correct << " correct, " << p.gold << " gold, " << p.predicted << " predicted)\n";
    };
    row("overall", s.overall);
    for (const auto& [type, p] : s.per_type) row(type, p);
    return out.str();
}

// ---------------------------------------------------------------------------
// Retrieval quality
// ---------------------------------------------------------------------------

/// (question_id, rank) -> is the phrase a correct-type entity
using RetrievalJudgments = std::map<std::pair<std::string, std::size_t>, bool>;

inline RetrievalJudgments read_judgments(std::istream& in, const std::string& source) {
    RetrievalJudgments out;
    for_each_jsonl(in, source, [&](const json& r, std::size_t line) {
        const auto qid = require_field(r, "question_id").get<std::string>();
        const auto rank = require_field(r, "rank").get<long long>();
        if (rank < 1) throw DataError(source, line, "rank must be >= 1");
        const bool correct = require_field(r, "correct").get<bool>();
        if (!out.emplace(std::make_pair(qid, static_cast<std::size_t>(rank)), correct).second)
            throw DataError(source, line, "duplicate judgment for (" + qid + ", " + std::to_string(rank) + ")");
    });
    return out;
}

inline RetrievalJudgments load_judgments(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open judgment file '" + path + "'");
    return read_judgments(in, path);
}

/// Fraction judged correct among the top min(k, |results|) results of one question.
inline double precision_at_k(const std::vector<RetrievedPhrase>& results, const RetrievalJudgments& judgments,
                             std::size_t k) {
    const std::size_t n = std::min(k, results.size());
    if (n == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = judgments.find({results[i].question_id, results[i].rank});
        if (it == judgments.end())
            fail(ErrorKind::incomplete_judgments, "no judgment for question '" + results[i].question_id +
                                                      "' rank " + std::to_string(results[i].rank));
        correct += it->second ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

/// Distinct case-folded surfaces among the top min(k, |results|).
inline std::size_t diversity(const std::vector<RetrievedPhrase>& results, std::size_t k) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < std::min(k, results.size()); ++i) seen.insert(text::fold_case(results[i].surface));
    return seen.size();
}

struct RetrievalQuality {
    std::map<std::string, double> precision;     // per question
    std::map<std::string, std::size_t> diversity;  // per question
    double macro_precision = 0.0;
    double macro_diversity = 0.0;
};

/// Per-question P@k and Diversity, then unweighted means over questions.
inline RetrievalQuality retrieval_quality(const ResultSet& results, const RetrievalJudgments& judgments,
                                          std::size_t k) {
    RetrievalQuality q;
    for (const auto& [qid, list] : results) {
        q.precision[qid] = precision_at_k(list, judgments, k);
        q.diversity[qid] = diversity(list, k);
    }
    if (!results.empty()) {
        for (const auto& [qid, p] : q.precision) q.macro_precision += p;
        for (const auto& [qid, d] : q.diversity) q.macro_diversity += static_cast<double>(d);
        q.macro_precision /= static_cast<double>(results.size());
        q.macro_diversity /= static_cast<double>(results.size());
    }
    return q;
}

}  // namespace askgen
