#pragma once

#include "askgen/error.hpp"
#include "askgen/jsonl.hpp"
#include "askgen/text.hpp"

#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace askgen {

/// Half-open code-point range inside a sentence's text.
struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Token {
    std::string surface;
    std::size_t start = 0;
    std::size_t end = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

struct CorpusSentence {
    std::string sentence_id;
    std::string text;
    std::vector<Token> tokens;
    std::optional<std::vector<CharSpan>> candidates;

    friend bool operator==(const CorpusSentence&, const CorpusSentence&) = default;
};

/// Returns an empty string when the sentence is well-formed, else a description of the first problem.
inline std::string check_sentence(const CorpusSentence& s) {
    if (s.sentence_id.empty()) return "empty sentence_id";
    const auto bounds = text::boundaries(s.text);
    const std::size_t len = bounds.size() - 1;
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const Token& t = s.tokens[i];
        if (t.start >= t.end || t.end > len)
            return "token " + std::to_string(i) + " span out of bounds";
        if (t.start < prev_end) return "token " + std::to_string(i) + " overlaps or is unsorted";
        const std::string_view slice(s.text.data() + bounds[t.start], bounds[t.end] - bounds[t.start]);
        if (slice != t.surface)
            return "token " + std::to_string(i) + " surface '" + t.surface + "' != text slice '" +
                   std::string(slice) + "'";
        prev_end = t.end;
    }
    if (s.candidates) {
        for (const CharSpan& c : *s.candidates)
            if (c.start >= c.end || c.end > len) return "candidate span out of bounds";
    }
    return {};
}

/// Builds a sentence by tokenizing on whitespace; handy for tests and generated corpora.
inline CorpusSentence make_sentence(std::string id, std::string text_value) {
    CorpusSentence s{std::move(id), std::move(text_value), {}, std::nullopt};
    std::size_t pos = 0;
    std::size_t cp = 0;
    bool in_token = false;
    std::size_t tok_start_cp = 0;
    std::size_t tok_start_byte = 0;
    while (pos < s.text.size()) {
        const std::size_t byte = pos;
        const auto c = text::next_code_point(s.text, pos);
        if (text::is_space(c)) {
            if (in_token) s.tokens.push_back({s.text.substr(tok_start_byte, byte - tok_start_byte), tok_start_cp, cp});
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            tok_start_cp = cp;
            tok_start_byte = byte;
        }
        ++cp;
    }
    if (in_token) s.tokens.push_back({s.text.substr(tok_start_byte), tok_start_cp, cp});
    return s;
}

inline std::vector<std::string> token_surfaces(const CorpusSentence& s) {
    std::vector<std::string> out;
    out.reserve(s.tokens.size());
    for (const auto& t : s.tokens) out.push_back(t.surface);
    return out;
}

inline json to_json(const CorpusSentence& s) {
    json tokens = json::array();
    for (const auto& t : s.tokens) tokens.push_back(json::array({t.surface, t.start, t.end}));
    json out = {{"sentence_id", s.sentence_id}, {"text", s.text}, {"tokens", std::move(tokens)}};
    if (s.candidates) {
        json cands = json::array();
        for (const auto& c : *s.candidates) cands.push_back(json::array({c.start, c.end}));
        out["candidates"] = std::move(cands);
    }
    return out;
}

inline CorpusSentence sentence_from_json(const json& j) {
    CorpusSentence s;
    s.sentence_id = require_field(j, "sentence_id").get<std::string>();
    s.text = require_field(j, "text").get<std::string>();
    for (const auto& t : require_field(j, "tokens")) {
        if (!t.is_array() || t.size() != 3) fail(ErrorKind::data, "token must be [surface, start, end]");
        s.tokens.push_back({t[0].get<std::string>(), t[1].get<std::size_t>(), t[2].get<std::size_t>()});
    }
    if (auto it = j.find("candidates"); it != j.end() && !it->is_null()) {
        std::vector<CharSpan> cands;
        for (const auto& c : *it) {
            if (!c.is_array() || c.size() != 2) fail(ErrorKind::data, "candidate must be [start, end]");
            cands.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>()});
        }
        s.candidates = std::move(cands);
    }
    return s;
}

/// Sentences in file order plus an id index.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<CorpusSentence> sentences) {
        for (auto& s : sentences) add(std::move(s));
    }

    void add(CorpusSentence s) {
        if (index_.contains(s.sentence_id))
            fail(ErrorKind::data, "duplicate sentence_id '" + s.sentence_id + "'");
        index_.emplace(s.sentence_id, sentences_.size());
        sentences_.push_back(std::move(s));
    }

    const CorpusSentence* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &sentences_[it->second];
    }

    const CorpusSentence& at(std::string_view id) const {
        if (const auto* s = find(id)) return *s;
        fail(ErrorKind::data, "unknown sentence_id '" + std::string(id) + "'");
    }

    const std::vector<CorpusSentence>& sentences() const noexcept { return sentences_; }
    std::size_t size() const noexcept { return sentences_.size(); }
    bool empty() const noexcept { return sentences_.empty(); }

    bool has_candidates() const {
        for (const auto& s : sentences_)
            if (s.candidates) return true;
        return false;
    }

private:
    std::vector<CorpusSentence> sentences_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline Corpus read_corpus(std::istream& in, const std::string& source) {
    Corpus corpus;
    for_each_jsonl(in, source, [&](const json& record, std::size_t line) {
        CorpusSentence s = sentence_from_json(record);
        if (auto problem = check_sentence(s); !problem.empty()) throw DataError(source, line, problem);
        if (corpus.find(s.sentence_id)) throw DataError(source, line, "duplicate sentence_id '" + s.sentence_id + "'");
        corpus.add(std::move(s));
    });
    return corpus;
}

inline Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open corpus file '" + path + "'");
    return read_corpus(in, path);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& s : corpus.sentences()) out << to_json(s).dump() << '\n';
}

}  // namespace askgen
