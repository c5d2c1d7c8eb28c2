#pragma once

// Two-column CoNLL: `token<TAB>tag` per line, blank line between sentences, final newline.

#include "askgen/bio.hpp"
#include "askgen/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace askgen {

inline void write_conll(std::ostream& out, const std::vector<LabeledSentence>& sentences) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& s = sentences[i];
        if (s.tokens.size() != s.tags.size())
            fail(ErrorKind::invariant, "sentence '" + s.sentence_id + "' has mismatched token/tag counts");
        if (i) out << '\n';
        for (std::size_t k = 0; k < s.tokens.size(); ++k) out << s.tokens[k] << '\t' << s.tags[k] << '\n';
    }
}

/// Parses CoNLL text. Sentence ids are the 0-based sentence ordinal. Empty sentences are skipped
/// (a run of blank lines separates once).
inline std::vector<LabeledSentence> read_conll(std::istream& in, const std::string& source) {
    std::vector<LabeledSentence> out;
    LabeledSentence cur;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (cur.tokens.empty()) return;
        cur.sentence_id = std::to_string(out.size());
        out.push_back(std::move(cur));
        cur = {};
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos)
            throw DataError(source, line_no, "expected exactly 'token<TAB>tag'");
        std::string tag = line.substr(tab + 1);
        if (tag != outside_tag && !is_begin(tag) && !is_inside(tag))
            throw DataError(source, line_no, "tag '" + tag + "' is not O, B-<type> or I-<type>");
        cur.tokens.push_back(line.substr(0, tab));
        cur.tags.push_back(std::move(tag));
    }
    flush();
    return out;
}

inline std::vector<LabeledSentence> load_conll(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open CoNLL file '" + path + "'");
    return read_conll(in, path);
}

}  // namespace askgen
