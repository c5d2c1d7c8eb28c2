#pragma once

// UTF-8 helpers. Offsets exposed by this project are code-point offsets;
// everything is stored as UTF-8 std::string internally.

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace askgen::text {

using CodePoint = UChar32;

inline constexpr CodePoint replacement_char = 0xFFFD;

/// Decodes one code point at byte offset `pos` and advances it. Malformed bytes decode to U+FFFD.
inline CodePoint next_code_point(std::string_view s, std::size_t& pos) {
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = static_cast<int32_t>(pos);
    const auto n = static_cast<int32_t>(s.size());
    CodePoint c = 0;
    U8_NEXT(p, i, n, c);
    pos = static_cast<std::size_t>(i);
    return c < 0 ? replacement_char : c;
}

inline std::vector<CodePoint> decode(std::string_view s) {
    std::vector<CodePoint> out;
    out.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size();) out.push_back(next_code_point(s, pos));
    return out;
}

inline void append(std::string& out, CodePoint c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
    if (error) {
        len = 0;
        U8_APPEND_UNSAFE(reinterpret_cast<uint8_t*>(buf), len, replacement_char);
    }
    out.append(buf, static_cast<std::size_t>(len));
}

inline std::string encode(const std::vector<CodePoint>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (CodePoint c : cps) append(out, c);
    return out;
}

inline std::size_t length(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t pos = 0; pos < s.size(); ++n) next_code_point(s, pos);
    return n;
}

/// Byte offset of every code point boundary, including the end: size() == length(s) + 1.
inline std::vector<std::size_t> boundaries(std::string_view s) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        out.push_back(pos);
        next_code_point(s, pos);
    }
    out.push_back(s.size());
    return out;
}

/// Code-point slice [start, end); nullopt when the range is empty-inverted or out of bounds.
inline std::optional<std::string_view> slice(std::string_view s, std::size_t start, std::size_t end) {
    if (start > end) return std::nullopt;
    const auto b = boundaries(s);
    if (end >= b.size()) return std::nullopt;
    return s.substr(b[start], b[end] - b[start]);
}

/// Unicode simple lowercase mapping, code point by code point.
inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size();) append(out, u_tolower(next_code_point(s, pos)));
    return out;
}

inline bool is_punct(CodePoint c) { return u_ispunct(c) != 0; }
inline bool is_space(CodePoint c) { return u_isUWhiteSpace(c) != 0; }
inline bool is_alpha(CodePoint c) { return u_isalpha(c) != 0; }
inline bool is_upper(CodePoint c) { return u_isupper(c) != 0 || u_istitle(c) != 0; }
inline bool is_alnum(CodePoint c) { return u_isalnum(c) != 0; }
inline bool is_digit(CodePoint c) { return u_isdigit(c) != 0; }

template <class Pred>
bool any_of(std::string_view s, Pred pred) {
    for (std::size_t pos = 0; pos < s.size();)
        if (pred(next_code_point(s, pos))) return true;
    return false;
}

inline bool has_alpha(std::string_view s) { return any_of(s, is_alpha); }
inline bool has_upper(std::string_view s) { return any_of(s, is_upper); }

/// At least one letter and no uppercase letter. Digits and symbols alone do not count.
inline bool is_all_lowercase(std::string_view s) { return has_alpha(s) && !has_upper(s); }

template <class Pred>
std::string_view trim_if(std::string_view s, Pred pred) {
    auto cps = boundaries(s);
    std::size_t first = 0;
    std::size_t last = cps.size() - 1;  // index of end boundary
    while (first < last) {
        std::size_t pos = cps[first];
        if (!pred(next_code_point(s, pos))) break;
        ++first;
    }
    while (last > first) {
        std::size_t pos = cps[last - 1];
        if (!pred(next_code_point(s, pos))) break;
        --last;
    }
    return s.substr(cps[first], cps[last] - cps[first]);
}

inline std::string_view trim(std::string_view s) { return trim_if(s, is_space); }

/// Strips whitespace and general-category P* characters from both ends until nothing changes.
inline std::string_view strip_punct(std::string_view s) {
    return trim_if(s, [](CodePoint c) { return is_punct(c) || is_space(c); });
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t pos = 0; pos < s.size();) {
        const std::size_t start = pos;
        const CodePoint c = next_code_point(s, pos);
        if (is_space(c)) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.append(s.substr(start, pos - start));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

/// Whitespace-normalized lowercase form used as a dictionary and matching key.
inline std::string match_key(std::string_view s) {
    return join(split_whitespace(fold_case(s)), " ");
}

}  // namespace askgen::text
