#pragma once

// Averaged structured perceptron with greedy, transition-masked decoding. Dependency-free
// baseline for the self-training loop; any type satisfying `Tagger` can replace it.

#include "askgen/bio.hpp"
#include "askgen/error.hpp"
#include "askgen/text.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace askgen {

namespace detail {

inline std::string word_shape(std::string_view word) {
    std::string shape;
    char last = 0;
    for (std::size_t pos = 0; pos < word.size();) {
        const auto c = text::next_code_point(word, pos);
        char s = '.';
        if (text::is_upper(c)) s = 'X';
        else if (text::is_alpha(c)) s = 'x';
        else if (text::is_digit(c)) s = 'd';
        else if (c < 0x80) s = static_cast<char>(c);
        if (s != last) shape.push_back(s);
        last = s;
    }
    return shape;
}

inline std::string affix(std::string_view lower, std::size_t n, bool prefix) {
    const auto cps = text::decode(lower);
    if (cps.size() <= n) return std::string(lower);
    return prefix ? text::encode({cps.begin(), cps.begin() + static_cast<long>(n)})
                  : text::encode({cps.end() - static_cast<long>(n), cps.end()});
}

class ByteWriter {
public:
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        out_.append(s);
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u64();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::uint64_t n) const {
        if (in_.size() - pos_ < n) fail(ErrorKind::data, "truncated tagger snapshot");
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace detail

class PerceptronTagger {
public:
    PerceptronTagger() = default;

    /// `steps` single-sentence updates; sentences are visited in an order shuffled by `seed`,
    /// reshuffled after every full pass.
    void train(std::span<const LabeledSentence> data, std::size_t steps, std::uint64_t seed) {
        if (steps == 0) return;
        if (data.empty()) fail(ErrorKind::invalid_argument, "cannot train on an empty dataset");
        register_labels(data);
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> order(data.size());
        std::size_t cursor = order.size();
        for (std::size_t step = 0; step < steps; ++step) {
            if (cursor == order.size()) {
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            update(data[order[cursor++]]);
        }
    }

    std::vector<TagSequence> predict(std::span<const TokenSequence> sentences) const {
        std::vector<TagSequence> out;
        out.reserve(sentences.size());
        for (const auto& s : sentences) out.push_back(predict_one(s));
        return out;
    }

    TagSequence predict_one(const TokenSequence& tokens) const {
        const auto ids = decode(tokens, true);
        TagSequence tags;
        tags.reserve(ids.size());
        for (auto id : ids) tags.push_back(labels_[id]);
        return tags;
    }

    /// Complete training state (labels, weights, averaging accumulators, update clock).
    std::string snapshot() const {
        detail::ByteWriter w;
        w.str(magic);
        w.u64(clock_);
        w.u64(labels_.size());
        for (const auto& l : labels_) w.str(l);
        std::vector<const std::string*> keys;
        keys.reserve(weights_.size());
        for (const auto& [k, v] : weights_) keys.push_back(&k);
        std::sort(keys.begin(), keys.end(), [](const auto* a, const auto* b) { return *a < *b; });
        w.u64(keys.size());
        for (const auto* k : keys) {
            w.str(*k);
            const auto& row = weights_.at(*k);
            for (std::size_t l = 0; l < labels_.size(); ++l) {
                const Weight cell = l < row.size() ? row[l] : Weight{};
                w.f64(cell.value);
                w.f64(cell.total);
                w.u64(cell.stamp);
            }
        }
        return w.take();
    }

    void restore(std::string_view state) {
        detail::ByteReader r(state);
        if (r.str() != magic) fail(ErrorKind::data, "not a perceptron snapshot");
        PerceptronTagger t;
        t.clock_ = r.u64();
        const auto n_labels = r.u64();
        t.labels_.clear();
        for (std::uint64_t i = 0; i < n_labels; ++i) t.labels_.push_back(r.str());
        const auto n_features = r.u64();
        for (std::uint64_t i = 0; i < n_features; ++i) {
            auto key = r.str();
            std::vector<Weight> row(n_labels);
            for (auto& cell : row) {
                cell.value = r.f64();
                cell.total = r.f64();
                cell.stamp = r.u64();
            }
            t.weights_.emplace(std::move(key), std::move(row));
        }
        if (!r.done()) fail(ErrorKind::data, "trailing bytes in perceptron snapshot");
        *this = std::move(t);
    }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::uint64_t updates() const noexcept { return clock_; }

private:
    static constexpr std::string_view magic = "askgen-perceptron-v1";

    struct Weight {
        double value = 0.0;
        double total = 0.0;  // sum of value over elapsed clock ticks up to `stamp`
        std::uint64_t stamp = 0;
    };

    void register_labels(std::span<const LabeledSentence> data) {
        std::set<std::string> fresh;
        for (const auto& s : data) {
            if (s.tags.size() != s.tokens.size())
                fail(ErrorKind::invalid_argument, "sentence '" + s.sentence_id + "' has mismatched token/tag counts");
            for (const auto& t : s.tags)
                if (std::find(labels_.begin(), labels_.end(), t) == labels_.end()) fresh.insert(t);
        }
        for (const auto& t : fresh) labels_.push_back(t);
    }

    /// Context features of position i; the previous-tag feature is appended by the caller.
    static std::vector<std::string> static_features(const std::vector<std::string>& lower,
                                                    const TokenSequence& tokens, std::size_t i) {
        const auto& w = lower[i];
        return {"bias",
                "w=" + w,
                "shape=" + detail::word_shape(tokens[i]),
                "p3=" + detail::affix(w, 3, true),
                "s3=" + detail::affix(w, 3, false),
                "pw=" + (i > 0 ? lower[i - 1] : std::string("<s>")),
                "nw=" + (i + 1 < lower.size() ? lower[i + 1] : std::string("</s>"))};
    }

    double weight(const std::string& feature, std::size_t label, bool averaged) const {
        auto it = weights_.find(feature);
        if (it == weights_.end() || label >= it->second.size()) return 0.0;
        const Weight& c = it->second[label];
        if (!averaged) return c.value;
        if (clock_ == 0) return 0.0;
        return (c.total + static_cast<double>(clock_ - c.stamp) * c.value) / static_cast<double>(clock_);
    }

    std::vector<std::size_t> decode(const TokenSequence& tokens, bool averaged) const {
        std::vector<std::string> lower;
        lower.reserve(tokens.size());
        for (const auto& t : tokens) lower.push_back(text::fold_case(t));
        std::vector<std::size_t> out;
        std::string_view prev;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto feats = static_features(lower, tokens, i);
            feats.push_back("pt=" + std::string(i ? prev : "<s>"));
            std::size_t best = 0;  // O is index 0 and always legal
            double best_score = 0.0;
            bool have = false;
            for (std::size_t l = 0; l < labels_.size(); ++l) {
                if (!transition_allowed(i ? prev : std::string_view{}, labels_[l])) continue;
                double score = 0.0;
                for (const auto& f : feats) score += weight(f, l, averaged);
                if (!have || score > best_score) {
                    best = l;
                    best_score = score;
                    have = true;
                }
            }
            out.push_back(best);
            prev = labels_[best];
        }
        return out;
    }

    void bump(const std::string& feature, std::size_t label, double delta) {
        auto& row = weights_[feature];
        if (row.size() < labels_.size()) row.resize(labels_.size());
        Weight& c = row[label];
        c.total += static_cast<double>(clock_ - c.stamp) * c.value;
        c.stamp = clock_;
        c.value += delta;
    }

    void update(const LabeledSentence& s) {
        const auto guess = decode(s.tokens, false);
        std::vector<std::size_t> gold;
        gold.reserve(s.tags.size());
        for (const auto& t : s.tags)
            gold.push_back(static_cast<std::size_t>(std::find(labels_.begin(), labels_.end(), t) - labels_.begin()));
        if (guess != gold) {
            std::vector<std::string> lower;
            for (const auto& t : s.tokens) lower.push_back(text::fold_case(t));
            for (std::size_t i = 0; i < s.tokens.size(); ++i) {
                const auto feats = static_features(lower, s.tokens, i);
                const std::string gold_prev = "pt=" + (i ? labels_[gold[i - 1]] : std::string("<s>"));
                const std::string guess_prev = "pt=" + (i ? labels_[guess[i - 1]] : std::string("<s>"));
                if (gold[i] == guess[i] && gold_prev == guess_prev) continue;
                for (const auto& f : feats) {
                    bump(f, gold[i], 1.0);
                    bump(f, guess[i], -1.0);
                }
                bump(gold_prev, gold[i], 1.0);
                bump(guess_prev, guess[i], -1.0);
            }
        }
        ++clock_;
    }

    std::vector<std::string> labels_{std::string(outside_tag)};
    std::unordered_map<std::string, std::vector<Weight>> weights_;
    std::uint64_t clock_ = 0;
};

}  // namespace askgen
