#pragma once

#include "askgen/bio.hpp"
#include "askgen/error.hpp"
#include "askgen/metrics.hpp"

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace askgen {

/// Behavioural contract for a sequence tagger usable as teacher and student.
/// predict must return one well-formed BIO sequence per input, of the input's length, and
/// restore(snapshot()) must leave predictions bit-identical.
template <class T>
concept Tagger = requires(T tagger, const T& ctagger, std::span<const LabeledSentence> data,
                          std::span<const TokenSequence> sentences, std::string_view state) {
    tagger.train(data, std::size_t{}, std::uint64_t{});
    { ctagger.predict(sentences) } -> std::same_as<std::vector<TagSequence>>;
    { ctagger.snapshot() } -> std::same_as<std::string>;
    tagger.restore(state);
};

struct SelfTrainConfig {
    std::size_t t_begin = 1;         // teacher warm-up steps
    std::size_t t_update = 1;        // student steps between teacher replacements
    std::size_t max_iterations = 1;  // total student steps
    std::uint64_t seed = 0;

    void validate() const {
        if (t_begin < 1) fail(ErrorKind::config, "t_begin must be >= 1");
        if (t_update < 1) fail(ErrorKind::config, "t_update must be >= 1");
        if (max_iterations < 1) fail(ErrorKind::config, "max_iterations must be >= 1");
    }

    /// ceil(max_iterations / t_update)
    std::size_t rounds() const { return (max_iterations + t_update - 1) / t_update; }
};

struct RoundLog {
    std::size_t round = 0;
    std::size_t teacher_steps = 0;  // steps behind the teacher that produced this round's labels
    std::size_t student_steps = 0;  // cumulative student steps at the end of the round
    Prf validation;
};

struct Checkpoint {
    std::string state;
    std::size_t round = 0;
    std::size_t step = 0;
    double f1 = 0.0;
};

struct SelfTrainResult {
    Prf warmup;  // teacher after t_begin steps, before any student round
    std::vector<RoundLog> log;
    Checkpoint best;
};

/// Called after each teacher replacement with the teacher's and the student's snapshots.
using ReplacementObserver =
    std::function<void(std::size_t round, const std::string& teacher_state, const std::string& student_state)>;

template <Tagger T>
Prf validate_tagger(const T& tagger, const std::vector<LabeledSentence>& validation) {
    std::vector<TokenSequence> tokens;
    tokens.reserve(validation.size());
    for (const auto& s : validation) tokens.push_back(s.tokens);
    const auto tags = tagger.predict(tokens);
    std::vector<LabeledSentence> pred;
    pred.reserve(tags.size());
    for (std::size_t i = 0; i < tags.size(); ++i) pred.push_back({validation[i].sentence_id, tokens[i], tags[i]});
    return evaluate(validation, pred).overall;
}

/// Teacher/student schedule: warm the teacher up on the generated labels, then repeatedly relabel
/// `unlabeled` with the teacher, train a student copied from the teacher on those labels, score it
/// on `validation`, and promote it to teacher. Returns the best-scoring student (earliest on ties).
template <class Factory>
    requires Tagger<std::invoke_result_t<Factory>>
SelfTrainResult run_self_training(const std::vector<LabeledSentence>& generated,
                                  const std::vector<TokenSequence>& unlabeled,
                                  const std::vector<LabeledSentence>& validation, Factory&& factory,
                                  const SelfTrainConfig& config, const ReplacementObserver& observer = {}) {
    config.validate();
    if (generated.empty()) fail(ErrorKind::invalid_argument, "generated dataset is empty");
    if (validation.empty()) fail(ErrorKind::invalid_argument, "validation set is empty");
    if (unlabeled.empty()) fail(ErrorKind::invalid_argument, "no unlabeled sentences to relabel");

    auto guarded = [](std::size_t round, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fail(ErrorKind::training, "self-training round " + std::to_string(round) + ": " + e.what());
        }
    };

    SelfTrainResult result;
    auto teacher = factory();
    guarded(0, [&] { teacher.train(generated, config.t_begin, config.seed); });
    result.warmup = validate_tagger(teacher, validation);

    std::size_t teacher_steps = config.t_begin;
    std::size_t student_total = 0;
    bool have_best = false;
    for (std::size_t round = 1; student_total < config.max_iterations; ++round) {
        const std::size_t steps = std::min(config.t_update, config.max_iterations - student_total);

        std::vector<LabeledSentence> pseudo;
        pseudo.reserve(unlabeled.size());
        auto student = factory();
        guarded(round, [&] {
            const auto tags = teacher.predict(unlabeled);
            for (std::size_t i = 0; i < unlabeled.size(); ++i) {
                if (tags[i].size() != unlabeled[i].size() || !is_well_formed(tags[i]))
                    fail(ErrorKind::invariant, "teacher produced an ill-formed tag sequence");
                pseudo.push_back({std::to_string(i), unlabeled[i], tags[i]});
            }
            student.restore(teacher.snapshot());
            student.train(pseudo, steps, config.seed + round);
        });
        student_total += steps;

        RoundLog entry{round, teacher_steps, student_total, validate_tagger(student, validation)};
        result.log.push_back(entry);

        std::string state = student.snapshot();
        if (!have_best || entry.validation.f1 > result.best.f1) {
            result.best = {state, round, student_total, entry.validation.f1};
            have_best = true;
        }
        teacher.restore(state);
        if (observer) observer(round, teacher.snapshot(), state);
        teacher_steps += steps;
    }
    return result;
}

}  // namespace askgen
