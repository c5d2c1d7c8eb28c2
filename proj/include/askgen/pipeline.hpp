#pragma once

// End-to-end commands: retrieve, generate, selftrain, eval, judge-stats.

#include "askgen/annotator.hpp"
#include "askgen/config.hpp"
#include "askgen/conll.hpp"
#include "askgen/corpus.hpp"
#include "askgen/default_stopwords.hpp"
#include "askgen/io.hpp"
#include "askgen/metrics.hpp"
#include "askgen/normalizer.hpp"
#include "askgen/perceptron.hpp"
#include "askgen/querygen.hpp"
#include "askgen/remote.hpp"
#include "askgen/retrieval.hpp"
#include "askgen/selftrain.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace askgen {

namespace fs = std::filesystem;

/// Structured progress records, one JSON object per line.
class StageLog {
public:
    explicit StageLog(std::ostream* out = nullptr) : out_(out) {}

    void record(const std::string& stage, json fields) {
        fields["stage"] = stage;
        if (out_) *out_ << fields.dump() << '\n';
        records_.push_back(std::move(fields));
    }

    const std::vector<json>& records() const noexcept { return records_; }

private:
    std::ostream* out_;
    std::vector<json> records_;
};

class Stopwatch {
public:
    long long lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline RuleSet base_rule_set(const PipelineConfig& config) {
    RuleSet rules;
    rules.min_length = config.min_length;
    if (config.stopwords) {
        rules.stopwords = load_stopwords(config.stopwords->string());
    } else {
        std::istringstream in{std::string(default_stopwords)};
        rules.stopwords = read_stopwords(in);
    }
    return rules;
}

/// Rule toggles in force at match time: a matching-stage rule (6 for abbreviations, 9, 10) applies
/// when any sub-question enables it.
inline RuleToggles matching_toggles(const std::vector<SubQuestion>& questions) {
    RuleToggles t;
    for (const auto& q : questions)
        for (int id : q.rules.ids()) t.set(id, true);
    return t;
}

/// Runs one pipeline stage, prefixing any failure with the stage name (the error kind is kept).
template <class Fn>
auto run_stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw Error(ErrorKind::config, std::string(name) + ": " + e.what());
    }
}

inline Corpus require_corpus(const PipelineConfig& config) {
    if (!config.corpus) fail(ErrorKind::config, "config has no corpus file");
    return load_corpus(config.corpus->string());
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

/// Results for every sub-question from the remote endpoint when configured, else the toy retriever.
inline ResultSet retrieve_all(const PipelineConfig& config, const std::vector<SubQuestion>& questions,
                              const Corpus& corpus, std::size_t top_n) {
    ResultSet out;
    for (const auto& q : questions) {
        if (config.endpoint) {
            RemoteOptions opts{*config.endpoint, config.timeout_ms, config.attempts};
            out[q.question_id] = fetch_remote(q.question_id, q.question_text, opts, top_n, corpus);
        } else {
            out[q.question_id] = toy_retrieve(q, corpus, top_n);
        }
    }
    return out;
}

inline fs::path default_results_path(const PipelineConfig& config) { return config.output_dir / "results.jsonl"; }

/// Writes the replay file and returns its path.
inline fs::path cmd_retrieve(const PipelineConfig& config, StageLog& log, std::optional<std::size_t> top_n = {}) {
    check_inputs_exist(config);
    const auto questions = build_question_set(config.questions);
    const Corpus corpus = require_corpus(config);
    const auto results = retrieve_all(config, questions, corpus, top_n.value_or(config.top_n));
    std::ostringstream body;
    serialize_results(body, results);
    const fs::path target = config.results.value_or(default_results_path(config));
    write_atomically(target, body.str());
    std::size_t n = 0;
    for (const auto& [q, list] : results) n += list.size();
    log.record("retrieve", {{"questions", questions.size()}, {"phrases", n}, {"path", target.string()},
                            {"sha256", sha256_file(target)}, {"seed", config.seed}});
    return target;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerationCounts {
    std::size_t questions = 0;
    std::size_t phrases_retrieved = 0;
    std::size_t phrases_kept = 0;
    std::size_t phrases_normalized = 0;
    std::size_t dictionary_size = 0;
    std::size_t abbreviations = 0;
    std::size_t matches = 0;
    std::size_t labeled_sentences = 0;
    std::size_t entities = 0;
};

inline json to_json(const GenerationCounts& c) {
    return {{"questions", c.questions},
            {"phrases_retrieved", c.phrases_retrieved},
            {"phrases_kept", c.phrases_kept},
            {"phrases_normalized", c.phrases_normalized},
            {"dictionary_size", c.dictionary_size},
            {"abbreviations", c.abbreviations},
            {"matches", c.matches},
            {"labeled_sentences", c.labeled_sentences},
            {"entities", c.entities}};
}

struct GenerationResult {
    std::vector<SubQuestion> questions;
    std::vector<SentenceBudgetResult> budgets;
    std::vector<NormalizedPhrase> normalized;
    PseudoDictionary dictionary;
    std::vector<CorpusSentence> sentences;  // collected training sentences, first-kept order
    Annotation annotation;
    GenerationCounts counts;
};

/// querygen -> budgeted sentence collection -> normalization -> dictionary -> matching.
inline GenerationResult generate(const std::vector<SubQuestion>& questions, const Corpus& corpus,
                                 const ResultSet& results, const RuleSet& base_rules,
                                 const std::vector<std::string>& quality_phrases, StageLog& log) {
    GenerationResult g;
    g.questions = questions;
    g.counts.questions = questions.size();

    std::unordered_set<std::string> collected;
    static const std::vector<RetrievedPhrase> none;
    for (const auto& q : questions) {
        auto it = results.find(q.question_id);
        const auto& list = it == results.end() ? none : it->second;
        g.counts.phrases_retrieved += list.size();
        auto budget = collect_training_sentences(list, q.k_l);
        budget.question_id = q.question_id;
        for (const auto& id : budget.kept_sentences)
            if (collected.insert(id).second) g.sentences.push_back(corpus.at(id));
        g.counts.phrases_kept += budget.kept_phrases.size();

        RuleSet rules = base_rules;
        rules.enabled = q.rules;
        for (const auto& p : budget.kept_phrases)
            for (auto& n : normalize(p, corpus.at(p.sentence_id), rules, q.type_label, q.output_type))
                g.normalized.push_back(std::move(n));
        g.budgets.push_back(std::move(budget));
    }
    g.counts.phrases_normalized = g.normalized.size();
    log.record("collect", {{"questions", g.counts.questions},
                           {"phrases_retrieved", g.counts.phrases_retrieved},
                           {"phrases_kept", g.counts.phrases_kept},
                           {"sentences", g.sentences.size()}});
    log.record("normalize", {{"phrases_normalized", g.counts.phrases_normalized}});

    g.dictionary = build_dictionary(g.normalized);
    g.dictionary.set_quality_phrases(quality_phrases);
    g.counts.dictionary_size = g.dictionary.size();
    g.counts.abbreviations = g.dictionary.abbreviations().size();
    log.record("dictionary", {{"entries", g.counts.dictionary_size}, {"abbreviations", g.counts.abbreviations}});

    RuleSet match_rules = base_rules;
    match_rules.enabled = matching_toggles(questions);
    g.annotation = annotate(g.dictionary, g.sentences, match_rules);
    g.counts.matches = g.annotation.spans.size();
    g.counts.labeled_sentences = g.annotation.labeled.size();
    for (const auto& s : g.annotation.labeled)
        for (const auto& t : s.tags) g.counts.entities += is_begin(t) ? 1 : 0;
    log.record("annotate", {{"matches", g.counts.matches},
                            {"labeled_sentences", g.counts.labeled_sentences},
                            {"entities", g.counts.entities}});
    return g;
}

struct GenerateOutputs {
    fs::path dataset;
    fs::path ids;
    fs::path dictionary;
    fs::path manifest;
    GenerationResult result;
    json manifest_json;
};

inline std::string conll_text(const std::vector<LabeledSentence>& sentences) {
    std::ostringstream out;
    write_conll(out, sentences);
    return out.str();
}

/// Runs generation and writes dataset.conll, dataset.ids, dictionary.tsv and manifest.json into the
/// output directory. Either all files appear or none do.
inline GenerateOutputs cmd_generate(const PipelineConfig& config, StageLog& log) {
    Stopwatch clock;
    json timings = json::object();
    run_stage("validate", [&] {
        check_inputs_exist(config);
        if (config.results && !fs::is_regular_file(*config.results))
            fail(ErrorKind::config, "retrieval-results file '" + config.results->string() + "' does not exist");
    });
    const auto questions = run_stage("querygen", [&] { return build_question_set(config.questions); });
    const Corpus corpus = run_stage("load", [&] { return require_corpus(config); });
    const RuleSet rules = run_stage("load", [&] { return base_rule_set(config); });
    std::vector<std::string> quality;
    if (config.quality_phrases)
        quality = run_stage("load", [&] { return load_phrase_list(config.quality_phrases->string()); });
    timings["load"] = clock.lap_ms();

    const fs::path results_path =
        config.results ? *config.results : run_stage("retrieve", [&] { return cmd_retrieve(config, log); });
    const ResultSet results = run_stage("retrieve", [&] { return load_results(results_path.string(), &corpus); });
    timings["retrieve"] = clock.lap_ms();

    GenerateOutputs out;
    out.result = run_stage("generate", [&] { return generate(questions, corpus, results, rules, quality, log); });
    timings["generate"] = clock.lap_ms();

    const auto& labeled = out.result.annotation.labeled;
    std::string ids;
    for (const auto& s : labeled) ids += s.sentence_id + '\n';
    std::ostringstream dict;
    write_dictionary_tsv(dict, out.result.dictionary);
    const std::string dataset = conll_text(labeled);
    const std::string dict_text = dict.str();

    out.dataset = config.output_dir / "dataset.conll";
    out.ids = config.output_dir / "dataset.ids";
    out.dictionary = config.output_dir / "dictionary.tsv";
    out.manifest = config.output_dir / "manifest.json";

    json inputs = json::object();
    inputs["corpus"] = sha256_file(*config.corpus);
    inputs["results"] = sha256_file(results_path);
    if (config.stopwords) inputs["stopwords"] = sha256_file(*config.stopwords);
    if (config.quality_phrases) inputs["quality_phrases"] = sha256_file(*config.quality_phrases);

    out.manifest_json = {{"command", "generate"},
                         {"config_hash", config.hash()},
                         {"seed", config.seed},
                         {"inputs", inputs},
                         {"outputs",
                          {{"dataset.conll", sha256_hex(dataset)},
                           {"dataset.ids", sha256_hex(ids)},
                           {"dictionary.tsv", sha256_hex(dict_text)}}},
                         {"counts", to_json(out.result.counts)},
                         {"timings_ms", timings}};

    run_stage("write", [&] {
        OutputTransaction tx;
        tx.stage(out.dataset, dataset);
        tx.stage(out.ids, ids);
        tx.stage(out.dictionary, dict_text);
        tx.stage(out.manifest, out.manifest_json.dump(2) + "\n");
        tx.commit();
    });
    log.record("write", {{"dataset", out.dataset.string()}, {"sha256", sha256_hex(dataset)}});
    return out;
}

// ---------------------------------------------------------------------------
// selftrain
// ---------------------------------------------------------------------------

struct SelfTrainOutputs {
    SelfTrainResult result;
    Prf best_validation;
    EntityScores best_report;
    json manifest_json;
};

inline json to_json(const RoundLog& r) {
    return {{"round", r.round},
            {"teacher_steps", r.teacher_steps},
            {"student_steps", r.student_steps},
            {"validation_f1", r.validation.f1},
            {"validation_precision", r.validation.precision},
            {"validation_recall", r.validation.recall}};
}

/// Baseline-tagger self-training on a generated CoNLL dataset. Writes checkpoint.bin,
/// checkpoint.json, train_log.jsonl, report.json and selftrain.manifest.json.
inline SelfTrainOutputs cmd_selftrain(const fs::path& dataset_path, const fs::path& validation_path,
                                      const SelfTrainConfig& schedule, const fs::path& out_dir,
                                      const std::string& config_hash, StageLog& log) {
    const auto dataset = load_conll(dataset_path.string());
    const auto validation = load_conll(validation_path.string());
    if (dataset.empty()) fail(ErrorKind::invalid_argument, "dataset '" + dataset_path.string() + "' is empty");
    if (validation.empty())
        fail(ErrorKind::invalid_argument, "validation file '" + validation_path.string() + "' is empty");
    for (const auto& s : dataset)
        if (!is_well_formed(s.tags))
            fail(ErrorKind::data, dataset_path.string() + ": sentence " + s.sentence_id + " is not well-formed BIO");

    std::vector<TokenSequence> unlabeled;
    unlabeled.reserve(dataset.size());
    for (const auto& s : dataset) unlabeled.push_back(s.tokens);

    SelfTrainOutputs out;
    out.result = run_self_training(dataset, unlabeled, validation, [] { return PerceptronTagger{}; }, schedule);
    log.record("selftrain", {{"rounds", out.result.log.size()},
                             {"warmup_f1", out.result.warmup.f1},
                             {"best_round", out.result.best.round},
                             {"best_f1", out.result.best.f1}});

    PerceptronTagger best;
    best.restore(out.result.best.state);
    std::vector<TokenSequence> vtokens;
    for (const auto& s : validation) vtokens.push_back(s.tokens);
    const auto tags = best.predict(vtokens);
    std::vector<LabeledSentence> pred;
    for (std::size_t i = 0; i < tags.size(); ++i) pred.push_back({validation[i].sentence_id, vtokens[i], tags[i]});
    out.best_report = evaluate(validation, pred);
    out.best_validation = out.best_report.overall;

    std::string train_log;
    for (const auto& r : out.result.log) train_log += to_json(r).dump() + "\n";
    const json meta = {{"step", out.result.best.step},
                       {"round", out.result.best.round},
                       {"f1", out.result.best.f1},
                       {"seed", schedule.seed},
                       {"config_hash", config_hash}};
    const json report = {{"warmup", to_json(out.result.warmup)},
                         {"best", to_json(out.best_report)},
                         {"best_round", out.result.best.round},
                         {"schedule",
                          {{"t_begin", schedule.t_begin},
                           {"t_update", schedule.t_update},
                           {"max_iterations", schedule.max_iterations}}}};
    out.manifest_json = {{"command", "selftrain"},
                         {"config_hash", config_hash},
                         {"seed", schedule.seed},
                         {"inputs",
                          {{"dataset", sha256_file(dataset_path)}, {"validation", sha256_file(validation_path)}}},
                         {"outputs",
                          {{"checkpoint.bin", sha256_hex(out.result.best.state)},
                           {"train_log.jsonl", sha256_hex(train_log)}}}};

    OutputTransaction tx;
    tx.stage(out_dir / "checkpoint.bin", out.result.best.state);
    tx.stage(out_dir / "checkpoint.json", meta.dump(2) + "\n");
    tx.stage(out_dir / "train_log.jsonl", train_log);
    tx.stage(out_dir / "report.json", report.dump(2) + "\n");
    tx.stage(out_dir / "selftrain.manifest.json", out.manifest_json.dump(2) + "\n");
    tx.commit();
    return out;
}

// ---------------------------------------------------------------------------
// eval / judge-stats
// ---------------------------------------------------------------------------

inline json cmd_eval(const fs::path& gold_path, const fs::path& pred_path) {
    const auto gold = load_conll(gold_path.string());
    const auto pred = load_conll(pred_path.string());
    const auto scores = evaluate(gold, pred);
    json report = to_json(scores);
    report["inputs"] = {{"gold", sha256_file(gold_path)}, {"pred", sha256_file(pred_path)}};
    return report;
}

inline json cmd_judge_stats(const fs::path& results_path, const fs::path& judgments_path, std::size_t k,
                            const Corpus* corpus = nullptr) {
    const auto results = load_results(results_path.string(), corpus);
    const auto judgments = load_judgments(judgments_path.string());
    const auto q = retrieval_quality(results, judgments, k);
    json per_question = json::object();
    for (const auto& [qid, p] : q.precision)
        per_question[qid] = {{"precision", p}, {"diversity", q.diversity.at(qid)}};
    return {{"k", k},
            {"macro_precision", q.macro_precision},
            {"macro_diversity", q.macro_diversity},
            {"per_question", per_question},
            {"inputs", {{"results", sha256_file(results_path)}, {"judgments", sha256_file(judgments_path)}}}};
}

}  // namespace askgen
