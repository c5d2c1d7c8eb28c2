// askgen command-line driver.
//
//   askgen generate    --config cfg.json [--out DIR] [--seed N] [--corpus F] [--results F] [--endpoint URL]
//   askgen retrieve    --config cfg.json [--results F] [--endpoint URL] [--top-n N]
//   askgen selftrain   --dataset D.conll --validation V.conll [--config cfg.json] [--out DIR] [--seed N]
//   askgen eval        --gold G.conll --pred P.conll [--out report.json]
//   askgen judge-stats --results R.jsonl --judgments J.jsonl [--k 100] [--out report.json]
//
// Exit status: 0 success, 1 validation or configuration error, 2 data error, 3 internal error.

#include "askgen/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace askgen;

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::data:
    case ErrorKind::retryable: return 2;
    case ErrorKind::invariant:
    case ErrorKind::training:
    case ErrorKind::out_of_module: return 3;
    default: return 1;
    }
}

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> corpus;
    std::optional<std::string> results;
    std::optional<std::string> endpoint;
    std::optional<std::size_t> top_n;
};

// Command-line flags are layered over the config file before parsing, so they are covered by the
// config hash like any other key.
PipelineConfig resolve_config(const Overrides& o) {
    const fs::path path = o.config;
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open config '" + o.config + "'");
    json user;
    try {
        user = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::config, o.config + ": " + e.what());
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path cwd = fs::current_path();
    auto abs = [&](const std::string& p) { return (cwd / p).lexically_normal().string(); };
    if (o.seed) user["seed"] = *o.seed;
    if (o.out) user["output_dir"] = abs(*o.out);
    if (o.corpus) user["corpus"] = abs(*o.corpus);
    if (o.results) user["results"] = abs(*o.results);
    if (o.endpoint) user["endpoint"] = *o.endpoint;
    if (o.top_n) user["top_n"] = *o.top_n;
    return parse_config(user, base);
}

void write_report(const json& report, const std::optional<std::string>& out) {
    if (out) {
        write_atomically(*out, report.dump(2) + "\n");
    } else {
        std::cout << report.dump(2) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate weakly labeled NER datasets from type questions"};
    app.require_subcommand(1);

    Overrides gen;
    auto* generate = app.add_subcommand("generate", "Build a BIO dataset, dictionary and manifest");
    generate->add_option("--config", gen.config, "Pipeline config (JSON)")->required();
    generate->add_option("--seed", gen.seed, "Override the config seed");
    generate->add_option("--out", gen.out, "Output directory");
    generate->add_option("--corpus", gen.corpus, "Corpus JSONL");
    generate->add_option("--results", gen.results, "Retrieval results JSONL");
    generate->add_option("--endpoint", gen.endpoint, "Retrieval service URL");
    generate->add_option("--top-n", gen.top_n, "Phrases requested per question");

    Overrides ret;
    auto* retrieve = app.add_subcommand("retrieve", "Query the retriever and write a replay file");
    retrieve->add_option("--config", ret.config, "Pipeline config (JSON)")->required();
    retrieve->add_option("--seed", ret.seed, "Override the config seed");
    retrieve->add_option("--out", ret.out, "Output directory");
    retrieve->add_option("--corpus", ret.corpus, "Corpus JSONL");
    retrieve->add_option("--results", ret.results, "Replay file to write");
    retrieve->add_option("--endpoint", ret.endpoint, "Retrieval service URL");
    retrieve->add_option("--top-n", ret.top_n, "Phrases requested per question");

    std::string dataset, validation;
    std::optional<std::string> st_config, st_out;
    std::optional<std::uint64_t> st_seed;
    auto* selftrain = app.add_subcommand("selftrain", "Teacher-student training on a generated dataset");
    selftrain->add_option("--dataset", dataset, "Generated CoNLL dataset")->required();
    selftrain->add_option("--validation", validation, "Gold CoNLL validation set")->required();
    selftrain->add_option("--config", st_config, "Config providing the selftrain schedule");
    selftrain->add_option("--out", st_out, "Output directory");
    selftrain->add_option("--seed", st_seed, "Override the seed");

    std::string gold, pred;
    std::optional<std::string> eval_out;
    auto* eval = app.add_subcommand("eval", "Entity-level P/R/F1 of a prediction against gold");
    eval->add_option("--gold", gold, "Gold CoNLL")->required();
    eval->add_option("--pred", pred, "Predicted CoNLL")->required();
    eval->add_option("--out", eval_out, "Write the JSON report here");

    std::string results, judgments;
    std::size_t k = 100;
    std::optional<std::string> judge_out;
    auto* judge = app.add_subcommand("judge-stats", "P@k and Diversity of retrieval results");
    judge->add_option("--results", results, "Retrieval results JSONL")->required();
    judge->add_option("--judgments", judgments, "Judgment JSONL")->required();
    judge->add_option("--k", k, "Cutoff")->check(CLI::PositiveNumber);
    judge->add_option("--out", judge_out, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const char* command = app.get_subcommands().front()->get_name().c_str();
    StageLog log(&std::cerr);
    try {
        if (generate->parsed()) {
            const auto config = resolve_config(gen);
            const auto out = cmd_generate(config, log);
            std::cout << out.manifest.string() << '\n';
        } else if (retrieve->parsed()) {
            const auto config = resolve_config(ret);
            std::cout << cmd_retrieve(config, log, ret.top_n).string() << '\n';
        } else if (selftrain->parsed()) {
            SelfTrainConfig schedule;
            std::string hash;
            fs::path out_dir = "out";
            if (st_config) {
                Overrides o;
                o.config = *st_config;
                const auto config = resolve_config(o);
                schedule = config.selftrain;
                schedule.seed = config.seed;
                hash = config.hash();
                out_dir = config.output_dir;
            }
            if (st_seed) schedule.seed = *st_seed;
            if (st_out) out_dir = *st_out;
            const auto out = cmd_selftrain(dataset, validation, schedule, out_dir, hash, log);
            std::cout << format_report(out.best_report);
        } else if (eval->parsed()) {
            const auto report = cmd_eval(gold, pred);
            write_report(report, eval_out);
        } else if (judge->parsed()) {
            write_report(cmd_judge_stats(results, judgments, k), judge_out);
        }
    } catch (const Error& e) {
        std::cerr << "askgen " << command << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "askgen " << command << ": internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
