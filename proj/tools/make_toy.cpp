// Writes the synthetic two-type benchmark used by the examples and the acceptance suite.
//
//   make_toy <out-dir>
//
// Files: corpus.jsonl, results.jsonl, gold.conll + gold.ids (every corpus sentence),
// validation.conll (held-out sentences), judgments.jsonl, quality_phrases.txt, config.json.
//
// Roughly 30% of entity names are never retrieved, so the dictionary misses them, but they are
// drawn into the same sentence frames as the retrieved ones. Held-out sentences also use a few
// names that never occur in the retrieval pool.

#include "askgen/bio.hpp"
#include "askgen/conll.hpp"
#include "askgen/corpus.hpp"
#include "askgen/io.hpp"
#include "askgen/retrieval.hpp"
#include "askgen/text.hpp"

#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace askgen;

struct Name {
    std::string text;
    std::string type;  // person | location
    bool retrieved;
};

const std::vector<Name>& names() {
    static const std::vector<Name> all = {
        {"Ada Marlow", "person", true},      {"Bruno Keel", "person", true},
        {"Clara Voss", "person", true},      {"Dario Penn", "person", true},
        {"Elena Sturm", "person", true},     {"Felix Ortega", "person", true},
        {"Greta Lind", "person", true},      {"Hugo Brandt", "person", true},
        {"Ines Talbot", "person", true},     {"José Ruiz", "person", true},
        {"Kira Holm", "person", true},       {"Liam Cortez", "person", true},
        {"Mona Fields", "person", true},     {"Nils Rowan", "person", true},
        {"Oskar Vane", "person", false},     {"Petra Lowell", "person", false},
        {"Quinn Adler", "person", false},    {"Rosa Keller", "person", false},
        {"Soren Blake", "person", false},    {"Tessa Monroe", "person", false},
        {"Ulla Brook", "person", false},
        {"Verona", "location", true},        {"Kestrel", "location", true},
        {"Port Ellis", "location", true},    {"New Carden", "location", true},
        {"Halden", "location", true},        {"Brightwater", "location", true},
        {"Lower Vantia", "location", true},  {"Ostmark", "location", true},
        {"Zell", "location", true},          {"Amberly", "location", false},
        {"Greyhaven", "location", false},    {"Norwick", "location", false},
        {"Saltmere", "location", false},
    };
    return all;
}

// Names that occur only in held-out sentences.
const std::vector<Name>& fresh_names() {
    static const std::vector<Name> all = {
        {"Vera Castell", "person", false}, {"Willem Dorn", "person", false},
        {"Yara Quist", "person", false},   {"Zoltan Imre", "person", false},
        {"Idris Nolan", "person", false},  {"Farley", "location", false},
        {"Ridgemoor", "location", false},  {"Tarn Hollow", "location", false},
    };
    return all;
}

// Frames: {P} is a person slot, {L} a location slot.
const std::vector<std::string>& frames() {
    static const std::vector<std::string> all = {
        "{P} scored twice in the final .",
        "{P} signed a new contract on Monday .",
        "Coach {P} praised the young squad .",
        "{P} said the result was fair .",
        "The festival in {L} drew large crowds .",
        "Flights to {L} were delayed by fog .",
        "She grew up in {L} before moving abroad .",
        "{P} arrived in {L} on Tuesday .",
        "{P} left {L} after the match .",
        "Fans in {L} cheered for {P} .",
        "{P} and {P} trained together in {L} .",
        "Officials from {L} met {P} yesterday .",
    };
    return all;
}

struct Slot {
    std::size_t token_start;
    std::size_t token_end;
    const Name* name;
};

struct Built {
    CorpusSentence sentence;
    std::vector<std::string> tags;
    std::vector<Slot> slots;
};

Built build(const std::string& id, const std::vector<std::string>& words, const std::vector<Slot>& slots) {
    Built b;
    b.sentence = make_sentence(id, text::join(words, " "));
    b.tags.assign(words.size(), std::string(outside_tag));
    b.slots = slots;
    std::vector<CharSpan> candidates;
    for (const auto& s : slots) {
        if (!s.name) continue;
        b.tags[s.token_start] = "B-" + s.name->type;
        for (auto i = s.token_start + 1; i < s.token_end; ++i) b.tags[i] = "I-" + s.name->type;
        candidates.push_back({b.sentence.tokens[s.token_start].start, b.sentence.tokens[s.token_end - 1].end});
    }
    b.sentence.candidates = candidates;
    return b;
}

Built fill(const std::string& id, const std::string& frame, std::mt19937_64& rng,
           const std::vector<const Name*>& persons, const std::vector<const Name*>& locations) {
    std::vector<std::string> words;
    std::vector<Slot> slots;
    std::istringstream in(frame);
    std::string w;
    while (in >> w) {
        const std::vector<const Name*>* pool = w == "{P}" ? &persons : w == "{L}" ? &locations : nullptr;
        if (!pool) {
            words.push_back(w);
            continue;
        }
        const Name* n = (*pool)[std::uniform_int_distribution<std::size_t>(0, pool->size() - 1)(rng)];
        const std::size_t start = words.size();
        for (const auto& part : text::split_whitespace(n->text)) words.emplace_back(part);
        slots.push_back({start, words.size(), n});
    }
    return build(id, words, slots);
}

std::string sentence_id(std::size_t i) {
    std::string s = std::to_string(i);
    return "s" + std::string(3 - s.size(), '0') + s;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_toy <out-dir>\n";
        return 1;
    }
    const std::filesystem::path out = argv[1];
    constexpr std::size_t pool_size = 150;
    constexpr std::size_t validation_size = 50;

    std::vector<const Name*> persons, locations;
    for (const auto& n : names()) (n.type == "person" ? persons : locations).push_back(&n);

    auto held_persons = persons;
    auto held_locations = locations;
    for (const auto& n : fresh_names()) (n.type == "person" ? held_persons : held_locations).push_back(&n);

    std::mt19937_64 rng(2024);
    std::vector<Built> sentences;
    for (std::size_t i = 0; i < pool_size + validation_size; ++i) {
        const auto& frame = frames()[std::uniform_int_distribution<std::size_t>(0, frames().size() - 1)(rng)];
        const bool held = i >= pool_size;
        sentences.push_back(
            fill(sentence_id(i), frame, rng, held ? held_persons : persons, held ? held_locations : locations));
    }

    // Hand-written sentences appended to the retrieval pool: ambiguity, abbreviation, boundary and
    // normalization noise.
    static const Name washington_loc{"Washington", "location", true};
    static const Name washington_per{"Washington", "person", true};
    static const Name vantia{"Lower Vantia", "location", true};
    static const Name vantia_short{"LV", "location", true};
    static const Name carden{"New Carden", "location", true};
    auto named = [](const char* t) {
        for (const auto& n : names())
            if (n.text == t) return &n;
        throw std::logic_error(t);
    };
    std::vector<Built> extra;
    auto words = [](const char* s) { return text::split_whitespace(s); };
    auto add = [&](const char* txt, std::vector<Slot> slots) {
        std::vector<std::string> w;
        for (auto v : words(txt)) w.emplace_back(v);
        extra.push_back(build("x" + std::to_string(extra.size()), w, slots));
    };
    add("The festival in Washington drew large crowds .", {{3, 4, &washington_loc}});
    add("Flights to Washington were delayed by fog .", {{2, 3, &washington_loc}});
    add("She grew up in Washington before moving abroad .", {{4, 5, &washington_loc}});
    add("Coach Washington praised the young squad .", {{1, 2, &washington_per}});
    add("Talks began in Lower Vantia (LV) this week .", {{3, 5, &vantia}});
    add("Rain fell across LV overnight .", {{3, 4, &vantia_short}});
    add("Ferries from LV were cancelled .", {{2, 3, &vantia_short}});
    add("The city welcomed Ada Marlow with a parade .", {{3, 5, named("Ada Marlow")}});
    add("Bruno Keel returned to the US on Friday .", {{0, 2, named("Bruno Keel")}});
    add("Officials from New Carden met Clara Voss yesterday .", {{2, 4, &carden}, {5, 7, named("Clara Voss")}});
    add("After leaving Verona, Dario Penn rested .", {{2, 3, named("Verona")}, {3, 5, named("Dario Penn")}});

    // Corpus and gold.
    Corpus corpus;
    std::vector<LabeledSentence> gold, validation;
    std::string gold_ids;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& b = sentences[i];
        corpus.add(b.sentence);
        LabeledSentence ls{b.sentence.sentence_id, token_surfaces(b.sentence), b.tags};
        if (i < pool_size) {
            gold.push_back(ls);
            gold_ids += ls.sentence_id + "\n";
        } else {
            validation.push_back(ls);
        }
    }
    for (const auto& b : extra) {
        corpus.add(b.sentence);
        gold.push_back({b.sentence.sentence_id, token_surfaces(b.sentence), b.tags});
        gold_ids += b.sentence.sentence_id + "\n";
    }

    // Planted retrieval results: every retrieved-name occurrence in the pool, in corpus order, plus
    // noise records. Judgments mark whether each record is an entity of the asked type.
    std::map<std::string, std::vector<std::pair<RetrievedPhrase, bool>>> results;
    auto plant = [&](const std::string& qid, const CorpusSentence& s, std::size_t tok_start, std::size_t tok_end,
                     bool correct) {
        const std::size_t cs = s.tokens[tok_start].start;
        const std::size_t ce = s.tokens[tok_end - 1].end;
        RetrievedPhrase p{qid, 0, std::string(*text::slice(s.text, cs, ce)), 0.0, s.sentence_id, cs, ce};
        results[qid].push_back({p, correct});
    };
    const std::string qp = "person:athlete";
    const std::string ql = "location:city";
    for (std::size_t i = 0; i < pool_size; ++i)
        for (const auto& slot : sentences[i].slots)
            if (slot.name->retrieved)
                plant(slot.name->type == "person" ? qp : ql, sentences[i].sentence, slot.token_start, slot.token_end,
                      true);
    auto x = [&](std::size_t i) -> const CorpusSentence& { return extra[i].sentence; };
    plant(ql, x(0), 3, 4, true);
    plant(ql, x(1), 2, 3, true);
    plant(ql, x(2), 4, 5, true);
    plant(qp, x(3), 1, 2, true);
    plant(ql, x(4), 3, 5, true);   // Lower Vantia, defines LV
    plant(ql, x(7), 1, 2, false);  // "city": echo of the type word
    plant(ql, x(8), 5, 6, false);  // "US": stopword
    plant(ql, x(10), 2, 3, true);  // "Verona,": trailing punctuation
    plant(ql, x(9), 3, 4, false);  // "Carden": partial name, widened by the quality-phrase list
    plant(qp, x(0), 6, 7, false);  // "crowds": lowercase junk

    std::ostringstream results_out, judgments_out;
    for (auto& [qid, list] : results) {
        for (std::size_t r = 0; r < list.size(); ++r) {
            auto& p = list[r].first;
            p.rank = r + 1;
            p.score = 100.0 - static_cast<double>(r) * 0.25;
            results_out << to_json(p).dump() << '\n';
            judgments_out << json{{"question_id", qid}, {"rank", p.rank}, {"correct", list[r].second}}.dump() << '\n';
        }
    }

    std::ostringstream corpus_out;
    write_corpus(corpus_out, corpus);

    std::ostringstream quality;
    for (const auto& n : names())
        if (text::split_whitespace(n.text).size() > 1 && n.type == "location") quality << n.text << '\n';

    const json config = {
        {"template", "which"},
        {"k_l", 500},
        {"output_types",
         {{{"name", "person"}, {"labels", {"athlete"}}}, {{"name", "location"}, {"labels", {"city"}}}}},
        {"corpus", "corpus.jsonl"},
        {"results", "results.jsonl"},
        {"quality_phrases", "quality_phrases.txt"},
        {"selftrain", {{"t_begin", 40}, {"t_update", 60}, {"max_iterations", 600}}},
        {"seed", 1},
        {"output_dir", "out"},
    };

    std::size_t gold_entities = 0, hidden = 0;
    for (std::size_t i = 0; i < pool_size; ++i)
        for (const auto& s : sentences[i].slots) {
            ++gold_entities;
            hidden += s.name->retrieved ? 0 : 1;
        }

    OutputTransaction tx;
    tx.stage(out / "corpus.jsonl", corpus_out.str());
    tx.stage(out / "results.jsonl", results_out.str());
    tx.stage(out / "judgments.jsonl", judgments_out.str());
    {
        std::ostringstream g, v;
        write_conll(g, gold);
        write_conll(v, validation);
        tx.stage(out / "gold.conll", g.str());
        tx.stage(out / "gold.ids", gold_ids);
        tx.stage(out / "validation.conll", v.str());
    }
    tx.stage(out / "quality_phrases.txt", quality.str());
    tx.stage(out / "config.json", config.dump(2) + "\n");
    tx.commit();
    std::cout << "pool entities " << gold_entities << ", never retrieved " << hidden << " ("
              << 100.0 * static_cast<double>(hidden) / static_cast<double>(gold_entities) << "%)\n";
    return 0;
}
