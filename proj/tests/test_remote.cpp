#include "askgen/pipeline.hpp"
#include "askgen/remote.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

using namespace askgen;

namespace {

class MockServer {
public:
    explicit MockServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server_.Get("/search", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/search"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

Corpus corpus() {
    Corpus c;
    c.add(make_sentence("s1", "Leprosy is a disease ."));
    c.add(make_sentence("s2", "Malaria spreads fast ."));
    return c;
}

json record(const std::string& q, int rank, const std::string& phrase, const std::string& sid, int start, int end,
            double score) {
    return to_json(RetrievedPhrase{q, static_cast<std::size_t>(rank), phrase, score, sid,
                                   static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
}

void serve_two(const httplib::Request& req, httplib::Response& res) {
    const auto q = req.get_param_value("question_id");
    json body = json::array({record(q, 1, "Leprosy", "s1", 0, 7, 2.0), record(q, 2, "Malaria", "s2", 0, 7, 1.0)});
    res.set_content(body.dump(), "application/json");
}

RemoteOptions options(const std::string& url) {
    RemoteOptions o;
    o.endpoint = url;
    o.timeout_ms = 2000;
    o.attempts = 3;
    o.backoff_ms = 1;
    return o;
}

}  // namespace

TEST(Remote, TwoValidRecords) {
    std::string seen_question;
    MockServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_question = req.get_param_value("question");
        serve_two(req, res);
    });
    const auto got = fetch_remote("q1", "Which disease?", options(server.url()), 10, corpus());
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0].surface, "Leprosy");
    EXPECT_EQ(got[1].rank, 2u);
    EXPECT_EQ(seen_question, "Which disease?");
}

TEST(Remote, MalformedRecordIsDataError) {
    MockServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"([{"question_id": "q1", "rank": 1, "phrase": "Leprosy"}])", "application/json");
    });
    try {
        fetch_remote("q1", "Which disease?", options(server.url()), 10, corpus());
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
    MockServer span_mismatch([](const httplib::Request&, httplib::Response& res) {
        res.set_content(json::array({record("q1", 1, "Lepra", "s1", 0, 7, 1.0)}).dump(), "application/json");
    });
    EXPECT_THROW(fetch_remote("q1", "Which disease?", options(span_mismatch.url()), 10, corpus()), DataError);
    MockServer not_array([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"results": []})", "application/json");
    });
    try {
        fetch_remote("q1", "Which disease?", options(not_array.url()), 10, corpus());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::data);
    }
}

TEST(Remote, UnreachableEndpointIsRetryableAfterAttempts) {
    std::string url;
    {
        MockServer gone(serve_two);
        url = gone.url();
    }
    try {
        fetch_remote("q1", "Which disease?", options(url), 10, corpus());
        FAIL();
    } catch (const RetryableError& e) {
        EXPECT_EQ(e.attempts(), 3);
        EXPECT_EQ(e.kind(), ErrorKind::retryable);
    }
}

TEST(Remote, ServerErrorIsRetried) {
    std::atomic<int> calls{0};
    MockServer flaky([&](const httplib::Request& req, httplib::Response& res) {
        if (calls++ == 0) {
            res.status = 503;
            return;
        }
        serve_two(req, res);
    });
    EXPECT_EQ(fetch_remote("q1", "Which disease?", options(flaky.url()), 10, corpus()).size(), 2u);
    EXPECT_EQ(calls.load(), 2);
}

TEST(Remote, EndpointParsing) {
    const auto e = parse_endpoint("http://localhost:8080/a/b");
    EXPECT_EQ(e.base, "http://localhost:8080");
    EXPECT_EQ(e.path, "/a/b");
    EXPECT_EQ(parse_endpoint("http://host").path, "/");
    EXPECT_THROW(parse_endpoint("localhost:8080"), Error);
}

TEST(Remote, RetrieveCommandWritesReplayFileThatIngests) {
    MockServer server(serve_two);
    oracle::TempDir dir;
    {
        std::ofstream out(dir / "corpus.jsonl");
        write_corpus(out, corpus());
    }
    const auto cfg = parse_config({{"k_l", 5},
                                   {"output_types", {{{"name", "disease"}, {"labels", {"disease", "illness"}}}}},
                                   {"corpus", "corpus.jsonl"},
                                   {"endpoint", server.url()},
                                   {"output_dir", "out"}},
                                  dir.path());
    StageLog log;
    const auto replay = cmd_retrieve(cfg, log);
    EXPECT_EQ(replay, dir / "out" / "results.jsonl");
    const auto c = load_corpus((dir / "corpus.jsonl").string());
    const auto rs = load_results(replay.string(), &c);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs.at("disease:illness").size(), 2u);
    EXPECT_EQ(log.records().back()["stage"], "retrieve");
}
