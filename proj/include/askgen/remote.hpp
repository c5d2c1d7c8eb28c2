#pragma once

// Client for an external phrase-retrieval service. The service answers
//   GET <path>?question=<text>&question_id=<id>&top_n=<n>
// with a JSON array of retrieval-result records.

#include "askgen/corpus.hpp"
#include "askgen/error.hpp"
#include "askgen/retrieval.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <string>
#include <thread>
#include <vector>

namespace askgen {

struct RemoteOptions {
    std::string endpoint;  // e.g. http://localhost:8080/search
    int timeout_ms = 10000;
    int attempts = 3;
    int backoff_ms = 200;
};

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

inline Endpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0)
        fail(ErrorKind::config, "endpoint '" + url + "' must look like http://host[:port]/path");
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.base = url.substr(0, path_start);
    e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (e.base.size() <= scheme_end + 3) fail(ErrorKind::config, "endpoint '" + url + "' has no host");
    return e;
}

inline std::vector<RetrievedPhrase> fetch_remote(const std::string& question_id, const std::string& question_text,
                                                 const RemoteOptions& options, std::size_t top_n,
                                                 const Corpus& corpus) {
    const Endpoint ep = parse_endpoint(options.endpoint);
    httplib::Client client(ep.base);
    const auto timeout = std::chrono::milliseconds(options.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);

    const httplib::Params params{
        {"question", question_text}, {"question_id", question_id}, {"top_n", std::to_string(top_n)}};
    const int attempts = std::max(1, options.attempts);
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) std::this_thread::sleep_for(std::chrono::milliseconds(options.backoff_ms));
        auto res = client.Get(ep.path, params, httplib::Headers{});
        if (!res) {
            last_error = "request to " + options.endpoint + " failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server returned HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            fail(ErrorKind::data, options.endpoint + " returned HTTP " + std::to_string(res->status));

        const std::string source = options.endpoint + " [" + question_id + "]";
        json body;
        try {
            body = json::parse(res->body);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::data, source + ": malformed JSON response: " + e.what());
        }
        if (!body.is_array()) fail(ErrorKind::data, source + ": response is not a JSON array");
        std::vector<RetrievedPhrase> phrases;
        for (std::size_t i = 0; i < body.size(); ++i) {
            try {
                if (!body[i].is_object()) fail(ErrorKind::data, "record is not an object");
                phrases.push_back(phrase_from_json(body[i]));
            } catch (const json::exception& e) {
                throw DataError(source, i + 1, std::string("schema violation: ") + e.what());
            } catch (const Error& e) {
                throw DataError(source, i + 1, e.what());
            }
            if (phrases.back().question_id != question_id)
                throw DataError(source, i + 1, "record question_id '" + phrases.back().question_id +
                                                   "' does not match request '" + question_id + "'");
        }
        auto grouped = validate_results(std::move(phrases), source, &corpus);
        if (grouped.empty()) return {};
        return std::move(grouped.begin()->second);
    }
    throw RetryableError(attempts, last_error);
}

}  // namespace askgen
