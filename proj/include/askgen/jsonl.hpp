#pragma once

#include "askgen/error.hpp"

#include <json.hpp>

#include <istream>
#include <string>

namespace askgen {

using json = nlohmann::json;

/// Calls `fn(record, line_no)` for each non-blank line; parse failures become DataError.
template <class Fn>
void for_each_jsonl(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(source, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) throw DataError(source, line_no, "record is not a JSON object");
        try {
            fn(record, line_no);
        } catch (const DataError&) {
            throw;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::data) throw;
            throw DataError(source, line_no, e.what());
        } catch (const json::exception& e) {
            throw DataError(source, line_no, std::string("schema violation: ") + e.what());
        }
    }
}

/// Fetches a required field, reporting the field name on absence.
inline const json& require_field(const json& record, const char* name) {
    auto it = record.find(name);
    if (it == record.end()) throw Error(ErrorKind::data, std::string("missing field '") + name + "'");
    return *it;
}

}  // namespace askgen
