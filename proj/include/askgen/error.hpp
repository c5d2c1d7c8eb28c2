#pragma once

#include <stdexcept>
#include <string>

namespace askgen {

enum class ErrorKind {
    invalid_argument,
    invalid_template,
    config,
    data,
    retryable,
    unsupported_corpus,
    incomplete_judgments,
    out_of_module,
    training,
    invariant,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_template: return "invalid-template";
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::retryable: return "retryable";
    case ErrorKind::unsupported_corpus: return "unsupported-corpus";
    case ErrorKind::incomplete_judgments: return "incomplete-judgments";
    case ErrorKind::out_of_module: return "out-of-module";
    case ErrorKind::training: return "training";
    case ErrorKind::invariant: return "invariant";
    }
    return "unknown";
}

/// Every library failure is an Error carrying a kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Data error tied to a 1-based line of an input file.
class DataError : public Error {
public:
    DataError(std::string source, std::size_t line, const std::string& what)
        : Error(ErrorKind::data, source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Network-level failure; `attempts` is how many tries were made before giving up.
class RetryableError : public Error {
public:
    RetryableError(int attempts, const std::string& what)
        : Error(ErrorKind::retryable, what + " (after " + std::to_string(attempts) + " attempts)"),
          attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace askgen
