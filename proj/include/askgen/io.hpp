#pragma once

// File plumbing shared by the commands: SHA-256 digests and all-or-nothing output files.

#include "askgen/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

namespace askgen {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            fail(ErrorKind::invariant, "cannot initialise SHA-256");
    }

    Sha256& update(std::string_view data) {
        EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
        return *this;
    }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256_hex(std::string_view data) { return Sha256().update(data).hex(); }

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::config, "cannot read '" + path.string() + "'");
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
    return h.hex();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::config, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Stages files next to their destination and renames them into place on commit(). Anything not
/// committed (including files already renamed when a later rename fails) is removed on destruction.
class OutputTransaction {
public:
    OutputTransaction() = default;
    OutputTransaction(const OutputTransaction&) = delete;
    OutputTransaction& operator=(const OutputTransaction&) = delete;

    ~OutputTransaction() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : staged_) {
            std::filesystem::remove(f.temp, ec);
            if (f.renamed) std::filesystem::remove(f.target, ec);
        }
    }

    void stage(const std::filesystem::path& target, std::string_view content) {
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
        auto temp = target;
        temp += ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(temp, std::ios::binary | std::ios::trunc);
            if (!out) fail(ErrorKind::config, "cannot write '" + temp.string() + "'");
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            if (!out) fail(ErrorKind::config, "short write to '" + temp.string() + "'");
        }
        staged_.push_back({target, temp, false});
    }

    void commit() {
        for (auto& f : staged_) {
            std::filesystem::rename(f.temp, f.target);
            f.renamed = true;
        }
        committed_ = true;
    }

private:
    struct Staged {
        std::filesystem::path target;
        std::filesystem::path temp;
        bool renamed;
    };
    std::vector<Staged> staged_;
    bool committed_ = false;
};

/// Single-file convenience wrapper around OutputTransaction.
inline void write_atomically(const std::filesystem::path& target, std::string_view content) {
    OutputTransaction tx;
    tx.stage(target, content);
    tx.commit();
}

}  // namespace askgen
