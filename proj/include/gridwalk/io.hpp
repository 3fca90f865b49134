#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace gridwalk {

/// Shortest decimal string that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Accumulates output files and publishes them atomically: content goes to
/// hidden temp files first and is renamed into place only on commit, so an
/// aborted run never leaves partial outputs under the final names.
class OutputStage {
public:
    explicit OutputStage(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_)) {
            throw std::runtime_error("cannot create output directory " +
                                     dir_.string());
        }
    }

    OutputStage(const OutputStage&) = delete;
    OutputStage& operator=(const OutputStage&) = delete;

    ~OutputStage() {
        for (const auto& [tmp, final] : staged_) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
        }
    }

    void add(const std::string& filename, const std::string& content) {
        const std::filesystem::path tmp = dir_ / ("." + filename + ".tmp");
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open temporary file " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
        staged_.emplace_back(tmp, dir_ / filename);
    }

    std::vector<std::string> commit() {
        std::vector<std::string> finals;
        finals.reserve(staged_.size());
        for (const auto& [tmp, final] : staged_) {
            std::filesystem::rename(tmp, final);
            finals.push_back(final.string());
        }
        staged_.clear();
        return finals;
    }

private:
    std::filesystem::path dir_;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

}  // namespace gridwalk
