#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace survive {

// Error with a stable machine-readable category, surfaced by the CLI as
// "<category>: <message>". Categories: config-missing, config-schema,
// config-range, io, runtime.
class CliError : public std::runtime_error {
public:
    CliError(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

// Locale-independent shortest round-trip formatting; parse_double below
// recovers the exact bits.
inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

// strict full-token numeric parses (no trailing junk, no locale)
inline bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_int64(const std::string& text, long long& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

// whole-file atomic replace: write a sibling temp file, then rename over
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw CliError("io", "cannot create directory " +
                                     path.parent_path().string() + ": " + ec.message());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw CliError("io", "cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw CliError("io", "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw CliError("io", "cannot rename " + tmp.string() + " to " + path.string() +
                                 ": " + ec.message());
}

inline std::string read_text_file(const std::filesystem::path& path,
                                  const std::string& missing_category) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CliError(missing_category, "cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
    if (is.bad()) throw CliError("io", "read failed for " + path.string());
    return content;
}

} // namespace survive
