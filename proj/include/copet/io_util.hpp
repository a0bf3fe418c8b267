#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace copet {

// Timestamp parsing. Accepts epoch seconds ("1388534400", possibly negative)
// or ISO-8601 ("2014-01-02T03:04:05Z", "2014-01-02 03:04:05+01:00",
// "2014-01-02"). Fractional seconds are discarded.
std::optional<std::int64_t> parse_timestamp(std::string_view text);

std::int64_t timestamp_from_civil(int year, unsigned month, unsigned day,
                                  unsigned hour = 0, unsigned minute = 0,
                                  unsigned second = 0);

// RFC-4180-ish CSV: quoted fields may contain commas, quotes ("" escape) and
// newlines are not supported inside fields (input is line-split upstream).
// Returns nullopt on unbalanced quotes.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

// Splits on '\n', tolerating a trailing newline; strips a trailing '\r'.
std::vector<std::string_view> split_lines(std::string_view text);

std::string slurp_file(const std::string& path); // throws on failure
void write_file(const std::string& path, std::string_view content);

// Shortest round-trip decimal form of a double, used wherever doubles are
// persisted so reruns are byte-identical.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);
std::string file_hash_hex(const std::string& path);

// Little-endian binary cache helpers.
struct BinWriter {
    std::string buf;
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void bytes(std::string_view s);
    void str(std::string_view s); // u32 length + bytes
};

struct BinReader {
    std::string_view buf;
    std::size_t pos = 0;
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    void expect_magic(std::string_view magic, std::string_view what);
    bool at_end() const { return pos == buf.size(); }
};

// Thrown on unreadable/corrupt binary caches and unusable inputs.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace copet
