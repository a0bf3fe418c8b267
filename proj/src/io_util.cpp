#include "copet/io_util.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

namespace copet {

namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

} // namespace

std::int64_t timestamp_from_civil(int year, unsigned month, unsigned day,
                                  unsigned hour, unsigned minute, unsigned second) {
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::int64_t epoch;
    if (parse_int(text, epoch)) return epoch;

    // ISO-8601: YYYY-MM-DD[{T,space}HH:MM:SS[.frac][Z|+HH:MM|-HH:MM]]
    int year, month, day;
    if (!parse_fixed_uint(text, 0, 4, year) || text.size() < 10) return std::nullopt;
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!parse_fixed_uint(text, 5, 2, month) || !parse_fixed_uint(text, 8, 2, day))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    int hour = 0, minute = 0, second = 0;
    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
        ++pos;
        if (!parse_fixed_uint(text, pos, 2, hour)) return std::nullopt;
        if (pos + 5 > text.size() || text[pos + 2] != ':') return std::nullopt;
        if (!parse_fixed_uint(text, pos + 3, 2, minute)) return std::nullopt;
        pos += 5;
        if (pos < text.size() && text[pos] == ':') {
            if (!parse_fixed_uint(text, pos + 1, 2, second)) return std::nullopt;
            pos += 3;
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        }
    }

    std::int64_t offset = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh, om = 0;
            if (!parse_fixed_uint(text, pos + 1, 2, oh)) return std::nullopt;
            std::size_t opos = pos + 3;
            if (opos < text.size() && text[opos] == ':') ++opos;
            if (opos < text.size()) {
                if (!parse_fixed_uint(text, opos, 2, om)) return std::nullopt;
                opos += 2;
            }
            offset = (c == '+' ? 1 : -1) * (oh * 3600 + om * 60);
            pos = opos;
        }
    }
    if (pos != text.size()) return std::nullopt;

    return timestamp_from_civil(year, static_cast<unsigned>(month),
                                static_cast<unsigned>(day), hour, minute, second) -
           offset;
}

std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool in_quotes = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
            } else {
                current.push_back(c);
                ++i;
            }
        } else if (c == '"') {
            in_quotes = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            ++i;
        } else {
            current.push_back(c);
            ++i;
        }
    }
    if (in_quotes) return std::nullopt;
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure: " + path);
    return content;
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure: " + path);
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string file_hash_hex(const std::string& path) {
    return fnv1a64_hex(slurp_file(path));
}

void BinWriter::u8(std::uint8_t v) { buf.push_back(static_cast<char>(v)); }

void BinWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void BinWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void BinWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
}

void BinWriter::bytes(std::string_view s) { buf.append(s.data(), s.size()); }

void BinWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
}

namespace {
void need(const BinReader& r, std::size_t n) {
    if (r.pos + n > r.buf.size()) throw IoError("truncated binary cache");
}
} // namespace

std::uint8_t BinReader::u8() {
    need(*this, 1);
    return static_cast<std::uint8_t>(buf[pos++]);
}

std::uint32_t BinReader::u32() {
    need(*this, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

std::uint64_t BinReader::u64() {
    need(*this, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
}

double BinReader::f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string BinReader::str() {
    const std::uint32_t len = u32();
    need(*this, len);
    std::string s(buf.substr(pos, len));
    pos += len;
    return s;
}

void BinReader::expect_magic(std::string_view magic, std::string_view what) {
    need(*this, magic.size());
    if (buf.substr(pos, magic.size()) != magic)
        throw IoError(std::string(what) + ": bad magic (expected " + std::string(magic) + ")");
    pos += magic.size();
}

} // namespace copet
