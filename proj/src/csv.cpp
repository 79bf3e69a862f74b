#include "coherence/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "coherence/error.hpp"

namespace coherence {

std::string format_number(double x) {
    if (x == 0.0) return "0";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

std::string format_number(double x, int digits) {
    if (x == 0.0) return "0";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, digits);
    return std::string(buf.data(), ptr);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string           out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

void CsvDocument::meta(std::string_view key, std::string_view value) {
    meta_ += "# ";
    meta_ += key;
    meta_ += '=';
    meta_ += value;
    meta_ += '\n';
}

void CsvDocument::header(std::initializer_list<std::string_view> columns) {
    header_.clear();
    bool first = true;
    for (auto c : columns) {
        if (!first) header_ += ',';
        header_ += c;
        first = false;
    }
    header_ += '\n';
}

void CsvDocument::header(const std::vector<std::string>& columns) {
    header_.clear();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) header_ += ',';
        header_ += columns[i];
    }
    header_ += '\n';
}

void CsvDocument::Row::sep() {
    if (!first_) sink_ += ',';
    first_ = false;
}

CsvDocument::Row& CsvDocument::Row::operator<<(double x) {
    sep();
    sink_ += format_number(x);
    return *this;
}

CsvDocument::Row& CsvDocument::Row::operator<<(long long x) {
    sep();
    sink_ += std::to_string(x);
    return *this;
}

CsvDocument::Row& CsvDocument::Row::operator<<(bool b) {
    sep();
    sink_ += b ? "true" : "false";
    return *this;
}

CsvDocument::Row& CsvDocument::Row::operator<<(std::string_view s) {
    sep();
    sink_ += s;
    return *this;
}

CsvDocument::Row& CsvDocument::Row::empty() {
    sep();
    return *this;
}

CsvDocument::Row::~Row() { sink_ += '\n'; }

std::string CsvDocument::str() const { return meta_ + header_ + body_; }

void CsvDocument::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    const std::string text = str();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

}  // namespace coherence
