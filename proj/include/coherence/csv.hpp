#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace coherence {

/// Shortest decimal text that parses back to exactly x.
std::string format_number(double x);

/// x rounded to `digits` significant digits, trailing zeros dropped.
std::string format_number(double x, int digits);

/// 64-bit FNV-1a, used for config and network fingerprints in CSV headers.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string   hex64(std::uint64_t h);

/**
 * Accumulates a CSV document in memory: `#`-prefixed metadata lines, one header
 * row and data rows. Numbers go through format_number so identical inputs give
 * byte-identical output.
 */
class CsvDocument {
   public:
    void meta(std::string_view key, std::string_view value);
    void header(std::initializer_list<std::string_view> columns);
    void header(const std::vector<std::string>& columns);

    class Row {
       public:
        Row& operator<<(double x);
        Row& operator<<(long long x);
        Row& operator<<(int x) { return *this << static_cast<long long>(x); }
        Row& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
        Row& operator<<(bool b);
        Row& operator<<(std::string_view s);
        Row& operator<<(const char* s) { return *this << std::string_view(s); }
        Row& empty();
        ~Row();

       private:
        friend class CsvDocument;
        explicit Row(std::string& sink) : sink_(sink) {}
        void        sep();
        std::string& sink_;
        bool         first_ = true;
    };

    Row row() { return Row(body_); }

    std::string str() const;
    void        write(const std::string& path) const;

   private:
    std::string meta_;
    std::string header_;
    std::string body_;
};

}  // namespace coherence
