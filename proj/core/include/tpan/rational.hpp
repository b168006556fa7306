#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tpan {

// Exact fraction parsed from a decimal string such as "0.95".
// Threshold comparisons must not go through floating point, so the
// numerator/denominator pair is kept and compared with wide integers.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Rational() = default;
    constexpr Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {}

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
};

// Parses a non-negative decimal literal ("0.95", "1", ".5") into an exact
// fraction. At most 9 fractional digits are accepted so downstream
// 128-bit comparisons cannot overflow.
inline Rational parse_decimal(const std::string& text) {
    if (text.empty())
        throw std::invalid_argument("empty decimal literal");
    std::size_t dot = text.find('.');
    std::string int_part = dot == std::string::npos ? text : text.substr(0, dot);
    std::string frac_part = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        throw std::invalid_argument("malformed decimal literal: " + text);
    if (frac_part.size() > 9)
        throw std::invalid_argument("too many fractional digits (max 9): " + text);
    for (const std::string* part : {&int_part, &frac_part})
        for (char c : *part)
            if (c < '0' || c > '9')
                throw std::invalid_argument("malformed decimal literal: " + text);

    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i)
        den *= 10;
    std::int64_t num = 0;
    for (char c : int_part) {
        num = num * 10 + (c - '0');
        if (num > 1'000'000'000)
            throw std::invalid_argument("decimal literal out of range: " + text);
    }
    num *= den;
    for (char c : frac_part)
        num = num * 10 + (c - '0');

    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

// Renders the fraction back as a plain decimal string (den is always a
// product of 2s and 5s here since it came from parse_decimal).
inline std::string to_decimal_string(const Rational& r) {
    std::int64_t den = r.den;
    int digits = 0;
    while (den % 10 == 0) {
        den /= 10;
        ++digits;
    }
    while (den % 2 == 0) {
        den /= 2;
        ++digits;
    }
    while (den % 5 == 0) {
        den /= 5;
        ++digits;
    }
    // Rescale so the denominator is exactly 10^digits.
    std::int64_t pow10 = 1;
    for (int i = 0; i < digits; ++i)
        pow10 *= 10;
    std::int64_t scaled = r.num * (pow10 / r.den);
    std::int64_t ip = scaled / pow10;
    std::int64_t fp = scaled % pow10;
    std::string out = std::to_string(ip);
    if (digits > 0) {
        std::string f = std::to_string(fp);
        out += "." + std::string(digits - f.size(), '0') + f;
    }
    return out;
}

}  // namespace tpan
