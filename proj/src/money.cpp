#include "sentibt/money.hpp"

#include <cctype>
#include <cstdio>
#include <limits>

#include "sentibt/error.hpp"

namespace sentibt {

namespace {

[[noreturn]] void bad_decimal(const std::string& text, const std::string& why) {
    throw Error("MalformedDecimal", "core", "parse_decimal", text, why);
}

void check_overflow(bool ok, const char* what) {
    if (!ok) {
        throw Error("MoneyOverflow", "core", what, "", "fixed-point overflow");
    }
}

// Parses [-]digits[.digits] into a scaled integer with exactly `scale_digits`
// fractional digits; rejects extra precision.
std::int64_t parse_scaled(const std::string& text, int scale_digits) {
    if (text.empty()) bad_decimal(text, "empty decimal");
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-' || text[i] == '+') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) {
        bad_decimal(text, "expected digit");
    }
    __int128 whole = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        whole = whole * 10 + (text[i] - '0');
        if (whole > std::numeric_limits<std::int64_t>::max()) bad_decimal(text, "too large");
    }
    __int128 frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (i >= text.size()) bad_decimal(text, "trailing decimal point");
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            if (frac_digits < scale_digits) {
                frac = frac * 10 + (text[i] - '0');
                ++frac_digits;
            } else if (text[i] != '0') {
                bad_decimal(text, "more fractional digits than the fixed scale");
            } else {
                ++frac_digits;
            }
        }
    }
    if (i != text.size()) bad_decimal(text, "trailing characters");
    for (int k = frac_digits; k < scale_digits; ++k) frac *= 10;
    __int128 scale = 1;
    for (int k = 0; k < scale_digits; ++k) scale *= 10;
    __int128 raw = whole * scale + frac;
    if (neg) raw = -raw;
    if (raw > std::numeric_limits<std::int64_t>::max() ||
        raw < std::numeric_limits<std::int64_t>::min()) {
        bad_decimal(text, "too large");
    }
    return static_cast<std::int64_t>(raw);
}

} // namespace

std::int64_t round_half_even(__int128 numerator, std::int64_t denominator) {
    const bool neg = numerator < 0;
    __int128 n = neg ? -numerator : numerator;
    const __int128 d = denominator;
    __int128 q = n / d;
    const __int128 r = n % d;
    const __int128 twice = r * 2;
    if (twice > d || (twice == d && (q & 1) != 0)) ++q;
    if (neg) q = -q;
    check_overflow(q <= std::numeric_limits<std::int64_t>::max() &&
                       q >= std::numeric_limits<std::int64_t>::min(),
                   "round_half_even");
    return static_cast<std::int64_t>(q);
}

Money Money::parse(const std::string& text) {
    return from_raw(parse_scaled(text, 4));
}

Money Money::operator+(Money other) const {
    Money m = *this;
    m += other;
    return m;
}

Money Money::operator-(Money other) const {
    Money m = *this;
    m -= other;
    return m;
}

Money& Money::operator+=(Money other) {
    check_overflow(!__builtin_add_overflow(raw_, other.raw_, &raw_), "money_add");
    return *this;
}

Money& Money::operator-=(Money other) {
    check_overflow(!__builtin_sub_overflow(raw_, other.raw_, &raw_), "money_sub");
    return *this;
}

Money Money::shares_times_price(std::int64_t shares, Money price) {
    const __int128 raw = static_cast<__int128>(shares) * price.raw_;
    check_overflow(raw <= std::numeric_limits<std::int64_t>::max() &&
                       raw >= std::numeric_limits<std::int64_t>::min(),
                   "shares_times_price");
    return from_raw(static_cast<std::int64_t>(raw));
}

Money Money::mul_ratio(std::int64_t num, std::int64_t den) const {
    return from_raw(round_half_even(static_cast<__int128>(raw_) * num, den));
}

Money Money::split_floor(std::int64_t n) const {
    return from_raw(raw_ >= 0 ? raw_ / n : -((-raw_ + n - 1) / n));
}

std::string Money::str() const {
    const std::int64_t a = raw_ < 0 ? -raw_ : raw_;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%04lld", raw_ < 0 ? "-" : "",
                  static_cast<long long>(a / kScale),
                  static_cast<long long>(a % kScale));
    return buf;
}

DecimalRate DecimalRate::parse(const std::string& text) {
    const std::int64_t raw = parse_scaled(text, 9);
    if (raw < 0) bad_decimal(text, "rate must be non-negative");
    return DecimalRate{raw, 1'000'000'000};
}

std::string DecimalRate::str() const {
    std::int64_t n = num;
    std::int64_t d = den;
    while (d > 1 && n % 10 == 0) {
        n /= 10;
        d /= 10;
    }
    if (d == 1) return std::to_string(n);
    std::string frac = std::to_string(n % d);
    std::string pad;
    std::int64_t digits = 0;
    for (std::int64_t x = d; x > 1; x /= 10) ++digits;
    while (static_cast<std::int64_t>(frac.size()) < digits) frac.insert(frac.begin(), '0');
    return std::to_string(n / d) + "." + frac;
}

} // namespace sentibt
