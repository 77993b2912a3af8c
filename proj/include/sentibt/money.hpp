#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sentibt {

// Fixed-point CNY amount with 4 fractional digits. The raw value is the
// amount scaled by 10^4. Addition and subtraction are exact; multiplying by
// a decimal rate rounds half-even at the 4th decimal. Never NaN.
class Money {
public:
    static constexpr std::int64_t kScale = 10'000;

    constexpr Money() = default;

    static constexpr Money from_raw(std::int64_t raw) {
        Money m;
        m.raw_ = raw;
        return m;
    }
    static constexpr Money from_units(std::int64_t units) {
        return from_raw(units * kScale);
    }
    // Parses "1234.56" / "-0.0015" style decimals; more than 4 fractional
    // digits is rejected rather than silently rounded.
    static Money parse(const std::string& text);

    constexpr std::int64_t raw() const { return raw_; }
    constexpr bool is_zero() const { return raw_ == 0; }
    constexpr bool is_negative() const { return raw_ < 0; }

    Money operator+(Money other) const;
    Money operator-(Money other) const;
    Money& operator+=(Money other);
    Money& operator-=(Money other);
    constexpr Money operator-() const { return from_raw(-raw_); }

    friend constexpr auto operator<=>(Money a, Money b) = default;

    // shares * price/share, exact (no rounding involved).
    static Money shares_times_price(std::int64_t shares, Money price);

    // this * num / 10^k style scaling with round-half-even at Money scale.
    Money mul_ratio(std::int64_t num, std::int64_t den) const;

    // Equal split: largest amount x with x * n <= this (n > 0, this >= 0).
    Money split_floor(std::int64_t n) const;

    // Canonical text form with exactly 4 decimals, e.g. "6000.0000".
    std::string str() const;

    double to_double() const { return static_cast<double>(raw_) / kScale; }

private:
    std::int64_t raw_ = 0;
};

// A non-negative decimal rate num/den with den a power of ten, parsed
// exactly from config text so fee and cap arithmetic never touches binary
// floating point.
struct DecimalRate {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static DecimalRate parse(const std::string& text); // up to 9 decimals
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// round(n / d) half-to-even; d > 0. Exposed for the exact-arithmetic tests.
std::int64_t round_half_even(__int128 numerator, std::int64_t denominator);

} // namespace sentibt
