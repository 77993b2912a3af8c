#include <doctest.h>

#include <algorithm>
#include <random>

#include "sentibt/core.hpp"
#include "sentibt/money.hpp"

using namespace sentibt;

TEST_CASE("parse_stock_id accepts canonical forms") {
    const StockId a = parse_stock_id("SSE:600519");
    CHECK(a.exchange == Exchange::sse);
    CHECK(a.code == "600519");
    CHECK(a.str() == "SSE:600519");

    const StockId b = parse_stock_id("SZSE:000001");
    CHECK(b.exchange == Exchange::szse);
    CHECK(b.code == "000001");

    // round trip is the identity
    CHECK(parse_stock_id(a.str()) == a);
    CHECK(parse_stock_id(b.str()) == b);
}

TEST_CASE("parse_stock_id rejects malformed codes") {
    const auto check_rejects = [](const std::string& raw) {
        try {
            parse_stock_id(raw);
            FAIL("expected rejection of ", raw);
        } catch (const Error& e) {
            CHECK(e.code() == "MalformedStockId");
        }
    };
    check_rejects("SSE:60051");    // five digits
    check_rejects("SSE:6005190");  // seven digits
    check_rejects("SSE:60051a");   // non-digit
    check_rejects("NYSE:600519");  // unknown exchange
    check_rejects("600519");       // no exchange
}

TEST_CASE("stock id ordering is total and deterministic") {
    std::vector<StockId> ids = {
        {Exchange::szse, "000001"}, {Exchange::sse, "600519"}, {Exchange::sse, "000001"},
        {Exchange::szse, "300750"}, {Exchange::sse, "600518"},
    };
    auto a = ids;
    auto b = ids;
    std::sort(a.begin(), a.end());
    std::sort(b.rbegin(), b.rend());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(a.front() == StockId{Exchange::sse, "000001"});
    CHECK(a.back() == StockId{Exchange::szse, "300750"});
}

TEST_CASE("is_pre_open is strict at the 09:30 boundary") {
    const auto at = [](const std::string& hm) {
        return MarketTimestamp::parse("2022-03-15T" + hm + ":00+08:00");
    };
    CHECK(is_pre_open(at("09:29")));
    CHECK_FALSE(is_pre_open(at("09:30")));
    CHECK_FALSE(is_pre_open(at("15:00")));
    CHECK(is_pre_open(at("00:00")));
}

TEST_CASE("timestamps truncate seconds toward the earlier minute") {
    const auto ts = MarketTimestamp::parse("2022-03-15T09:29:59+08:00");
    CHECK(ts.time.minutes_since_midnight == 9 * 60 + 29);
    CHECK(is_pre_open(ts));
    // an exact 09:30:00 stamp stays post-open
    CHECK_FALSE(is_pre_open(MarketTimestamp::parse("2022-03-15T09:30:00+08:00")));
}

TEST_CASE("timestamps reject foreign zones and junk") {
    CHECK_THROWS_AS(MarketTimestamp::parse("2022-03-15T09:29:00+09:00"), Error);
    CHECK_THROWS_AS(MarketTimestamp::parse("2022-03-15T09:29:00Z"), Error);
    CHECK_THROWS_AS(MarketTimestamp::parse("2022-13-15T09:29:00+08:00"), Error);
    CHECK_THROWS_AS(MarketTimestamp::parse("garbage"), Error);
    // space separator is fine
    CHECK(MarketTimestamp::parse("2022-03-15 08:00+08:00").time.minutes_since_midnight == 480);
}

TEST_CASE("timestamp serialization round-trips") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        MarketTimestamp ts;
        ts.date = Date{2021 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 28)};
        ts.time.minutes_since_midnight = static_cast<int>(rng() % (24 * 60));
        CHECK(MarketTimestamp::parse(ts.str()) == ts);
    }
}

TEST_CASE("date ordinal round-trips across year boundaries") {
    const Date d{2022, 3, 15};
    CHECK(Date::from_ordinal(d.ordinal()) == d);
    CHECK(Date::parse("2022-03-15") == d);
    CHECK(d.str() == "2022-03-15");
    CHECK(Date{2022, 1, 1}.ordinal() - Date{2021, 12, 31}.ordinal() == 1);
    CHECK(Date{2024, 2, 29}.str() == "2024-02-29"); // leap day valid
    CHECK_THROWS_AS(Date::parse("2023-02-29"), Error);
}

TEST_CASE("trading calendar rejects unordered dates") {
    CHECK_THROWS_AS(TradingCalendar({Date{2022, 1, 4}, Date{2022, 1, 3}}), Error);
    CHECK_THROWS_AS(TradingCalendar({Date{2022, 1, 4}, Date{2022, 1, 4}}), Error);
    const TradingCalendar cal({Date{2022, 1, 3}, Date{2022, 1, 4}, Date{2022, 1, 5}});
    CHECK(cal.index_of(Date{2022, 1, 4}) == 1);
    CHECK_FALSE(cal.index_of(Date{2022, 1, 8}).has_value());
}

TEST_CASE("money parses and prints exactly four decimals") {
    CHECK(Money::parse("6000.00").raw() == 60'000'000);
    CHECK(Money::parse("0.0015").raw() == 15);
    CHECK(Money::parse("-1.5").raw() == -15'000);
    CHECK(Money::parse("10.75").str() == "10.7500");
    CHECK(Money::parse("-0.0001").str() == "-0.0001");
    CHECK_THROWS_AS(Money::parse("1.00005"), Error); // more precision than the scale
    CHECK_THROWS_AS(Money::parse("abc"), Error);
    CHECK(Money::parse(Money::parse("123.4567").str()) == Money::parse("123.4567"));
}

TEST_CASE("money rounding is half-even at operation boundaries") {
    // 0.00005 boundary cases, denominators of ten
    CHECK(round_half_even(5, 10) == 0);   // 0.5 -> 0 (even)
    CHECK(round_half_even(15, 10) == 2);  // 1.5 -> 2 (even)
    CHECK(round_half_even(25, 10) == 2);  // 2.5 -> 2
    CHECK(round_half_even(-15, 10) == -2);
    CHECK(round_half_even(-25, 10) == -2);
    CHECK(round_half_even(26, 10) == 3);
    CHECK(round_half_even(24, 10) == 2);

    // fee example: 6000.00 * 0.0015 = 9.00 exactly
    const Money gross = Money::parse("6000.00");
    CHECK(gross.mul_ratio(15, 10'000).str() == "9.0000");
    // a genuine half: 33.33 * 0.0015 = 0.049995 -> 0.0500
    CHECK(Money::parse("33.33").mul_ratio(15, 10'000).str() == "0.0500");
    // half-even tie: 0.1000 * 0.0015 = 0.00015 -> 0.0002 (2 is even)
    CHECK(Money::parse("0.1000").mul_ratio(15, 10'000).raw() == 2);
    // and 0.3000 * 0.0015 = 0.00045 -> 0.0004 (4 is even)
    CHECK(Money::parse("0.3000").mul_ratio(15, 10'000).raw() == 4);
}

TEST_CASE("money sums are order-independent and reproducible") {
    std::mt19937_64 rng(11);
    std::vector<Money> values;
    for (int i = 0; i < 500; ++i) {
        values.push_back(Money::from_raw(static_cast<std::int64_t>(rng() % 2'000'000) - 1'000'000));
    }
    Money forward;
    for (const Money& v : values) forward += v;
    Money backward;
    for (auto it = values.rbegin(); it != values.rend(); ++it) backward += *it;
    CHECK(forward == backward); // fixed-point addition is associative
    Money again;
    for (const Money& v : values) again += v;
    CHECK(forward == again);
}

TEST_CASE("money split_floor never overshoots") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 1000; ++i) {
        const Money total = Money::from_raw(static_cast<std::int64_t>(rng() % 1'000'000'000));
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 17);
        const Money part = total.split_floor(n);
        Money scaled;
        for (std::int64_t k = 0; k < n; ++k) scaled += part;
        CHECK(scaled <= total);
        CHECK(total - scaled < Money::from_raw(n));
    }
}

TEST_CASE("decimal rate parses config text exactly") {
    const DecimalRate fee = DecimalRate::parse("0.0015");
    CHECK(fee.num * (1'000'000'000 / fee.den) == 1'500'000);
    CHECK(fee.str() == "0.0015");
    CHECK(DecimalRate::parse("1.0").str() == "1");
    CHECK(DecimalRate::parse("0.5").to_double() == 0.5);
    CHECK_THROWS_AS(DecimalRate::parse("-0.1"), Error);
}
