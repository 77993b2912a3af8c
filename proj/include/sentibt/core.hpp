#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sentibt/error.hpp"
#include "sentibt/money.hpp"

namespace sentibt {

// ---------------------------------------------------------------------------
// Calendar date, ISO-8601 text form "2022-03-15".

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    static Date parse(const std::string& text);
    static bool try_parse(const std::string& text, Date* out);

    std::string str() const;
    // Days since 1970-01-01 (civil calendar); total order and day stepping.
    std::int64_t ordinal() const;
    static Date from_ordinal(std::int64_t ord);
    // Compact yyyymmdd key for hashing.
    int key() const { return year * 10'000 + month * 100 + day; }

    friend auto operator<=>(const Date& a, const Date& b) = default;
};

// Minute-precision time of day. Seconds on input are truncated toward the
// earlier minute, which can only make an item *more* likely to count as
// pre-open; it never promotes a post-open item.
struct TimeOfDay {
    int minutes_since_midnight = 0;

    friend auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;
    std::string str() const; // "HH:MM"
};

// Timestamp pinned to UTC+8. Inputs must carry the +08:00 offset explicitly;
// any other zone is rejected rather than converted.
struct MarketTimestamp {
    Date date;
    TimeOfDay time;

    // "2022-03-15T09:29:00+08:00" ('T' or space, seconds optional).
    static MarketTimestamp parse(const std::string& text);
    std::string str() const;

    friend auto operator<=>(const MarketTimestamp&, const MarketTimestamp&) = default;
};

// True iff strictly before the 09:30 open.
bool is_pre_open(const MarketTimestamp& ts);

// ---------------------------------------------------------------------------
// Stock identity: exchange plus 6-digit ticker, canonical text "SSE:600519".

enum class Exchange : std::uint8_t { sse, szse };

const char* exchange_name(Exchange e);

struct StockId {
    Exchange exchange = Exchange::sse;
    std::string code; // exactly 6 decimal digits

    std::string str() const;
    friend auto operator<=>(const StockId& a, const StockId& b) = default;
};

StockId parse_stock_id(const std::string& raw);
StockId make_stock_id(Exchange exchange, const std::string& code);

struct StockIdHash {
    std::size_t operator()(const StockId& s) const;
};

// ---------------------------------------------------------------------------
// Trading calendar: the strictly increasing list of simulated dates.

class TradingCalendar {
public:
    TradingCalendar() = default;
    // Throws if dates are not strictly increasing.
    explicit TradingCalendar(std::vector<Date> dates);

    std::size_t size() const { return dates_.size(); }
    bool empty() const { return dates_.empty(); }
    const Date& at(std::size_t i) const { return dates_[i]; }
    const std::vector<Date>& dates() const { return dates_; }

    bool contains(const Date& d) const { return index_.count(d.key()) != 0; }
    // Position of d in the calendar, or nullopt.
    std::optional<std::size_t> index_of(const Date& d) const;

private:
    std::vector<Date> dates_;
    std::unordered_map<int, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// News and price records.

struct TextPayload {
    std::string text;
    bool operator==(const TextPayload&) const = default;
};
struct ScorePayload {
    double score = 0.0;
    bool operator==(const ScorePayload&) const = default;
};

struct NewsRecord {
    std::string news_id;
    StockId stock;
    MarketTimestamp timestamp;
    std::string source;
    std::variant<TextPayload, ScorePayload> payload;
    std::string provider; // optional provider-kind token carried from input

    bool has_text() const { return std::holds_alternative<TextPayload>(payload); }
    const std::string& text() const { return std::get<TextPayload>(payload).text; }
    double score_value() const { return std::get<ScorePayload>(payload).score; }
};

struct WindowTrade {
    Money price;          // currency/share, > 0
    std::int64_t volume = 0; // shares, >= 0
};

struct DailyPriceRecord {
    StockId stock;
    Date date;
    std::vector<WindowTrade> window_trades; // 09:30-09:35 minute trades, or
    std::optional<Money> vwap;              // a precomputed window VWAP
    Money close;
    bool tradable = true;
    bool synthesized = false; // gap-filled by the loader, never from a file row
};

} // namespace sentibt
