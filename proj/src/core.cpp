#include "sentibt/core.hpp"

#include <cctype>
#include <cstdio>
#include <functional>

namespace sentibt {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

int days_in_month(int y, int m) {
    static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return m == 2 && leap ? 29 : d[m - 1];
}

bool parse_int_field(const std::string& s, std::size_t pos, std::size_t len, int* out) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    *out = v;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Date

bool Date::try_parse(const std::string& text, Date* out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    Date d;
    if (!parse_int_field(text, 0, 4, &d.year) || !parse_int_field(text, 5, 2, &d.month) ||
        !parse_int_field(text, 8, 2, &d.day)) {
        return false;
    }
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        return false;
    }
    *out = d;
    return true;
}

Date Date::parse(const std::string& text) {
    Date d;
    if (!try_parse(text, &d)) {
        throw Error("MalformedDate", "core", "parse_date", text,
                    "expected ISO-8601 calendar date YYYY-MM-DD");
    }
    return d;
}

std::string Date::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

// Howard Hinnant's civil-day algorithms.
std::int64_t Date::ordinal() const {
    const int y = year - (month <= 2);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_ordinal(std::int64_t ord) {
    const std::int64_t z = ord + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

// ---------------------------------------------------------------------------
// Timestamps

std::string TimeOfDay::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes_since_midnight / 60,
                  minutes_since_midnight % 60);
    return buf;
}

MarketTimestamp MarketTimestamp::parse(const std::string& text) {
    const auto fail = [&](const std::string& why) -> MarketTimestamp {
        throw Error("MalformedTimestamp", "core", "parse_timestamp", text, why);
    };
    // YYYY-MM-DD{T| }HH:MM[:SS]+08:00
    if (text.size() < 22) return fail("timestamp too short");
    MarketTimestamp ts;
    if (!Date::try_parse(text.substr(0, 10), &ts.date)) return fail("bad date part");
    if (text[10] != 'T' && text[10] != ' ') return fail("expected 'T' or space separator");
    int hh = 0;
    int mm = 0;
    if (!parse_int_field(text, 11, 2, &hh) || text[13] != ':' ||
        !parse_int_field(text, 14, 2, &mm)) {
        return fail("bad time part");
    }
    if (hh > 23 || mm > 59) return fail("time out of range");
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        int ss = 0;
        if (!parse_int_field(text, pos + 1, 2, &ss) || ss > 59) return fail("bad seconds");
        pos += 3; // seconds truncated toward the earlier minute
    }
    if (text.substr(pos) != "+08:00") return fail("offset must be +08:00");
    ts.time.minutes_since_midnight = hh * 60 + mm;
    return ts;
}

std::string MarketTimestamp::str() const {
    return date.str() + "T" + time.str() + ":00+08:00";
}

bool is_pre_open(const MarketTimestamp& ts) {
    return ts.time.minutes_since_midnight < 9 * 60 + 30;
}

// ---------------------------------------------------------------------------
// StockId

const char* exchange_name(Exchange e) {
    return e == Exchange::sse ? "SSE" : "SZSE";
}

std::string StockId::str() const {
    return std::string(exchange_name(exchange)) + ":" + code;
}

StockId make_stock_id(Exchange exchange, const std::string& code) {
    if (code.size() != 6 || !all_digits(code)) {
        throw Error("MalformedStockId", "core", "parse_stock_id", code,
                    "code must be exactly 6 decimal digits");
    }
    return StockId{exchange, code};
}

StockId parse_stock_id(const std::string& raw) {
    const auto colon = raw.find(':');
    if (colon == std::string::npos) {
        throw Error("MalformedStockId", "core", "parse_stock_id", raw,
                    "expected EXCHANGE:CODE, e.g. SSE:600519");
    }
    const std::string ex = raw.substr(0, colon);
    Exchange exchange;
    if (ex == "SSE") {
        exchange = Exchange::sse;
    } else if (ex == "SZSE") {
        exchange = Exchange::szse;
    } else {
        throw Error("MalformedStockId", "core", "parse_stock_id", raw,
                    "exchange must be SSE or SZSE");
    }
    return make_stock_id(exchange, raw.substr(colon + 1));
}

std::size_t StockIdHash::operator()(const StockId& s) const {
    std::size_t h = std::hash<std::string>()(s.code);
    return h * 2 + static_cast<std::size_t>(s.exchange);
}

// ---------------------------------------------------------------------------
// TradingCalendar

TradingCalendar::TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 0; i < dates_.size(); ++i) {
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw Error("CalendarNotIncreasing", "core", "trading_calendar",
                        dates_[i].str(), "calendar dates must be strictly increasing");
        }
        index_[dates_[i].key()] = i;
    }
}

std::optional<std::size_t> TradingCalendar::index_of(const Date& d) const {
    const auto it = index_.find(d.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string Error::structured_line() const {
    std::string line = "error module=" + module_ + " op=" + op_;
    if (!location_.empty()) line += " loc=" + location_;
    line += " code=" + code_ + " msg=\"" + what() + "\"";
    return line;
}

} // namespace sentibt
