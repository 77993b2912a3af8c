#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentibt/core.hpp"

namespace sentibt {

struct NewsDataset {
    std::vector<NewsRecord> records;
    std::map<std::string, std::size_t> source_histogram;
};

struct PriceDataset {
    // Keyed by stock, then dense over calendar indices [first_index, ...].
    // Missing interior/trailing dates are synthesized as tradable=false with
    // the last known close carried forward, so a held position can always be
    // valued; dates before a stock's first row stay absent.
    std::unordered_map<StockId, std::vector<DailyPriceRecord>, StockIdHash> records;
    std::unordered_map<StockId, std::size_t, StockIdHash> first_index;
    TradingCalendar calendar;
    std::vector<double> benchmark; // index level per calendar date, > 0

    const DailyPriceRecord* find(const StockId& stock, std::size_t calendar_index) const;
    std::vector<StockId> stocks_sorted() const;
};

enum class NewsFormat { csv, jsonl };

struct RowIssue {
    int line = 0;          // 1-based input line
    std::string code;      // same codes as Error
    std::string message;
};

struct LoadOptions {
    // Strict loaders throw on the first bad row; with skip_bad_rows every
    // skipped row is still reported in `issues` so nothing is lost silently.
    bool skip_bad_rows = false;
};

struct NewsLoadResult {
    NewsDataset dataset;
    std::vector<RowIssue> issues;
    std::size_t rows_in = 0;
};

struct PriceLoadResult {
    PriceDataset dataset;
    std::vector<RowIssue> issues;
    std::size_t rows_in = 0;
};

// News file columns: news_id, stock_id, timestamp, source, text, score,
// provider (exactly one of text/score per row). Duplicate news_ids fail the
// whole dataset and name every involved line.
NewsLoadResult load_news(const std::string& path, NewsFormat format,
                         const LoadOptions& options = {});

// Keeps exactly the records stamped strictly before 09:30, in input order.
NewsDataset filter_pre_open(const NewsDataset& ds);

// Percentage of records per source; percentages sum to 100 within 0.01.
std::map<std::string, double> news_source_report(const NewsDataset& ds);

// Calendar file: one ISO date per line (optional "date" header), ascending.
TradingCalendar load_calendar(const std::string& path);

// Benchmark file columns: date, index_level; must cover every calendar date.
std::vector<double> load_benchmark(const std::string& path, const TradingCalendar& calendar);

// Price file columns: stock_id, date, vwap_0930_0935, w1..w5_price,
// w1..w5_volume, close, tradable. Exactly one of the vwap column or the
// window columns is populated per row.
PriceLoadResult load_prices(const std::string& path, const TradingCalendar& calendar,
                            std::vector<double> benchmark, const LoadOptions& options = {});

} // namespace sentibt
