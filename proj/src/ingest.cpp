#include "sentibt/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sentibt/csv.hpp"

namespace sentibt {

namespace {

struct RawNewsRow {
    int line = 0;
    std::string news_id;
    std::string stock_id;
    std::string timestamp;
    std::string source;
    std::string text;
    std::string score;
    std::string provider;
};

bool parse_double_strict(const std::string& s, double* out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, *out);
    return res.ec == std::errc() && res.ptr == end;
}

NewsRecord make_news_record(const RawNewsRow& row) {
    const auto fail = [&](const std::string& code, const std::string& why) -> NewsRecord {
        throw Error(code, "ingest", "load_news", "line " + std::to_string(row.line), why);
    };
    if (row.news_id.empty()) return fail("MissingField", "news_id is empty");
    if (row.stock_id.empty()) return fail("MissingField", "stock_id is empty");
    if (row.timestamp.empty()) return fail("MissingField", "timestamp is empty");
    NewsRecord rec;
    rec.news_id = row.news_id;
    try {
        rec.stock = parse_stock_id(row.stock_id);
        rec.timestamp = MarketTimestamp::parse(row.timestamp);
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    }
    rec.source = row.source;
    rec.provider = row.provider;
    const bool has_text = !row.text.empty();
    const bool has_score = !row.score.empty();
    if (has_text == has_score) {
        return fail("PayloadAmbiguous", "exactly one of text/score must be populated");
    }
    if (has_text) {
        rec.payload = TextPayload{row.text};
    } else {
        double v = 0.0;
        if (!parse_double_strict(row.score, &v)) return fail("MalformedScore", "score is not a decimal");
        rec.payload = ScorePayload{v};
    }
    return rec;
}

std::vector<RawNewsRow> read_news_csv(const std::string& path, std::size_t* rows_in) {
    const CsvTable table = read_csv(path);
    const char* required[] = {"news_id", "stock_id", "timestamp", "source"};
    for (const char* col : required) {
        if (!table.column(col)) {
            throw Error("MissingColumn", "ingest", "load_news", path,
                        std::string("missing column ") + col);
        }
    }
    const auto idx = [&](const char* name) { return table.column(name); };
    const auto id_col = *idx("news_id");
    const auto stock_col = *idx("stock_id");
    const auto ts_col = *idx("timestamp");
    const auto source_col = *idx("source");
    const auto text_col = idx("text");
    const auto score_col = idx("score");
    const auto provider_col = idx("provider");

    std::vector<RawNewsRow> rows;
    rows.reserve(table.rows.size());
    for (const CsvRow& row : table.rows) {
        RawNewsRow raw;
        raw.line = row.line;
        raw.news_id = row.fields[id_col];
        raw.stock_id = row.fields[stock_col];
        raw.timestamp = row.fields[ts_col];
        raw.source = row.fields[source_col];
        if (text_col) raw.text = row.fields[*text_col];
        if (score_col) raw.score = row.fields[*score_col];
        if (provider_col) raw.provider = row.fields[*provider_col];
        rows.push_back(std::move(raw));
    }
    *rows_in = rows.size();
    return rows;
}

std::vector<RawNewsRow> read_news_jsonl(const std::string& path, std::size_t* rows_in) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw Error("FileNotFound", "ingest", "load_news", path, "cannot open file");
    }
    std::vector<RawNewsRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("MalformedJson", "ingest", "load_news",
                        "line " + std::to_string(line_no), e.what());
        }
        RawNewsRow raw;
        raw.line = line_no;
        const auto get = [&](const char* key) -> std::string {
            if (!j.contains(key) || j[key].is_null()) return "";
            if (j[key].is_string()) return j[key].get<std::string>();
            return j[key].dump();
        };
        raw.news_id = get("news_id");
        raw.stock_id = get("stock_id");
        raw.timestamp = get("timestamp");
        raw.source = get("source");
        raw.text = get("text");
        raw.score = get("score");
        raw.provider = get("provider");
        rows.push_back(std::move(raw));
    }
    *rows_in = rows.size();
    return rows;
}

} // namespace

NewsLoadResult load_news(const std::string& path, NewsFormat format, const LoadOptions& options) {
    NewsLoadResult result;
    const std::vector<RawNewsRow> rows = format == NewsFormat::csv
                                             ? read_news_csv(path, &result.rows_in)
                                             : read_news_jsonl(path, &result.rows_in);

    std::unordered_map<std::string, std::vector<int>> id_lines;
    for (const RawNewsRow& raw : rows) {
        try {
            NewsRecord rec = make_news_record(raw);
            id_lines[rec.news_id].push_back(raw.line);
            result.dataset.records.push_back(std::move(rec));
        } catch (const Error& e) {
            if (!options.skip_bad_rows) throw;
            result.issues.push_back(RowIssue{raw.line, e.code(), e.what()});
        }
    }

    // Duplicates poison cross-run comparability, so they fail the dataset even
    // in skip mode.
    for (const auto& [id, lines] : id_lines) {
        if (lines.size() > 1) {
            std::string where = "lines:[";
            for (std::size_t i = 0; i < lines.size(); ++i) {
                if (i > 0) where += ",";
                where += std::to_string(lines[i]);
            }
            where += "]";
            throw Error("DuplicateNewsId", "ingest", "load_news", where,
                        "news_id " + id + " appears more than once");
        }
    }

    for (const NewsRecord& rec : result.dataset.records) {
        ++result.dataset.source_histogram[rec.source];
    }
    return result;
}

NewsDataset filter_pre_open(const NewsDataset& ds) {
    NewsDataset out;
    for (const NewsRecord& rec : ds.records) {
        if (is_pre_open(rec.timestamp)) {
            out.records.push_back(rec);
            ++out.source_histogram[rec.source];
        }
    }
    return out;
}

std::map<std::string, double> news_source_report(const NewsDataset& ds) {
    if (ds.records.empty()) {
        throw Error("EmptyDataset", "ingest", "news_source_report", "",
                    "cannot report source proportions of an empty dataset");
    }
    std::map<std::string, double> out;
    const double n = static_cast<double>(ds.records.size());
    for (const auto& [source, count] : ds.source_histogram) {
        out[source] = 100.0 * static_cast<double>(count) / n;
    }
    return out;
}

TradingCalendar load_calendar(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw Error("FileNotFound", "ingest", "load_calendar", path, "cannot open file");
    }
    std::vector<Date> dates;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Date d;
        if (!Date::try_parse(line, &d)) {
            if (line_no == 1 && line == "date") continue; // optional header
            throw Error("MalformedDate", "ingest", "load_calendar",
                        "line " + std::to_string(line_no), "expected YYYY-MM-DD");
        }
        dates.push_back(d);
    }
    return TradingCalendar(std::move(dates));
}

std::vector<double> load_benchmark(const std::string& path, const TradingCalendar& calendar) {
    const CsvTable table = read_csv(path);
    const auto date_col = table.column("date");
    const auto level_col = table.column("index_level");
    if (!date_col || !level_col) {
        throw Error("MissingColumn", "ingest", "load_benchmark", path,
                    "expected columns date, index_level");
    }
    std::vector<double> levels(calendar.size(), 0.0);
    std::vector<bool> seen(calendar.size(), false);
    for (const CsvRow& row : table.rows) {
        const std::string where = "line " + std::to_string(row.line);
        Date d;
        if (!Date::try_parse(row.fields[*date_col], &d)) {
            throw Error("MalformedDate", "ingest", "load_benchmark", where, "bad date");
        }
        const auto idx = calendar.index_of(d);
        if (!idx) {
            throw Error("DateOffCalendar", "ingest", "load_benchmark", where,
                        d.str() + " is not a trading date");
        }
        double level = 0.0;
        if (!parse_double_strict(row.fields[*level_col], &level) || level <= 0.0) {
            throw Error("NonPositiveLevel", "ingest", "load_benchmark", where,
                        "index_level must be a positive decimal");
        }
        if (seen[*idx]) {
            throw Error("DuplicateKey", "ingest", "load_benchmark", where,
                        "duplicate benchmark level for " + d.str());
        }
        seen[*idx] = true;
        levels[*idx] = level;
    }
    for (std::size_t i = 0; i < calendar.size(); ++i) {
        if (!seen[i]) {
            throw Error("MissingBenchmark", "ingest", "load_benchmark", calendar.at(i).str(),
                        "benchmark level missing for a calendar date");
        }
    }
    return levels;
}

namespace {

struct RawPriceRow {
    int line = 0;
    StockId stock;
    std::size_t calendar_index = 0;
    DailyPriceRecord record;
};

} // namespace

const DailyPriceRecord* PriceDataset::find(const StockId& stock,
                                           std::size_t calendar_index) const {
    const auto it = records.find(stock);
    if (it == records.end()) return nullptr;
    const auto first = first_index.at(stock);
    if (calendar_index < first || calendar_index - first >= it->second.size()) return nullptr;
    return &it->second[calendar_index - first];
}

std::vector<StockId> PriceDataset::stocks_sorted() const {
    std::vector<StockId> out;
    out.reserve(records.size());
    for (const auto& [stock, recs] : records) out.push_back(stock);
    std::sort(out.begin(), out.end());
    return out;
}

PriceLoadResult load_prices(const std::string& path, const TradingCalendar& calendar,
                            std::vector<double> benchmark, const LoadOptions& options) {
    const CsvTable table = read_csv(path);
    const auto need = [&](const char* name) {
        const auto col = table.column(name);
        if (!col) {
            throw Error("MissingColumn", "ingest", "load_prices", path,
                        std::string("missing column ") + name);
        }
        return *col;
    };
    const auto stock_col = need("stock_id");
    const auto date_col = need("date");
    const auto close_col = need("close");
    const auto tradable_col = need("tradable");
    const auto vwap_col = table.column("vwap_0930_0935");
    std::vector<std::optional<std::size_t>> wp_cols(5);
    std::vector<std::optional<std::size_t>> wv_cols(5);
    for (int i = 0; i < 5; ++i) {
        wp_cols[i] = table.column("w" + std::to_string(i + 1) + "_price");
        wv_cols[i] = table.column("w" + std::to_string(i + 1) + "_volume");
    }

    PriceLoadResult result;
    result.rows_in = table.rows.size();

    std::vector<RawPriceRow> rows;
    rows.reserve(table.rows.size());
    std::unordered_map<StockId, std::unordered_map<std::size_t, int>, StockIdHash> seen;

    for (const CsvRow& row : table.rows) {
        const std::string where = "line " + std::to_string(row.line);
        try {
            RawPriceRow raw;
            raw.line = row.line;
            raw.stock = parse_stock_id(row.fields[stock_col]);
            Date d;
            if (!Date::try_parse(row.fields[date_col], &d)) {
                throw Error("MalformedDate", "ingest", "load_prices", where, "bad date");
            }
            const auto idx = calendar.index_of(d);
            if (!idx) {
                throw Error("DateOffCalendar", "ingest", "load_prices", where,
                            d.str() + " is not a trading date");
            }
            raw.calendar_index = *idx;
            raw.record.stock = raw.stock;
            raw.record.date = d;

            const std::string& tradable = row.fields[tradable_col];
            if (tradable == "1") {
                raw.record.tradable = true;
            } else if (tradable == "0") {
                raw.record.tradable = false;
            } else {
                throw Error("MalformedFlag", "ingest", "load_prices", where,
                            "tradable must be 0 or 1");
            }

            raw.record.close = Money::parse(row.fields[close_col]);
            if (raw.record.close <= Money()) {
                throw Error("NonPositivePrice", "ingest", "load_prices", where,
                            "close must be positive");
            }

            const bool has_vwap = vwap_col && !row.fields[*vwap_col].empty();
            bool has_window = false;
            for (int i = 0; i < 5; ++i) {
                if (wp_cols[i] && !row.fields[*wp_cols[i]].empty()) has_window = true;
            }
            if (has_vwap == has_window) {
                throw Error("PayloadAmbiguous", "ingest", "load_prices", where,
                            "exactly one of vwap_0930_0935 / window columns must be set");
            }
            if (has_vwap) {
                const Money v = Money::parse(row.fields[*vwap_col]);
                if (v <= Money()) {
                    throw Error("NonPositivePrice", "ingest", "load_prices", where,
                                "vwap must be positive");
                }
                raw.record.vwap = v;
            } else {
                std::int64_t total_volume = 0;
                for (int i = 0; i < 5; ++i) {
                    if (!wp_cols[i] || row.fields[*wp_cols[i]].empty()) continue;
                    WindowTrade t;
                    t.price = Money::parse(row.fields[*wp_cols[i]]);
                    if (t.price <= Money()) {
                        throw Error("NonPositivePrice", "ingest", "load_prices", where,
                                    "window price must be positive");
                    }
                    if (!wv_cols[i] || row.fields[*wv_cols[i]].empty()) {
                        throw Error("MissingField", "ingest", "load_prices", where,
                                    "window price without matching volume");
                    }
                    double vol = 0.0;
                    if (!parse_double_strict(row.fields[*wv_cols[i]], &vol) || vol < 0.0) {
                        throw Error("MalformedVolume", "ingest", "load_prices", where,
                                    "volume must be a non-negative number");
                    }
                    t.volume = static_cast<std::int64_t>(vol);
                    raw.record.window_trades.push_back(t);
                    total_volume += t.volume;
                }
                if (raw.record.tradable && total_volume <= 0) {
                    throw Error("NoLiquidity", "ingest", "load_prices", where,
                                "tradable row needs at least one window trade with volume");
                }
            }

            const auto dup = seen[raw.stock].find(raw.calendar_index);
            if (dup != seen[raw.stock].end()) {
                throw Error("DuplicateKey", "ingest", "load_prices", where,
                            "duplicate (stock, date) key, first at line " +
                                std::to_string(dup->second));
            }
            seen[raw.stock][raw.calendar_index] = row.line;
            rows.push_back(std::move(raw));
        } catch (const Error& e) {
            if (!options.skip_bad_rows) throw;
            result.issues.push_back(RowIssue{row.line, e.code(), e.what()});
        }
    }

    PriceDataset& ds = result.dataset;
    ds.calendar = calendar;
    ds.benchmark = std::move(benchmark);

    // Assemble dense per-stock series from the stock's first row through the
    // end of the calendar; gaps become tradable=false with carried close.
    std::unordered_map<StockId, std::vector<const RawPriceRow*>, StockIdHash> by_stock;
    for (const RawPriceRow& raw : rows) by_stock[raw.stock].push_back(&raw);
    for (auto& [stock, stock_rows] : by_stock) {
        std::sort(stock_rows.begin(), stock_rows.end(),
                  [](const RawPriceRow* a, const RawPriceRow* b) {
                      return a->calendar_index < b->calendar_index;
                  });
        const std::size_t first = stock_rows.front()->calendar_index;
        std::vector<DailyPriceRecord> series;
        series.reserve(calendar.size() - first);
        std::size_t next_row = 0;
        Money last_close = stock_rows.front()->record.close;
        for (std::size_t i = first; i < calendar.size(); ++i) {
            if (next_row < stock_rows.size() && stock_rows[next_row]->calendar_index == i) {
                series.push_back(stock_rows[next_row]->record);
                last_close = series.back().close;
                ++next_row;
            } else {
                DailyPriceRecord gap;
                gap.stock = stock;
                gap.date = calendar.at(i);
                gap.close = last_close;
                gap.tradable = false;
                gap.synthesized = true;
                series.push_back(std::move(gap));
            }
        }
        ds.first_index[stock] = first;
        ds.records[stock] = std::move(series);
    }
    return result;
}

} // namespace sentibt
