#include "sentibt/factor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "sentibt/csv.hpp"

namespace sentibt {

const double* FactorPanel::find(std::size_t date_index, const StockId& stock) const {
    const auto& entries = by_date[date_index];
    const auto it = std::lower_bound(entries.begin(), entries.end(), stock,
                                     [](const auto& e, const StockId& s) { return e.first < s; });
    if (it == entries.end() || it->first != stock) return nullptr;
    return &it->second;
}

FactorPanel aggregate_daily(const std::vector<NewsRecord>& records,
                            const std::vector<SentimentScore>& scores,
                            const TradingCalendar& calendar, const AggregateOptions& options,
                            ExecMode mode) {
    if (records.size() != scores.size()) {
        throw Error("LengthMismatch", "factor", "aggregate_daily", "",
                    "records and scores must align one-to-one");
    }
    FactorPanel panel;
    panel.calendar = calendar;
    panel.by_date.resize(calendar.size());
    if (records.empty()) return panel;

    panel.provider = scores.front().provider;
    panel.scale = options.signed_transform_first ? ScoreScale::signed_unit : scores.front().scale;

    // Group values per (date, stock) in input order; the per-group sum is then
    // a fixed-order fold no matter which thread computes it.
    std::map<std::pair<std::size_t, StockId>, std::vector<double>> grouped;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const NewsRecord& rec = records[i];
        const SentimentScore& s = scores[i];
        if (s.provider != panel.provider) {
            throw Error("MixedProviders", "factor", "aggregate_daily", rec.news_id,
                        "all scores in one aggregation must share a provider kind");
        }
        if (!is_pre_open(rec.timestamp)) {
            throw Error("ProtocolViolation", "factor", "aggregate_daily", rec.news_id,
                        "record is not pre-open filtered");
        }
        const auto idx = calendar.index_of(rec.timestamp.date);
        if (!idx) {
            throw Error("DateOffCalendar", "factor", "aggregate_daily", rec.news_id,
                        rec.timestamp.date.str() + " is not a trading date");
        }
        const double v = options.signed_transform_first ? to_signed(s).value : s.value;
        if (!std::isfinite(v)) {
            throw Error("NonFiniteScore", "factor", "aggregate_daily", rec.news_id,
                        "score value is not finite");
        }
        grouped[{*idx, rec.stock}].push_back(v);
    }

    std::vector<const std::pair<const std::pair<std::size_t, StockId>, std::vector<double>>*> keys;
    keys.reserve(grouped.size());
    for (const auto& kv : grouped) keys.push_back(&kv);
    std::vector<double> means(keys.size());

    const auto mean_of = [](const std::vector<double>& vs) {
        double sum = 0.0;
        for (double v : vs) sum += v;
        return sum / static_cast<double>(vs.size());
    };
    if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(keys.size()); ++i) {
            means[i] = mean_of(keys[i]->second);
        }
    } else {
        for (std::size_t i = 0; i < keys.size(); ++i) means[i] = mean_of(keys[i]->second);
    }

    // std::map iteration is (date, stock) ascending, so per-date entries land
    // already sorted by StockId.
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& [date_idx, stock] = keys[i]->first;
        panel.by_date[date_idx].emplace_back(stock, means[i]);
    }
    return panel;
}

DailyRanking rank_daily(const FactorPanel& panel, const Date& date) {
    const auto idx = panel.calendar.index_of(date);
    if (!idx) {
        throw Error("DateOffCalendar", "factor", "rank_daily", date.str(),
                    "date is not on the trading calendar");
    }
    DailyRanking ranking;
    ranking.date = date;
    ranking.scale = panel.scale;
    ranking.entries = panel.by_date[*idx];
    // Entries start sorted ascending by StockId; a stable sort by value alone
    // leaves ties in that id order.
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return ranking;
}

std::vector<DailyRanking> build_rankings(const FactorPanel& panel, ExecMode mode) {
    const std::size_t n = panel.calendar.size();
    std::vector<DailyRanking> rankings(n);
    if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            rankings[i] = rank_daily(panel, panel.calendar.at(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            rankings[i] = rank_daily(panel, panel.calendar.at(i));
        }
    }
    return rankings;
}

GroupAssignment assign_groups_by_value(const std::vector<std::pair<StockId, double>>& held_values,
                                       const Date& date, int k) {
    if (k < 2) {
        throw Error("InvalidGroupCount", "factor", "assign_groups", date.str(),
                    "group count must be at least 2");
    }
    if (static_cast<std::size_t>(k) > held_values.size()) {
        throw Error("TooFewStocks", "factor", "assign_groups", date.str(),
                    "cannot split " + std::to_string(held_values.size()) + " stocks into " +
                        std::to_string(k) + " groups");
    }
    std::vector<std::pair<StockId, double>> sorted = held_values;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });

    GroupAssignment assignment;
    assignment.date = date;
    assignment.k = k;
    const std::size_t n = sorted.size();
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t rem = n % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (int g = 1; g <= k; ++g) {
        const std::size_t size = base + (static_cast<std::size_t>(g) <= rem ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i, ++pos) {
            assignment.groups.emplace_back(sorted[pos].first, g);
        }
    }
    std::sort(assignment.groups.begin(), assignment.groups.end());
    return assignment;
}

GroupAssignment assign_groups(const std::vector<StockId>& held, const DailyRanking& ranking,
                              int k) {
    std::unordered_map<StockId, double, StockIdHash> values;
    for (const auto& [stock, value] : ranking.entries) values[stock] = value;
    std::vector<std::pair<StockId, double>> held_values;
    held_values.reserve(held.size());
    for (const StockId& stock : held) {
        const auto it = values.find(stock);
        if (it == values.end()) {
            throw Error("MissingFactor", "factor", "assign_groups", ranking.date.str(),
                        "held stock " + stock.str() + " has no factor value in the ranking");
        }
        held_values.emplace_back(stock, it->second);
    }
    return assign_groups_by_value(held_values, ranking.date, k);
}

std::vector<std::vector<StockId>> group_members(const GroupAssignment& assignment) {
    std::vector<std::vector<StockId>> members(static_cast<std::size_t>(assignment.k));
    for (const auto& [stock, group] : assignment.groups) {
        members[static_cast<std::size_t>(group - 1)].push_back(stock);
    }
    return members;
}

FactorPanel carry_forward(const FactorPanel& panel, int horizon_days) {
    if (horizon_days < 0) {
        throw Error("InvalidHorizon", "factor", "carry_forward", std::to_string(horizon_days),
                    "horizon must be non-negative");
    }
    if (horizon_days == 0) return panel;

    FactorPanel out = panel;
    struct LastSeen {
        double value = 0.0;
        std::size_t date_index = 0;
    };
    std::unordered_map<StockId, LastSeen, StockIdHash> last;
    for (std::size_t i = 0; i < panel.calendar.size(); ++i) {
        for (const auto& [stock, value] : panel.by_date[i]) {
            last[stock] = LastSeen{value, i};
        }
        if (i + 1 >= panel.calendar.size()) break;
        // Fill tomorrow's gaps from genuine values seen within the horizon;
        // fills do not chain, so a value rides at most horizon_days forward.
        auto& next = out.by_date[i + 1];
        for (const auto& [stock, seen] : last) {
            if (i + 1 - seen.date_index > static_cast<std::size_t>(horizon_days)) continue;
            if (panel.find(i + 1, stock) != nullptr) continue;
            next.emplace_back(stock, seen.value);
        }
        std::sort(next.begin(), next.end());
    }
    return out;
}

void export_factor_panel(const FactorPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "factor", "export_factor_panel", path,
                    "cannot open file for writing");
    }
    out << "stock_id,date,factor_value,provider_kind\n";
    for (std::size_t i = 0; i < panel.calendar.size(); ++i) {
        for (const auto& [stock, value] : panel.by_date[i]) {
            out << stock.str() << ',' << panel.calendar.at(i).str() << ','
                << format_double(value) << ',' << provider_kind_token(panel.provider) << '\n';
        }
    }
}

FactorPanel import_factor_panel(const std::string& path, const TradingCalendar& calendar) {
    const CsvTable table = read_csv(path);
    const auto stock_col = table.column("stock_id");
    const auto date_col = table.column("date");
    const auto value_col = table.column("factor_value");
    const auto kind_col = table.column("provider_kind");
    if (!stock_col || !date_col || !value_col || !kind_col) {
        throw Error("MissingColumn", "factor", "import_factor_panel", path,
                    "expected columns stock_id, date, factor_value, provider_kind");
    }
    FactorPanel panel;
    panel.calendar = calendar;
    panel.by_date.resize(calendar.size());
    bool first = true;
    for (const CsvRow& row : table.rows) {
        const std::string where = "line " + std::to_string(row.line);
        const ProviderKind kind = parse_provider_kind(row.fields[*kind_col]);
        if (first) {
            panel.provider = kind;
            panel.scale = kind == ProviderKind::continuous_positive_prob ? ScoreScale::unit
                                                                         : ScoreScale::signed_unit;
            first = false;
        } else if (kind != panel.provider) {
            throw Error("MixedProviders", "factor", "import_factor_panel", where,
                        "panel rows must share one provider kind");
        }
        const StockId stock = parse_stock_id(row.fields[*stock_col]);
        Date d;
        if (!Date::try_parse(row.fields[*date_col], &d)) {
            throw Error("MalformedDate", "factor", "import_factor_panel", where, "bad date");
        }
        const auto idx = calendar.index_of(d);
        if (!idx) {
            throw Error("DateOffCalendar", "factor", "import_factor_panel", where,
                        d.str() + " is not a trading date");
        }
        double value = 0.0;
        try {
            value = std::stod(row.fields[*value_col]);
        } catch (const std::exception&) {
            throw Error("MalformedScore", "factor", "import_factor_panel", where,
                        "factor_value is not a decimal");
        }
        if (!std::isfinite(value)) {
            throw Error("NonFiniteScore", "factor", "import_factor_panel", where,
                        "factor_value must be finite");
        }
        panel.by_date[*idx].emplace_back(stock, value);
    }
    for (auto& entries : panel.by_date) {
        std::sort(entries.begin(), entries.end());
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].first == entries[i - 1].first) {
                throw Error("DuplicateKey", "factor", "import_factor_panel",
                            entries[i].first.str(), "duplicate (stock, date) factor value");
            }
        }
    }
    return panel;
}

} // namespace sentibt
