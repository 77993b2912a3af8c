#pragma once

#include <utility>
#include <vector>

#include "sentibt/core.hpp"
#include "sentibt/parallel.hpp"
#include "sentibt/sentiment.hpp"

namespace sentibt {

// Per-(stock, trading day) factor values available at that day's open.
// Entries for each date are kept sorted ascending by StockId; that canonical
// order is what makes rankings and exports reproducible.
struct FactorPanel {
    ProviderKind provider = ProviderKind::discrete_three_class;
    ScoreScale scale = ScoreScale::signed_unit;
    TradingCalendar calendar;
    std::vector<std::vector<std::pair<StockId, double>>> by_date; // calendar-indexed

    std::size_t coverage(std::size_t date_index) const { return by_date[date_index].size(); }
    const double* find(std::size_t date_index, const StockId& stock) const;
};

struct DailyRanking {
    Date date;
    ScoreScale scale = ScoreScale::signed_unit; // scale the values live on
    // Descending by factor value, ties broken by ascending StockId.
    std::vector<std::pair<StockId, double>> entries;
};

// Factor value on the signed scale, for threshold comparisons.
inline double signed_value(double value, ScoreScale scale) {
    return scale == ScoreScale::unit ? 2.0 * value - 1.0 : value;
}

struct GroupAssignment {
    Date date;
    int k = 0;
    // Sorted by StockId; group indices are 1..k with 1 = lowest factor.
    std::vector<std::pair<StockId, int>> groups;
};

struct AggregateOptions {
    // When set, unit-scale scores are mapped through v -> 2v - 1 before
    // averaging; otherwise raw values are averaged and the panel keeps the
    // provider's native scale.
    bool signed_transform_first = false;
};

// factor(stock, d) = arithmetic mean of that stock's same-day scores.
// Requires one provider kind across all scores, pre-open timestamps, and
// record dates on the calendar.
FactorPanel aggregate_daily(const std::vector<NewsRecord>& records,
                            const std::vector<SentimentScore>& scores,
                            const TradingCalendar& calendar,
                            const AggregateOptions& options = {},
                            ExecMode mode = default_exec_mode());

DailyRanking rank_daily(const FactorPanel& panel, const Date& date);

// One ranking per calendar date; dates are independent, so this is the
// OpenMP kernel with a serial reference path.
std::vector<DailyRanking> build_rankings(const FactorPanel& panel,
                                         ExecMode mode = default_exec_mode());

// Held stocks sorted ascending by factor, split into k contiguous blocks with
// sizes as equal as possible; the remainder goes to the lowest groups.
GroupAssignment assign_groups(const std::vector<StockId>& held, const DailyRanking& ranking,
                              int k);
GroupAssignment assign_groups_by_value(const std::vector<std::pair<StockId, double>>& held_values,
                                       const Date& date, int k);

// Per-group member lists, index 0 = group 1 (lowest factor).
std::vector<std::vector<StockId>> group_members(const GroupAssignment& assignment);

// Fills (stock, d) gaps with the most recent value within horizon_days
// trading days; beyond the horizon a gap stays absent. horizon 0 = identity.
FactorPanel carry_forward(const FactorPanel& panel, int horizon_days);

// Interchange format between a standalone scoring run and the engine:
// stock_id, date, factor_value, provider_kind. Rows ordered by (date, stock).
void export_factor_panel(const FactorPanel& panel, const std::string& path);
FactorPanel import_factor_panel(const std::string& path, const TradingCalendar& calendar);

} // namespace sentibt
