#pragma once

#include <string>
#include <vector>

#include "sentibt/engine.hpp"
#include "sentibt/factor.hpp"

namespace sentibt {

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> values; // simple daily returns, finite, > -1

    std::size_t size() const { return values.size(); }
};

struct MetricsConventions {
    int days_per_year = 243;            // Chinese-market trading-day count
    double risk_free_rate_annual = 0.0; // percent per year
    // annual excess: compound the daily active series (default) or take the
    // difference of the two annualized returns.
    bool excess_as_compounded_active = true;
    // max drawdown basis: the net-asset curve (default) or the cumulative
    // excess curve.
    bool drawdown_on_net_asset = true;
};

struct MetricsReport {
    std::string factor_name;
    double annual_excess_return = 0.0;    // %/yr
    double annual_net_asset_return = 0.0; // %/yr
    double win_rate = 0.0;                // %
    double sharpe_ratio = 0.0;
    double max_drawdown = 0.0;            // fraction of peak
    double avg_stocks_held = 0.0;
    double turnover_ratio = 0.0;          // %/day
    // Convention constants echoed so every report is self-describing.
    double risk_free_rate_used = 0.0;     // %/yr
    int trading_days_per_year_used = 243;
};

// r(d) = nav_close(d)/nav_close(d-1) - 1; the first day is based on its own
// nav_open.
ReturnSeries daily_returns(const std::vector<DailyLedger>& ledgers);

ReturnSeries benchmark_returns(const PriceBook& book);

// Geometric annualization: ((prod(1+r))^(days_per_year/n) - 1) * 100.
double annualize(const ReturnSeries& series, int days_per_year);

// Daily arithmetic active return, e(d) = r_port(d) - r_bench(d).
ReturnSeries excess_return_series(const ReturnSeries& port, const ReturnSeries& bench);

// Percent of days with a strictly positive return.
double win_rate(const ReturnSeries& series);

// Annualized (mean(r - rf_daily) / sample stdev(r)) * sqrt(days_per_year).
double sharpe(const ReturnSeries& series, double risk_free_annual_pct, int days_per_year);

// Largest peak-to-trough fractional decline of a positive NAV curve.
double max_drawdown(const std::vector<double>& nav);

double avg_stocks_held(const std::vector<DailyLedger>& ledgers);

// Mean daily 100 * turnover_value / nav_open.
double turnover_ratio(const std::vector<DailyLedger>& ledgers);

// Cumulative compounded value of a daily return series: prod(1+r) - 1 per day.
std::vector<double> cumulative_curve(const ReturnSeries& series);

// Per-group equal-weighted daily excess over the benchmark, compounded.
// memberships[d] holds the k member lists for day d (empty lists = all cash,
// a zero return that day). A stock held on a covered day but missing from
// every group is a coverage error.
std::vector<ReturnSeries> group_excess_curves(
    const std::vector<DailyLedger>& ledgers,
    const std::vector<std::vector<std::vector<StockId>>>& memberships, const PriceBook& book,
    const ReturnSeries& bench);

// Daily group membership lists for the whole run: held stocks are ranked by
// their latest factor value (carried indefinitely for held positions) and
// split into cfg-sized groups; days holding fewer stocks than groups are left
// unassigned (all lists empty).
std::vector<std::vector<std::vector<StockId>>> build_group_memberships(
    const std::vector<DailyLedger>& ledgers, const FactorPanel& panel, int k);

MetricsReport build_metrics_report(const std::string& factor_name,
                                   const std::vector<DailyLedger>& ledgers,
                                   const PriceBook& book, const MetricsConventions& conventions);

} // namespace sentibt
