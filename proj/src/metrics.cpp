#include "sentibt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace sentibt {

ReturnSeries daily_returns(const std::vector<DailyLedger>& ledgers) {
    if (ledgers.empty()) {
        throw Error("EmptyDataset", "metrics", "daily_returns", "", "no ledgers");
    }
    ReturnSeries series;
    series.dates.reserve(ledgers.size());
    series.values.reserve(ledgers.size());
    double prev = ledgers.front().nav_open.to_double();
    if (!(prev > 0.0)) {
        throw Error("InvalidNav", "metrics", "daily_returns", ledgers.front().date.str(),
                    "nav must be positive");
    }
    for (const DailyLedger& ledger : ledgers) {
        const double close = ledger.nav_close.to_double();
        if (!(close > 0.0)) {
            throw Error("InvalidNav", "metrics", "daily_returns", ledger.date.str(),
                        "nav must be positive");
        }
        series.dates.push_back(ledger.date);
        series.values.push_back(close / prev - 1.0);
        prev = close;
    }
    return series;
}

ReturnSeries benchmark_returns(const PriceBook& book) {
    ReturnSeries series;
    const std::size_t n = book.calendar().size();
    series.dates.reserve(n);
    series.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        series.dates.push_back(book.calendar().at(i));
        series.values.push_back(book.benchmark_return(i));
    }
    return series;
}

double annualize(const ReturnSeries& series, int days_per_year) {
    if (series.values.empty()) {
        throw Error("EmptyDataset", "metrics", "annualize", "", "empty return series");
    }
    if (days_per_year <= 0) {
        throw Error("ConfigInvalid", "metrics", "annualize", "days_per_year",
                    "must be positive");
    }
    double compounded = 1.0;
    for (double r : series.values) compounded *= 1.0 + r;
    const double exponent = static_cast<double>(days_per_year) /
                            static_cast<double>(series.values.size());
    return (std::pow(compounded, exponent) - 1.0) * 100.0;
}

ReturnSeries excess_return_series(const ReturnSeries& port, const ReturnSeries& bench) {
    if (port.dates != bench.dates) {
        throw Error("AlignmentError", "metrics", "excess_return_series", "",
                    "portfolio and benchmark series must share dates");
    }
    ReturnSeries out;
    out.dates = port.dates;
    out.values.resize(port.values.size());
    for (std::size_t i = 0; i < port.values.size(); ++i) {
        out.values[i] = port.values[i] - bench.values[i];
    }
    return out;
}

double win_rate(const ReturnSeries& series) {
    if (series.values.empty()) {
        throw Error("EmptyDataset", "metrics", "win_rate", "", "empty return series");
    }
    std::size_t wins = 0;
    for (double r : series.values) {
        if (r > 0.0) ++wins;
    }
    return 100.0 * static_cast<double>(wins) / static_cast<double>(series.values.size());
}

double sharpe(const ReturnSeries& series, double risk_free_annual_pct, int days_per_year) {
    const std::size_t n = series.values.size();
    if (n < 2) {
        throw Error("DegenerateVariance", "metrics", "sharpe", "",
                    "need at least two returns");
    }
    const double rf_daily =
        std::pow(1.0 + risk_free_annual_pct / 100.0, 1.0 / days_per_year) - 1.0;
    double mean = 0.0;
    for (double r : series.values) mean += r;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double r : series.values) {
        const double d = r - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    const double stdev = std::sqrt(var);
    if (!(stdev > 0.0)) {
        throw Error("DegenerateVariance", "metrics", "sharpe", "",
                    "zero return variance leaves the ratio undefined");
    }
    return (mean - rf_daily) / stdev * std::sqrt(static_cast<double>(days_per_year));
}

double max_drawdown(const std::vector<double>& nav) {
    if (nav.empty()) {
        throw Error("EmptyDataset", "metrics", "max_drawdown", "", "empty NAV series");
    }
    double peak = nav.front();
    double worst = 0.0;
    for (double v : nav) {
        if (!(v > 0.0)) {
            throw Error("InvalidNav", "metrics", "max_drawdown", "", "nav must be positive");
        }
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst;
}

double avg_stocks_held(const std::vector<DailyLedger>& ledgers) {
    if (ledgers.empty()) {
        throw Error("EmptyDataset", "metrics", "avg_stocks_held", "", "no ledgers");
    }
    double total = 0.0;
    for (const DailyLedger& ledger : ledgers) {
        total += static_cast<double>(ledger.eod_holdings.size());
    }
    return total / static_cast<double>(ledgers.size());
}

double turnover_ratio(const std::vector<DailyLedger>& ledgers) {
    if (ledgers.empty()) {
        throw Error("EmptyDataset", "metrics", "turnover_ratio", "", "no ledgers");
    }
    double total = 0.0;
    for (const DailyLedger& ledger : ledgers) {
        const double nav = ledger.nav_open.to_double();
        if (!(nav > 0.0)) {
            throw Error("InvalidNav", "metrics", "turnover_ratio", ledger.date.str(),
                        "nav_open must be positive");
        }
        total += 100.0 * ledger.turnover_value.to_double() / nav;
    }
    return total / static_cast<double>(ledgers.size());
}

std::vector<double> cumulative_curve(const ReturnSeries& series) {
    std::vector<double> curve(series.values.size());
    double acc = 1.0;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        acc *= 1.0 + series.values[i];
        curve[i] = acc - 1.0;
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Group analysis

std::vector<std::vector<std::vector<StockId>>> build_group_memberships(
    const std::vector<DailyLedger>& ledgers, const FactorPanel& panel, int k) {
    std::vector<std::vector<std::vector<StockId>>> memberships(ledgers.size());
    // A held stock keeps its last known factor value for grouping purposes,
    // with no horizon: positions can outlive fresh news arbitrarily long.
    std::unordered_map<StockId, double, StockIdHash> last_value;
    for (std::size_t d = 0; d < ledgers.size(); ++d) {
        const auto idx = panel.calendar.index_of(ledgers[d].date);
        if (idx) {
            for (const auto& [stock, value] : panel.by_date[*idx]) last_value[stock] = value;
        }
        auto& day_groups = memberships[d];
        day_groups.assign(static_cast<std::size_t>(k), {});
        if (ledgers[d].eod_holdings.size() < static_cast<std::size_t>(k)) continue;
        std::vector<std::pair<StockId, double>> held_values;
        held_values.reserve(ledgers[d].eod_holdings.size());
        for (const auto& [stock, shares] : ledgers[d].eod_holdings) {
            const auto it = last_value.find(stock);
            if (it == last_value.end()) {
                throw Error("MissingAssignment", "metrics", "build_group_memberships",
                            stock.str() + "@" + ledgers[d].date.str(),
                            "held stock has no factor value to group by");
            }
            held_values.emplace_back(stock, it->second);
        }
        const GroupAssignment assignment =
            assign_groups_by_value(held_values, ledgers[d].date, k);
        day_groups = group_members(assignment);
    }
    return memberships;
}

std::vector<ReturnSeries> group_excess_curves(
    const std::vector<DailyLedger>& ledgers,
    const std::vector<std::vector<std::vector<StockId>>>& memberships, const PriceBook& book,
    const ReturnSeries& bench) {
    if (memberships.size() != ledgers.size() || bench.values.size() != ledgers.size()) {
        throw Error("AlignmentError", "metrics", "group_excess_curves", "",
                    "ledgers, memberships, and benchmark must align");
    }
    const std::size_t k = memberships.empty() ? 0 : memberships.front().size();
    std::vector<ReturnSeries> curves(k);

    // A stock bought today earns close/fill - 1; a carried position earns
    // close(d)/close(d-1) - 1, matching the simulator's own P&L attribution.
    for (std::size_t d = 0; d < ledgers.size(); ++d) {
        std::unordered_set<StockId, StockIdHash> bought_today;
        for (const Trade& t : ledgers[d].trades) {
            if (t.side == TradeSide::buy) bought_today.insert(t.stock);
        }
        const auto idx = book.calendar().index_of(ledgers[d].date);
        if (!idx) {
            throw Error("AlignmentError", "metrics", "group_excess_curves",
                        ledgers[d].date.str(), "ledger date off the calendar");
        }
        for (std::size_t g = 0; g < k; ++g) {
            const auto& members = memberships[d][g];
            double group_return = 0.0;
            if (!members.empty()) {
                double sum = 0.0;
                for (const StockId& stock : members) {
                    const PriceBook::DayView today = book.view(stock, *idx);
                    if (!today.known) {
                        throw Error("MissingAssignment", "metrics", "group_excess_curves",
                                    stock.str() + "@" + ledgers[d].date.str(),
                                    "group member has no price data");
                    }
                    double basis;
                    if (bought_today.count(stock) && today.fill) {
                        basis = today.fill->to_double();
                    } else if (*idx > 0) {
                        const PriceBook::DayView prev = book.view(stock, *idx - 1);
                        basis = prev.known ? prev.close.to_double() : today.close.to_double();
                    } else {
                        basis = today.fill ? today.fill->to_double() : today.close.to_double();
                    }
                    sum += today.close.to_double() / basis - 1.0;
                }
                group_return = sum / static_cast<double>(members.size());
            }
            curves[g].dates.push_back(ledgers[d].date);
            curves[g].values.push_back(group_return - bench.values[d]);
        }
    }
    return curves;
}

MetricsReport build_metrics_report(const std::string& factor_name,
                                   const std::vector<DailyLedger>& ledgers,
                                   const PriceBook& book,
                                   const MetricsConventions& conventions) {
    MetricsReport report;
    report.factor_name = factor_name;
    report.risk_free_rate_used = conventions.risk_free_rate_annual;
    report.trading_days_per_year_used = conventions.days_per_year;

    const ReturnSeries port = daily_returns(ledgers);
    const ReturnSeries bench = benchmark_returns(book);
    const ReturnSeries excess = excess_return_series(port, bench);

    report.annual_net_asset_return = annualize(port, conventions.days_per_year);
    report.annual_excess_return =
        conventions.excess_as_compounded_active
            ? annualize(excess, conventions.days_per_year)
            : report.annual_net_asset_return - annualize(bench, conventions.days_per_year);
    report.win_rate = win_rate(port);
    report.sharpe_ratio =
        sharpe(port, conventions.risk_free_rate_annual, conventions.days_per_year);

    if (conventions.drawdown_on_net_asset) {
        std::vector<double> nav;
        nav.reserve(ledgers.size() + 1);
        nav.push_back(ledgers.front().nav_open.to_double());
        for (const DailyLedger& ledger : ledgers) nav.push_back(ledger.nav_close.to_double());
        report.max_drawdown = max_drawdown(nav);
    } else {
        std::vector<double> curve = cumulative_curve(excess);
        for (double& v : curve) v += 1.0;
        curve.insert(curve.begin(), 1.0);
        report.max_drawdown = max_drawdown(curve);
    }

    report.avg_stocks_held = avg_stocks_held(ledgers);
    report.turnover_ratio = turnover_ratio(ledgers);
    return report;
}

} // namespace sentibt
