#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sentibt/core.hpp"
#include "sentibt/factor.hpp"
#include "sentibt/ingest.hpp"
#include "sentibt/parallel.hpp"

namespace sentibt {

struct BacktestConfig {
    int max_buys_per_day = 500;
    int max_sells_per_day = 500;
    DecimalRate turnover_cap{1'000'000'000, 1'000'000'000}; // 1.0, fraction of NAV
    DecimalRate fee_rate{1'500'000, 1'000'000'000};         // 0.0015 of transaction value
    // Thresholds live on the signed scale; unit-scale factors are compared
    // through v -> 2v - 1. Buy candidates are strictly above, sell candidates
    // at or below.
    double buy_threshold = 0.0;
    double sell_threshold = 0.0;
    Money initial_cash = Money::from_units(10'000'000);
    std::int64_t lot_size = 100;
    int group_count = 3;

    void validate() const; // throws Error("ConfigInvalid", ...)
};

struct PortfolioState {
    std::optional<Date> date; // last completed trading day
    Money cash;
    std::map<StockId, std::int64_t> holdings; // shares > 0

    Money market_value(const class PriceBook& book, std::size_t date_index,
                       bool at_close) const;
};

enum class TradeSide { buy, sell };

struct Trade {
    Date date;
    StockId stock;
    TradeSide side = TradeSide::buy;
    std::int64_t shares = 0; // positive multiple of lot_size
    Money fill_price;
    Money gross_value; // shares * fill_price, exact
    Money fee;         // gross * fee_rate, round-half-even at Money scale
};

struct DailyLedger {
    Date date;
    std::vector<Trade> trades; // sells (worst rank first), then buys (best first)
    Money nav_open;
    Money nav_close;
    Money turnover_value; // (buy gross + sell gross) / 2
    Money fees_total;
    double benchmark_return = 0.0;
    std::vector<std::pair<StockId, std::int64_t>> eod_holdings; // sorted by stock
    int buys_dropped_by_turnover_cap = 0;
    int buys_dropped_by_budget = 0;
};

// Sum(price*volume) / Sum(volume), round-half-even at Money scale.
// Zero total volume means there is nothing to fill against.
Money compute_vwap(std::span<const WindowTrade> window_trades);

// Per-(stock, day) view the simulator trades and marks against. Fill prices
// come from the 09:30-09:35 VWAP; a day without one is untradable. Close
// valuations are always present (carried on synthesized gap days).
class PriceBook {
public:
    struct DayView {
        bool known = false;    // stock has price data at this date
        bool tradable = false; // tradable flag and a fill price both present
        std::optional<Money> fill;
        Money close; // valuation price, carried forward on gap days
    };

    static PriceBook build(const PriceDataset& ds, ExecMode mode = default_exec_mode());

    DayView view(const StockId& stock, std::size_t date_index) const;
    const TradingCalendar& calendar() const { return calendar_; }
    double benchmark_level(std::size_t date_index) const { return benchmark_[date_index]; }
    // level(d)/level(d-1) - 1; 0.0 on the first calendar date.
    double benchmark_return(std::size_t date_index) const;

private:
    struct Series {
        std::size_t first_index = 0;
        std::vector<DayView> days;
    };
    TradingCalendar calendar_;
    std::vector<double> benchmark_;
    std::unordered_map<StockId, Series, StockIdHash> series_;
};

struct TradePlan {
    std::vector<StockId> buys;  // best-ranked first
    std::vector<StockId> sells; // worst-ranked first
};

// Sell candidates: held stocks at or below the sell threshold, worst rank
// first, capped at max_sells_per_day. Buy candidates: non-held stocks strictly
// above the buy threshold, best rank first, capped at max_buys_per_day.
// Stocks that cannot trade today are excluded from both lists.
TradePlan select_trades(const PortfolioState& state, const DailyRanking& ranking,
                        const PriceBook& book, std::size_t date_index,
                        const BacktestConfig& cfg);

// Sells liquidate the full position. The buy budget is the cash left after
// sells and their fees, split equally across the buy list, with each order
// floored to the largest lot count whose gross plus fee fits its share.
// The turnover cap is enforced by dropping buys from the tail.
std::vector<Trade> size_orders(const TradePlan& plan, const PortfolioState& state,
                               const PriceBook& book, std::size_t date_index,
                               const BacktestConfig& cfg, DailyLedger* diagnostics);

struct StepResult {
    PortfolioState state;
    DailyLedger ledger;
};

// One rebalance at the open, then a close-of-day valuation. Exactly one
// ledger per trading day, trades or not.
StepResult step_day(const PortfolioState& state, const DailyRanking& ranking,
                    const PriceBook& book, std::size_t date_index, const BacktestConfig& cfg);

struct BacktestResult {
    std::vector<DailyLedger> ledgers;
    PortfolioState final_state;
};

// Folds step_day over every calendar date, in order. Identical inputs give
// byte-identical ledgers.
BacktestResult run_backtest(const FactorPanel& panel, const PriceDataset& prices,
                            const BacktestConfig& cfg, ExecMode mode = default_exec_mode());
BacktestResult run_backtest(const FactorPanel& panel, const PriceBook& book,
                            const BacktestConfig& cfg, ExecMode mode = default_exec_mode());

// Ledger export: date, stock_id, side, shares, fill_price, gross_value, fee.
void export_ledgers(const std::vector<DailyLedger>& ledgers, const std::string& path);
// NAV series export: date, nav_open, nav_close, benchmark_level.
void export_nav_series(const std::vector<DailyLedger>& ledgers, const PriceBook& book,
                       const std::string& path);

} // namespace sentibt
