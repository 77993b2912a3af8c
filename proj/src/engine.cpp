#include "sentibt/engine.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "sentibt/csv.hpp"

namespace sentibt {

void BacktestConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw Error("ConfigInvalid", "engine", "validate_config", field, why);
    };
    if (max_buys_per_day < 0) fail("max_buys_per_day", "must be >= 0");
    if (max_sells_per_day < 0) fail("max_sells_per_day", "must be >= 0");
    if (fee_rate.num <= 0 || fee_rate.num >= fee_rate.den) fail("fee_rate", "must lie in (0, 1)");
    if (turnover_cap.num <= 0 || turnover_cap.num > turnover_cap.den) {
        fail("turnover_cap", "must lie in (0, 1]");
    }
    if (buy_threshold < sell_threshold) {
        fail("buy_threshold", "must be >= sell_threshold");
    }
    if (initial_cash <= Money()) fail("initial_cash", "must be positive");
    if (lot_size < 1) fail("lot_size", "must be >= 1");
    if (group_count < 2) fail("group_count", "must be >= 2");
}

// ---------------------------------------------------------------------------
// VWAP and the price book

Money compute_vwap(std::span<const WindowTrade> window_trades) {
    __int128 value = 0; // price raw * shares
    std::int64_t volume = 0;
    for (const WindowTrade& t : window_trades) {
        value += static_cast<__int128>(t.price.raw()) * t.volume;
        volume += t.volume;
    }
    if (volume <= 0) {
        throw Error("NoLiquidity", "engine", "compute_vwap", "",
                    "window has zero traded volume");
    }
    return Money::from_raw(round_half_even(value, volume));
}

PriceBook PriceBook::build(const PriceDataset& ds, ExecMode mode) {
    PriceBook book;
    book.calendar_ = ds.calendar;
    book.benchmark_ = ds.benchmark;

    const std::vector<StockId> stocks = ds.stocks_sorted();
    std::vector<Series> built(stocks.size());

    const auto build_one = [&](std::size_t si) {
        const StockId& stock = stocks[si];
        const auto& records = ds.records.at(stock);
        Series series;
        series.first_index = ds.first_index.at(stock);
        series.days.resize(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            const DailyPriceRecord& rec = records[i];
            DayView view;
            view.known = true;
            view.close = rec.close;
            if (rec.vwap) {
                view.fill = rec.vwap;
            } else if (!rec.window_trades.empty()) {
                std::int64_t volume = 0;
                for (const WindowTrade& t : rec.window_trades) volume += t.volume;
                if (volume > 0) view.fill = compute_vwap(rec.window_trades);
                // zero volume: no fill, and therefore not tradable today
            }
            view.tradable = rec.tradable && view.fill.has_value();
            series.days[i] = view;
        }
        built[si] = std::move(series);
    };

    if (mode == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(stocks.size()); ++i) {
            build_one(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < stocks.size(); ++i) build_one(i);
    }

    for (std::size_t i = 0; i < stocks.size(); ++i) {
        book.series_[stocks[i]] = std::move(built[i]);
    }
    return book;
}

PriceBook::DayView PriceBook::view(const StockId& stock, std::size_t date_index) const {
    const auto it = series_.find(stock);
    if (it == series_.end()) return DayView{};
    const Series& s = it->second;
    if (date_index < s.first_index || date_index - s.first_index >= s.days.size()) {
        return DayView{};
    }
    return s.days[date_index - s.first_index];
}

double PriceBook::benchmark_return(std::size_t date_index) const {
    if (date_index == 0) return 0.0;
    return benchmark_[date_index] / benchmark_[date_index - 1] - 1.0;
}

// ---------------------------------------------------------------------------
// Portfolio valuation

Money PortfolioState::market_value(const PriceBook& book, std::size_t date_index,
                                   bool at_close) const {
    Money total = cash;
    for (const auto& [stock, shares] : holdings) {
        const PriceBook::DayView view = book.view(stock, date_index);
        if (!view.known) {
            throw Error("MissingPrice", "engine", "valuation", stock.str(),
                        "held stock has no price data on " +
                            book.calendar().at(date_index).str());
        }
        const Money price = at_close ? view.close : view.fill.value_or(view.close);
        total += Money::shares_times_price(shares, price);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Trade selection and sizing

TradePlan select_trades(const PortfolioState& state, const DailyRanking& ranking,
                        const PriceBook& book, std::size_t date_index,
                        const BacktestConfig& cfg) {
    TradePlan plan;
    const auto tradable_today = [&](const StockId& stock) {
        return book.view(stock, date_index).tradable;
    };

    // Worst-ranked first for sells.
    for (auto it = ranking.entries.rbegin(); it != ranking.entries.rend(); ++it) {
        if (static_cast<int>(plan.sells.size()) >= cfg.max_sells_per_day) break;
        const auto& [stock, value] = *it;
        if (signed_value(value, ranking.scale) > cfg.sell_threshold) break; // sorted: rest are higher
        if (!state.holdings.count(stock)) continue;
        if (!tradable_today(stock)) continue;
        plan.sells.push_back(stock);
    }

    // Best-ranked first for buys.
    for (const auto& [stock, value] : ranking.entries) {
        if (static_cast<int>(plan.buys.size()) >= cfg.max_buys_per_day) break;
        if (signed_value(value, ranking.scale) <= cfg.buy_threshold) break; // rest rank lower
        if (state.holdings.count(stock)) continue;
        if (!tradable_today(stock)) continue;
        plan.buys.push_back(stock);
    }
    return plan;
}

namespace {

Money fee_for(Money gross, const BacktestConfig& cfg) {
    return gross.mul_ratio(cfg.fee_rate.num, cfg.fee_rate.den);
}

// Largest lot multiple whose gross plus fee fits the budget.
std::int64_t max_affordable_shares(Money budget, Money price, const BacktestConfig& cfg) {
    if (budget <= Money() || price <= Money()) return 0;
    // First guess ignores fee rounding: shares <= budget / (price * (1 + fee)).
    const __int128 denom = static_cast<__int128>(price.raw()) *
                           (cfg.fee_rate.den + cfg.fee_rate.num);
    __int128 guess = static_cast<__int128>(budget.raw()) * cfg.fee_rate.den / denom;
    std::int64_t lots = static_cast<std::int64_t>(guess / cfg.lot_size);
    const auto total_cost = [&](std::int64_t shares) {
        const Money gross = Money::shares_times_price(shares, price);
        return gross + fee_for(gross, cfg);
    };
    // Half-even fee rounding can move the boundary by one lot either way.
    while (total_cost((lots + 1) * cfg.lot_size) <= budget) ++lots;
    while (lots > 0 && total_cost(lots * cfg.lot_size) > budget) --lots;
    return lots * cfg.lot_size;
}

bool turnover_within_cap(Money turnover_value, Money nav_open, const BacktestConfig& cfg) {
    // turnover <= cap * nav, compared exactly.
    const __int128 lhs = static_cast<__int128>(turnover_value.raw()) * cfg.turnover_cap.den;
    const __int128 rhs = static_cast<__int128>(nav_open.raw()) * cfg.turnover_cap.num;
    return lhs <= rhs;
}

} // namespace

std::vector<Trade> size_orders(const TradePlan& plan, const PortfolioState& state,
                               const PriceBook& book, std::size_t date_index,
                               const BacktestConfig& cfg, DailyLedger* diagnostics) {
    const Date date = book.calendar().at(date_index);
    std::vector<Trade> trades;
    Money sell_gross_total;
    Money cash = state.cash;

    for (const StockId& stock : plan.sells) {
        const PriceBook::DayView view = book.view(stock, date_index);
        Trade t;
        t.date = date;
        t.stock = stock;
        t.side = TradeSide::sell;
        t.shares = state.holdings.at(stock);
        t.fill_price = *view.fill;
        t.gross_value = Money::shares_times_price(t.shares, t.fill_price);
        t.fee = fee_for(t.gross_value, cfg);
        sell_gross_total += t.gross_value;
        cash += t.gross_value - t.fee;
        trades.push_back(t);
    }

    std::vector<Trade> buys;
    if (!plan.buys.empty()) {
        const Money per_buy = cash.split_floor(static_cast<std::int64_t>(plan.buys.size()));
        for (const StockId& stock : plan.buys) {
            const PriceBook::DayView view = book.view(stock, date_index);
            const std::int64_t shares = max_affordable_shares(per_buy, *view.fill, cfg);
            if (shares <= 0) {
                if (diagnostics) ++diagnostics->buys_dropped_by_budget;
                continue;
            }
            Trade t;
            t.date = date;
            t.stock = stock;
            t.side = TradeSide::buy;
            t.shares = shares;
            t.fill_price = *view.fill;
            t.gross_value = Money::shares_times_price(shares, t.fill_price);
            t.fee = fee_for(t.gross_value, cfg);
            buys.push_back(t);
        }
    }

    // Turnover cap: drop buys from the tail until (buy + sell) / 2 fits.
    const Money nav_open = state.market_value(book, date_index, /*at_close=*/false);
    Money buy_gross_total;
    for (const Trade& t : buys) buy_gross_total += t.gross_value;
    while (!buys.empty() &&
           !turnover_within_cap((buy_gross_total + sell_gross_total).mul_ratio(1, 2), nav_open,
                                cfg)) {
        buy_gross_total -= buys.back().gross_value;
        buys.pop_back();
        if (diagnostics) ++diagnostics->buys_dropped_by_turnover_cap;
    }

    trades.insert(trades.end(), buys.begin(), buys.end());
    return trades;
}

// ---------------------------------------------------------------------------
// Day step and the full fold

StepResult step_day(const PortfolioState& state, const DailyRanking& ranking,
                    const PriceBook& book, std::size_t date_index, const BacktestConfig& cfg) {
    const Date date = book.calendar().at(date_index);
    if (!(ranking.date == date)) {
        throw Error("ProtocolViolation", "engine", "step_day", date.str(),
                    "ranking is dated " + ranking.date.str() +
                        " but the simulator is stepping " + date.str());
    }
    if (state.date && !(*state.date < date)) {
        throw Error("ProtocolViolation", "engine", "step_day", date.str(),
                    "state already advanced to " + state.date->str());
    }

    StepResult result;
    result.ledger.date = date;

    const Money nav_open = state.market_value(book, date_index, /*at_close=*/false);
    result.ledger.nav_open = nav_open;

    const TradePlan plan = select_trades(state, ranking, book, date_index, cfg);
    result.ledger.trades = size_orders(plan, state, book, date_index, cfg, &result.ledger);

    PortfolioState next = state;
    next.date = date;
    Money buy_gross;
    Money sell_gross;
    for (const Trade& t : result.ledger.trades) {
        result.ledger.fees_total += t.fee;
        if (t.side == TradeSide::sell) {
            next.cash += t.gross_value - t.fee;
            next.holdings.erase(t.stock);
            sell_gross += t.gross_value;
        } else {
            next.cash -= t.gross_value + t.fee;
            next.holdings[t.stock] += t.shares;
            buy_gross += t.gross_value;
        }
    }
    if (next.cash.is_negative()) {
        throw Error("CashFloorViolation", "engine", "step_day", date.str(),
                    "committed trades drove cash below zero");
    }

    result.ledger.turnover_value = (buy_gross + sell_gross).mul_ratio(1, 2);
    result.ledger.nav_close = next.market_value(book, date_index, /*at_close=*/true);
    result.ledger.benchmark_return = book.benchmark_return(date_index);
    result.ledger.eod_holdings.assign(next.holdings.begin(), next.holdings.end());
    result.state = std::move(next);
    return result;
}

BacktestResult run_backtest(const FactorPanel& panel, const PriceBook& book,
                            const BacktestConfig& cfg, ExecMode mode) {
    cfg.validate();
    if (panel.calendar.dates() != book.calendar().dates()) {
        throw Error("AlignmentError", "engine", "run_backtest", "",
                    "factor panel and prices must share the trading calendar");
    }
    const std::vector<DailyRanking> rankings = build_rankings(panel, mode);

    BacktestResult result;
    result.final_state.cash = cfg.initial_cash;
    result.ledgers.reserve(book.calendar().size());
    for (std::size_t i = 0; i < book.calendar().size(); ++i) {
        try {
            StepResult step = step_day(result.final_state, rankings[i], book, i, cfg);
            result.final_state = std::move(step.state);
            result.ledgers.push_back(std::move(step.ledger));
        } catch (const Error& e) {
            if (e.location().empty()) {
                throw Error(e.code(), e.module_name(), e.op(), book.calendar().at(i).str(),
                            e.what());
            }
            throw;
        }
    }
    return result;
}

BacktestResult run_backtest(const FactorPanel& panel, const PriceDataset& prices,
                            const BacktestConfig& cfg, ExecMode mode) {
    return run_backtest(panel, PriceBook::build(prices, mode), cfg, mode);
}

// ---------------------------------------------------------------------------
// Exports

void export_ledgers(const std::vector<DailyLedger>& ledgers, const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "engine", "export_ledgers", path,
                    "cannot open file for writing");
    }
    out << "date,stock_id,side,shares,fill_price,gross_value,fee\n";
    for (const DailyLedger& ledger : ledgers) {
        for (const Trade& t : ledger.trades) {
            out << t.date.str() << ',' << t.stock.str() << ','
                << (t.side == TradeSide::buy ? "buy" : "sell") << ',' << t.shares << ','
                << t.fill_price.str() << ',' << t.gross_value.str() << ',' << t.fee.str()
                << '\n';
        }
    }
}

void export_nav_series(const std::vector<DailyLedger>& ledgers, const PriceBook& book,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "engine", "export_nav_series", path,
                    "cannot open file for writing");
    }
    out << "date,nav_open,nav_close,benchmark_level\n";
    for (std::size_t i = 0; i < ledgers.size(); ++i) {
        out << ledgers[i].date.str() << ',' << ledgers[i].nav_open.str() << ','
            << ledgers[i].nav_close.str() << ',' << format_double(book.benchmark_level(i))
            << '\n';
    }
}

} // namespace sentibt
