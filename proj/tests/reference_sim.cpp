#include "reference_sim.hpp"

#include <algorithm>
#include <map>

namespace refsim {

using sentibt::BacktestConfig;
using sentibt::DailyPriceRecord;
using sentibt::FactorPanel;
using sentibt::PriceDataset;

namespace {

// round(n/d) half-to-even, spelled out case by case.
std::int64_t rref_round(__int128 n, std::int64_t d) {
    bool neg = false;
    if (n < 0) {
        neg = true;
        n = -n;
    }
    __int128 q = n / d;
    const __int128 rem = n - q * d;
    if (rem * 2 > d) {
        q += 1;
    } else if (rem * 2 == d) {
        if (q % 2 == 1) q += 1; // round to the even quotient
    }
    return static_cast<std::int64_t>(neg ? -q : q);
}

struct DayPrice {
    bool exists = false;
    bool can_trade = false;
    std::int64_t fill_raw = 0;
    std::int64_t close_raw = 0;
};

DayPrice day_price(const PriceDataset& prices, const sentibt::StockId& stock,
                   std::size_t date_index) {
    DayPrice out;
    const DailyPriceRecord* rec = prices.find(stock, date_index);
    if (rec == nullptr) return out;
    out.exists = true;
    out.close_raw = rec->close.raw();
    bool has_fill = false;
    if (rec->vwap) {
        out.fill_raw = rec->vwap->raw();
        has_fill = true;
    } else if (!rec->window_trades.empty()) {
        __int128 value = 0;
        std::int64_t volume = 0;
        for (const auto& t : rec->window_trades) {
            value += static_cast<__int128>(t.price.raw()) * t.volume;
            volume += t.volume;
        }
        if (volume > 0) {
            out.fill_raw = rref_round(value, volume);
            has_fill = true;
        }
    }
    out.can_trade = rec->tradable && has_fill;
    return out;
}

} // namespace

std::vector<RefDay> run_reference(const FactorPanel& panel, const PriceDataset& prices,
                                  const BacktestConfig& cfg) {
    const auto& calendar = prices.calendar;
    std::vector<RefDay> days;
    days.reserve(calendar.size());

    std::int64_t cash = cfg.initial_cash.raw();
    std::map<std::string, std::int64_t> holdings; // canonical id -> shares
    std::map<std::string, sentibt::StockId> ids;

    const std::int64_t fee_num = cfg.fee_rate.num;
    const std::int64_t fee_den = cfg.fee_rate.den;

    for (std::size_t di = 0; di < calendar.size(); ++di) {
        RefDay day;
        day.date = calendar.at(di).str();

        // Today's factor list: descending value, ties by ascending canonical
        // id text (which coincides with (exchange, code) order).
        struct Entry {
            std::string id;
            double value;
            double signed_value;
            DayPrice price;
        };
        std::vector<Entry> entries;
        for (const auto& [stock, value] : panel.by_date[di]) {
            Entry e;
            e.id = stock.str();
            e.value = value;
            e.signed_value =
                panel.scale == sentibt::ScoreScale::unit ? 2.0 * value - 1.0 : value;
            e.price = day_price(prices, stock, di);
            ids.emplace(e.id, stock);
            entries.push_back(std::move(e));
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            if (a.value != b.value) return a.value > b.value;
            return a.id < b.id;
        });

        // nav at the open: cash plus holdings valued at fill when one exists,
        // else at the (carried) close.
        std::int64_t nav_open = cash;
        for (const auto& [id, shares] : holdings) {
            const DayPrice p = day_price(prices, ids.at(id), di);
            const std::int64_t mark = p.fill_raw > 0 ? p.fill_raw : p.close_raw;
            nav_open += static_cast<std::int64_t>(static_cast<__int128>(shares) * mark);
        }
        day.nav_open_raw = nav_open;

        // Sell candidates, worst first.
        std::vector<const Entry*> sells;
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
            if (it->signed_value > cfg.sell_threshold) continue;
            if (!holdings.count(it->id)) continue;
            if (!it->price.can_trade) continue;
            if (static_cast<int>(sells.size()) >= cfg.max_sells_per_day) break;
            sells.push_back(&*it);
        }
        // Buy candidates, best first.
        std::vector<const Entry*> buys;
        for (const Entry& e : entries) {
            if (e.signed_value <= cfg.buy_threshold) continue;
            if (holdings.count(e.id)) continue;
            if (!e.price.can_trade) continue;
            if (static_cast<int>(buys.size()) >= cfg.max_buys_per_day) break;
            buys.push_back(&e);
        }

        std::int64_t sell_gross_total = 0;
        std::int64_t cash_after_sells = cash;
        std::vector<RefTrade> sell_trades;
        for (const Entry* e : sells) {
            RefTrade t;
            t.date = day.date;
            t.stock = e->id;
            t.is_buy = false;
            t.shares = holdings.at(e->id);
            t.fill_raw = e->price.fill_raw;
            t.gross_raw =
                static_cast<std::int64_t>(static_cast<__int128>(t.shares) * t.fill_raw);
            t.fee_raw = rref_round(static_cast<__int128>(t.gross_raw) * fee_num, fee_den);
            sell_gross_total += t.gross_raw;
            cash_after_sells += t.gross_raw - t.fee_raw;
            sell_trades.push_back(t);
        }

        std::vector<RefTrade> buy_trades;
        if (!buys.empty()) {
            const std::int64_t per = cash_after_sells / static_cast<std::int64_t>(buys.size());
            for (const Entry* e : buys) {
                // Brute force: step lot by lot while the next lot still fits.
                std::int64_t shares = 0;
                while (true) {
                    const std::int64_t next = shares + cfg.lot_size;
                    const std::int64_t gross = static_cast<std::int64_t>(
                        static_cast<__int128>(next) * e->price.fill_raw);
                    const std::int64_t fee =
                        rref_round(static_cast<__int128>(gross) * fee_num, fee_den);
                    if (gross + fee > per) break;
                    shares = next;
                }
                if (shares == 0) continue;
                RefTrade t;
                t.date = day.date;
                t.stock = e->id;
                t.is_buy = true;
                t.shares = shares;
                t.fill_raw = e->price.fill_raw;
                t.gross_raw =
                    static_cast<std::int64_t>(static_cast<__int128>(shares) * t.fill_raw);
                t.fee_raw = rref_round(static_cast<__int128>(t.gross_raw) * fee_num, fee_den);
                buy_trades.push_back(t);
            }
        }

        // Turnover cap: strip buys from the back until the day fits.
        std::int64_t buy_gross_total = 0;
        for (const RefTrade& t : buy_trades) buy_gross_total += t.gross_raw;
        while (!buy_trades.empty()) {
            const std::int64_t turnover =
                rref_round(static_cast<__int128>(buy_gross_total + sell_gross_total), 2);
            if (static_cast<__int128>(turnover) * cfg.turnover_cap.den <=
                static_cast<__int128>(nav_open) * cfg.turnover_cap.num) {
                break;
            }
            buy_gross_total -= buy_trades.back().gross_raw;
            buy_trades.pop_back();
        }

        // Commit.
        for (const RefTrade& t : sell_trades) {
            cash += t.gross_raw - t.fee_raw;
            holdings.erase(t.stock);
        }
        for (const RefTrade& t : buy_trades) {
            cash -= t.gross_raw + t.fee_raw;
            holdings[t.stock] += t.shares;
        }

        day.trades = sell_trades;
        day.trades.insert(day.trades.end(), buy_trades.begin(), buy_trades.end());
        day.turnover_raw =
            rref_round(static_cast<__int128>(buy_gross_total + sell_gross_total), 2);
        std::int64_t nav_close = cash;
        for (const auto& [id, shares] : holdings) {
            const DayPrice p = day_price(prices, ids.at(id), di);
            nav_close += static_cast<std::int64_t>(static_cast<__int128>(shares) * p.close_raw);
        }
        day.nav_close_raw = nav_close;
        day.cash_raw = cash;
        day.holdings_count = holdings.size();
        days.push_back(std::move(day));
    }
    return days;
}

std::vector<RefDay> flatten_engine(const std::vector<sentibt::DailyLedger>& ledgers,
                                   const sentibt::PortfolioState& final_state) {
    (void)final_state;
    std::vector<RefDay> days;
    days.reserve(ledgers.size());
    for (const auto& ledger : ledgers) {
        RefDay day;
        day.date = ledger.date.str();
        day.nav_open_raw = ledger.nav_open.raw();
        day.nav_close_raw = ledger.nav_close.raw();
        day.turnover_raw = ledger.turnover_value.raw();
        day.holdings_count = ledger.eod_holdings.size();
        for (const auto& t : ledger.trades) {
            RefTrade rt;
            rt.date = t.date.str();
            rt.stock = t.stock.str();
            rt.is_buy = t.side == sentibt::TradeSide::buy;
            rt.shares = t.shares;
            rt.fill_raw = t.fill_price.raw();
            rt.gross_raw = t.gross_value.raw();
            rt.fee_raw = t.fee.raw();
            day.trades.push_back(std::move(rt));
        }
        days.push_back(std::move(day));
    }
    return days;
}

std::string diff(const std::vector<RefDay>& expected, const std::vector<RefDay>& actual) {
    if (expected.size() != actual.size()) {
        return "day count " + std::to_string(actual.size()) + " != expected " +
               std::to_string(expected.size());
    }
    for (std::size_t d = 0; d < expected.size(); ++d) {
        const RefDay& e = expected[d];
        const RefDay& a = actual[d];
        const std::string where = "day " + e.date + ": ";
        if (e.date != a.date) return where + "date mismatch " + a.date;
        if (e.trades.size() != a.trades.size()) {
            return where + "trade count " + std::to_string(a.trades.size()) + " != " +
                   std::to_string(e.trades.size());
        }
        for (std::size_t i = 0; i < e.trades.size(); ++i) {
            const RefTrade& et = e.trades[i];
            const RefTrade& at = a.trades[i];
            if (et.stock != at.stock || et.is_buy != at.is_buy || et.shares != at.shares ||
                et.fill_raw != at.fill_raw || et.gross_raw != at.gross_raw ||
                et.fee_raw != at.fee_raw) {
                return where + "trade " + std::to_string(i) + " mismatch (" + at.stock + " vs " +
                       et.stock + ")";
            }
        }
        if (e.nav_open_raw != a.nav_open_raw) return where + "nav_open mismatch";
        if (e.nav_close_raw != a.nav_close_raw) return where + "nav_close mismatch";
        if (e.turnover_raw != a.turnover_raw) return where + "turnover mismatch";
        if (e.holdings_count != a.holdings_count) return where + "holdings count mismatch";
    }
    return "";
}

} // namespace refsim
