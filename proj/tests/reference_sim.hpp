#pragma once

// Brute-force reference simulator, written independently of the engine so the
// two can cross-check each other trade-for-trade. It works on raw scaled
// integers (10^-4 units), searches feasible order sizes linearly instead of
// solving for them, and never touches the engine's Money/PriceBook helpers.

#include <cstdint>
#include <string>
#include <vector>

#include "sentibt/engine.hpp"
#include "sentibt/factor.hpp"
#include "sentibt/ingest.hpp"

namespace refsim {

struct RefTrade {
    std::string date;
    std::string stock;
    bool is_buy = false;
    std::int64_t shares = 0;
    std::int64_t fill_raw = 0;  // price, 1e-4 units
    std::int64_t gross_raw = 0; // value, 1e-4 units
    std::int64_t fee_raw = 0;   // value, 1e-4 units
};

struct RefDay {
    std::string date;
    std::vector<RefTrade> trades;
    std::int64_t nav_open_raw = 0;
    std::int64_t nav_close_raw = 0;
    std::int64_t turnover_raw = 0;
    std::int64_t cash_raw = 0;
    std::size_t holdings_count = 0;
};

std::vector<RefDay> run_reference(const sentibt::FactorPanel& panel,
                                  const sentibt::PriceDataset& prices,
                                  const sentibt::BacktestConfig& cfg);

// The engine's ledgers flattened into the same shape for comparison.
std::vector<RefDay> flatten_engine(const std::vector<sentibt::DailyLedger>& ledgers,
                                   const sentibt::PortfolioState& final_state);

// Empty string when equal; otherwise a description of the first difference.
std::string diff(const std::vector<RefDay>& expected, const std::vector<RefDay>& actual);

} // namespace refsim
