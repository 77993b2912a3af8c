#pragma once

#include <cstdint>
#include <string>

#include "sentibt/sentiment.hpp"

namespace sentibt {

// Synthetic desk-scale dataset: news, prices, benchmark, and calendar files
// that exercise every loader path. Identical specs produce byte-identical
// files. plant_corr sets the correlation between a stock-day's pre-open
// sentiment and that day's close-over-previous-close return; post-open news
// items carry pure noise.
struct FixtureSpec {
    std::uint64_t seed = 42;
    int stocks = 5;
    int days = 10;
    double plant_corr = 0.0; // in [-1, 1]
    ProviderKind provider = ProviderKind::continuous_positive_prob;
    bool text_mode = false;  // emit text payloads plus an oracle file
    int max_items_per_day = 3;
    double no_news_prob = 0.2;
    double post_open_fraction = 0.1;
    double missing_row_prob = 0.02;  // suspension via a dropped price row
    double halted_row_prob = 0.02;   // suspension via an explicit tradable=0 row
    double window_row_prob = 0.3;    // per-minute window data instead of a vwap
    double daily_vol = 0.02;
};

struct FixturePaths {
    std::string news;
    std::string prices;
    std::string benchmark;
    std::string calendar;
    std::string oracle; // empty unless text_mode
};

FixturePaths gen_fixture(const FixtureSpec& spec, const std::string& out_dir);

// splitmix64; kept deliberately library-free so fixture bytes never depend on
// a standard library's distribution implementation.
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double u01(); // [0, 1)
    int uniform_int(int lo, int hi); // inclusive

private:
    std::uint64_t state_;
};

} // namespace sentibt
