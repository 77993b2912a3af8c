#include "sentibt/fixture.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sentibt/core.hpp"
#include "sentibt/csv.hpp"

namespace sentibt {

std::uint64_t FixtureRng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double FixtureRng::u01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int FixtureRng::uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

const char* kSources[] = {"wire_a", "wire_b", "portal_c", "daily_d", "agency_e"};

std::string money_text(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "cli", "gen_fixture", path,
                    "cannot open file for writing");
    }
    return out;
}

// Weekday stepping from a Monday anchor gives a plausible trading calendar.
std::vector<Date> make_calendar(int days) {
    std::vector<Date> out;
    out.reserve(days);
    std::int64_t ord = Date{2022, 1, 3}.ordinal(); // a Monday
    while (static_cast<int>(out.size()) < days) {
        const std::int64_t weekday = ((ord % 7) + 7) % 7; // 1970-01-01 was a Thursday
        // ordinal 0 -> Thursday; Saturday = 2, Sunday = 3 in this encoding
        if (weekday != 2 && weekday != 3) out.push_back(Date::from_ordinal(ord));
        ++ord;
    }
    return out;
}

std::string discrete_score_text(double sentiment, FixtureRng& rng) {
    const double wobble = 0.05 * (rng.u01() - 0.5);
    if (sentiment + wobble > 0.6) return "1";
    if (sentiment + wobble < 0.4) return "-1";
    return "0";
}

std::string discrete_label_text(const std::string& score, ProviderKind kind) {
    if (kind == ProviderKind::discrete_classifier) {
        if (score == "1") return "positive";
        if (score == "-1") return "negative";
        return "neutral";
    }
    if (score == "1") return "good";
    if (score == "-1") return "bad";
    return "not sure";
}

} // namespace

FixturePaths gen_fixture(const FixtureSpec& spec, const std::string& out_dir) {
    if (spec.stocks < 1 || spec.days < 1) {
        throw Error("ConfigInvalid", "cli", "gen_fixture", "",
                    "stocks and days must both be at least 1");
    }
    if (spec.plant_corr < -1.0 || spec.plant_corr > 1.0) {
        throw Error("ConfigInvalid", "cli", "gen_fixture", "plant_corr",
                    "correlation must lie in [-1, 1]");
    }
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    FixturePaths paths;
    paths.news = (fs::path(out_dir) / "news.csv").string();
    paths.prices = (fs::path(out_dir) / "prices.csv").string();
    paths.benchmark = (fs::path(out_dir) / "benchmark.csv").string();
    paths.calendar = (fs::path(out_dir) / "calendar.csv").string();
    if (spec.text_mode) paths.oracle = (fs::path(out_dir) / "oracle.csv").string();

    FixtureRng rng(spec.seed);
    const std::vector<Date> calendar = make_calendar(spec.days);

    std::vector<StockId> stocks;
    stocks.reserve(spec.stocks);
    for (int s = 0; s < spec.stocks; ++s) {
        char code[16];
        if (s % 2 == 0) {
            std::snprintf(code, sizeof(code), "6%05d", s + 1);
            stocks.push_back(StockId{Exchange::sse, code});
        } else {
            std::snprintf(code, sizeof(code), "0%05d", s + 1);
            stocks.push_back(StockId{Exchange::szse, code});
        }
    }

    {
        auto out = open_out(paths.calendar);
        for (const Date& d : calendar) out << d.str() << '\n';
    }

    {
        auto out = open_out(paths.benchmark);
        out << "date,index_level\n";
        double level = 3000.0;
        for (const Date& d : calendar) {
            out << d.str() << ',' << money_text(level) << '\n';
            level *= 1.0 + 0.01 * (2.0 * rng.u01() - 1.0);
        }
    }

    const double rho = spec.plant_corr;
    const double noise_mix = std::sqrt(1.0 - rho * rho);

    // Per stock-day: a latent sentiment in [0,1] drives both the planted news
    // scores and (scaled by rho) that day's close-to-close return.
    std::vector<std::vector<double>> sentiment(
        stocks.size(), std::vector<double>(calendar.size(), 0.5));
    std::vector<std::vector<double>> closes(stocks.size(),
                                            std::vector<double>(calendar.size(), 0.0));
    for (std::size_t s = 0; s < stocks.size(); ++s) {
        double close = 10.0 + 90.0 * rng.u01();
        for (std::size_t d = 0; d < calendar.size(); ++d) {
            const double t = rng.u01();
            sentiment[s][d] = t;
            const double z_signal = (2.0 * t - 1.0) * kSqrt3;
            const double z_noise = (2.0 * rng.u01() - 1.0) * kSqrt3;
            const double ret = spec.daily_vol * (rho * z_signal + noise_mix * z_noise);
            close *= 1.0 + ret;
            closes[s][d] = close;
        }
    }

    {
        auto out = open_out(paths.prices);
        out << "stock_id,date,vwap_0930_0935,w1_price,w1_volume,w2_price,w2_volume,"
               "w3_price,w3_volume,w4_price,w4_volume,w5_price,w5_volume,close,tradable\n";
        for (std::size_t d = 0; d < calendar.size(); ++d) {
            for (std::size_t s = 0; s < stocks.size(); ++s) {
                const double missing_roll = rng.u01();
                const double halted_roll = rng.u01();
                const double window_roll = rng.u01();
                const double open_ref = d == 0 ? closes[s][0] : closes[s][d - 1];
                const double vwap = open_ref * (1.0 + 0.003 * (2.0 * rng.u01() - 1.0));
                // Consume window randomness unconditionally so row layout
                // choices never shift the stream for later rows.
                double w_prices[5];
                std::int64_t w_volumes[5];
                for (int w = 0; w < 5; ++w) {
                    w_prices[w] = vwap * (1.0 + 0.002 * (2.0 * rng.u01() - 1.0));
                    w_volumes[w] = 1000 + static_cast<std::int64_t>(rng.u01() * 9000.0);
                }
                if (d > 0 && missing_roll < spec.missing_row_prob) continue;
                const bool halted = d > 0 && halted_roll < spec.halted_row_prob;
                const bool window_row = window_roll < spec.window_row_prob;
                out << stocks[s].str() << ',' << calendar[d].str() << ',';
                if (window_row) {
                    out << ','; // empty vwap column
                    for (int w = 0; w < 5; ++w) {
                        out << money_text(w_prices[w]) << ',' << w_volumes[w] << ',';
                    }
                } else {
                    out << money_text(vwap) << ',';
                    out << ",,,,,,,,,,"; // ten empty window columns
                }
                out << money_text(closes[s][d]) << ',' << (halted ? '0' : '1') << '\n';
            }
        }
    }

    {
        auto news = open_out(paths.news);
        news << "news_id,stock_id,timestamp,source,text,score,provider\n";
        std::ofstream oracle;
        if (spec.text_mode) {
            oracle = open_out(paths.oracle);
            oracle << "news_id,label_or_score,provider_kind\n";
        }
        const char* provider_token = provider_kind_token(spec.provider);
        long seq = 0;
        for (std::size_t d = 0; d < calendar.size(); ++d) {
            for (std::size_t s = 0; s < stocks.size(); ++s) {
                if (rng.u01() < spec.no_news_prob) continue;
                const int items = rng.uniform_int(1, spec.max_items_per_day);
                for (int item = 0; item < items; ++item) {
                    const bool post_open = rng.u01() < spec.post_open_fraction;
                    const int minute = post_open ? rng.uniform_int(9 * 60 + 30, 15 * 60)
                                                 : rng.uniform_int(6 * 60, 9 * 60 + 29);
                    const double base = post_open ? rng.u01() : sentiment[s][d];
                    char news_id[24];
                    std::snprintf(news_id, sizeof(news_id), "n%07ld", seq++);
                    char ts[40];
                    std::snprintf(ts, sizeof(ts), "%sT%02d:%02d:00+08:00",
                                  calendar[d].str().c_str(), minute / 60, minute % 60);
                    std::string score;
                    if (spec.provider == ProviderKind::continuous_positive_prob) {
                        double v = base + 0.1 * (rng.u01() - 0.5);
                        v = std::min(1.0, std::max(0.0, v));
                        score = format_double(v);
                    } else {
                        score = discrete_score_text(base, rng);
                    }
                    const char* source = kSources[rng.next() % 5];
                    news << news_id << ',' << stocks[s].str() << ',' << ts << ',' << source
                         << ',';
                    if (spec.text_mode) {
                        news << "synthetic summary " << news_id << ",,";
                    } else {
                        news << ',' << score << ',';
                    }
                    news << provider_token << '\n';
                    if (spec.text_mode) {
                        std::string value = score;
                        if (spec.provider != ProviderKind::continuous_positive_prob) {
                            value = discrete_label_text(score, spec.provider);
                        }
                        oracle << news_id << ',' << csv_escape(value) << ',' << provider_token
                               << '\n';
                    }
                }
            }
        }
    }

    return paths;
}

} // namespace sentibt
