#include "sentibt/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sentibt/csv.hpp"

namespace sentibt {

const std::vector<std::string> kMainMetricColumns = {
    "Factor Name",   "Annual Excess Return (%)", "Annual Net Asset Return (%)",
    "Win Rate(%)",   "Sharpe Ratio",             "Max Withdrawal Rate",
};

const std::vector<std::string> kSupplementaryMetricColumns = {
    "Factor Name",
    "Average Stocks Held per Day",
    "Turn-over Ratio (%)",
};

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void write_csv_table(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "cli", "write_report", path,
                    "cannot open file for writing");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << csv_escape(header[i]);
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_escape(row[i]);
        }
        out << '\n';
    }
}

} // namespace

std::vector<std::string> main_metric_cells(const MetricsReport& report) {
    return {
        report.factor_name,
        fixed(report.annual_excess_return, 2),
        fixed(report.annual_net_asset_return, 2),
        fixed(report.win_rate, 2),
        fixed(report.sharpe_ratio, 4),
        fixed(report.max_drawdown, 4),
    };
}

std::vector<std::string> supplementary_metric_cells(const MetricsReport& report) {
    return {
        report.factor_name,
        fixed(report.avg_stocks_held, 2),
        fixed(report.turnover_ratio, 2),
    };
}

void write_main_metrics_csv(const MetricsReport& report, const std::string& path) {
    write_csv_table(path, kMainMetricColumns, {main_metric_cells(report)});
}

void write_supplementary_metrics_csv(const MetricsReport& report, const std::string& path) {
    write_csv_table(path, kSupplementaryMetricColumns, {supplementary_metric_cells(report)});
}

void write_report_json(const MetricsReport& report, const MetricsConventions& conventions,
                       const std::string& path) {
    nlohmann::ordered_json j;
    j["factor_name"] = report.factor_name;
    j["annual_excess_return_pct"] = report.annual_excess_return;
    j["annual_net_asset_return_pct"] = report.annual_net_asset_return;
    j["win_rate_pct"] = report.win_rate;
    j["sharpe_ratio"] = report.sharpe_ratio;
    j["max_withdrawal_rate"] = report.max_drawdown;
    j["avg_stocks_held_per_day"] = report.avg_stocks_held;
    j["turnover_ratio_pct"] = report.turnover_ratio;
    j["conventions"] = {
        {"risk_free_rate_annual_pct", report.risk_free_rate_used},
        {"trading_days_per_year", report.trading_days_per_year_used},
        {"annual_excess_mode",
         conventions.excess_as_compounded_active ? "compound_active" : "diff_annualized"},
        {"drawdown_basis", conventions.drawdown_on_net_asset ? "net_asset" : "excess"},
    };
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "cli", "write_report", path,
                    "cannot open file for writing");
    }
    out << j.dump(2) << '\n';
}

void write_series_csv(const std::string& path, const std::vector<Date>& dates,
                      const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
    std::ofstream out(path);
    if (!out.is_open()) {
        throw Error("FileWriteFailed", "cli", "write_series", path,
                    "cannot open file for writing");
    }
    out << "date";
    for (const auto& [name, values] : columns) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t i = 0; i < dates.size(); ++i) {
        out << dates[i].str();
        for (const auto& [name, values] : columns) out << ',' << format_double(values[i]);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// compare

namespace {

struct RunRow {
    std::vector<std::string> main_cells;
    std::vector<std::string> supplementary_cells;
};

RunRow load_run_row(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path main_path = fs::path(dir) / "report_main.csv";
    const fs::path supp_path = fs::path(dir) / "report_supplementary.csv";
    if (!fs::exists(main_path) || !fs::exists(supp_path)) {
        throw Error("MissingReport", "cli", "compare", dir,
                    "run directory has no report files");
    }
    const CsvTable main_table = read_csv(main_path.string());
    const CsvTable supp_table = read_csv(supp_path.string());
    if (main_table.header != kMainMetricColumns || main_table.rows.size() != 1 ||
        supp_table.header != kSupplementaryMetricColumns || supp_table.rows.size() != 1) {
        throw Error("MissingReport", "cli", "compare", dir,
                    "report files do not match the expected table schema");
    }
    return RunRow{main_table.rows[0].fields, supp_table.rows[0].fields};
}

// Column index -> whether larger is better; Max Withdrawal Rate is the one
// main metric where smaller wins. Supplementary columns are descriptive.
std::vector<int> best_row_per_main_column(const std::vector<RunRow>& rows) {
    std::vector<int> best(kMainMetricColumns.size(), -1);
    for (std::size_t col = 1; col < kMainMetricColumns.size(); ++col) {
        const bool smaller_is_better = kMainMetricColumns[col] == "Max Withdrawal Rate";
        double best_value = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double v = std::stod(rows[r].main_cells[col]);
            if (best[col] < 0 || (smaller_is_better ? v < best_value : v > best_value)) {
                best[col] = static_cast<int>(r);
                best_value = v;
            }
        }
    }
    return best;
}

} // namespace

std::string compare_runs(const std::vector<std::string>& run_dirs, const std::string& format) {
    if (run_dirs.size() < 2) {
        throw Error("ConfigInvalid", "cli", "compare", "",
                    "compare needs at least two run directories");
    }
    std::vector<RunRow> rows;
    rows.reserve(run_dirs.size());
    for (const std::string& dir : run_dirs) rows.push_back(load_run_row(dir));

    if (format == "json") {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            nlohmann::ordered_json row;
            row["run_dir"] = run_dirs[r];
            for (std::size_t c = 0; c < kMainMetricColumns.size(); ++c) {
                row[kMainMetricColumns[c]] = rows[r].main_cells[c];
            }
            for (std::size_t c = 1; c < kSupplementaryMetricColumns.size(); ++c) {
                row[kSupplementaryMetricColumns[c]] = rows[r].supplementary_cells[c];
            }
            out.push_back(row);
        }
        return out.dump(2) + "\n";
    }

    // Both csv and text carry main columns then the supplementary ones.
    std::vector<std::string> header = kMainMetricColumns;
    for (std::size_t c = 1; c < kSupplementaryMetricColumns.size(); ++c) {
        header.push_back(kSupplementaryMetricColumns[c]);
    }

    if (format == "csv") {
        std::string out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            out += (i ? "," : "") + csv_escape(header[i]);
        }
        out += '\n';
        for (const RunRow& row : rows) {
            std::vector<std::string> cells = row.main_cells;
            for (std::size_t c = 1; c < row.supplementary_cells.size(); ++c) {
                cells.push_back(row.supplementary_cells[c]);
            }
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out += (i ? "," : "") + csv_escape(cells[i]);
            }
            out += '\n';
        }
        return out;
    }

    // text table with '*' marking the best value per main metric column
    const std::vector<int> best = best_row_per_main_column(rows);
    std::vector<std::vector<std::string>> cells;
    cells.push_back(header);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<std::string> row = rows[r].main_cells;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (best[c] == static_cast<int>(r)) row[c] += " *";
        }
        for (std::size_t c = 1; c < rows[r].supplementary_cells.size(); ++c) {
            row.push_back(rows[r].supplementary_cells[c]);
        }
        cells.push_back(row);
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += "  ";
            out += row[c];
            out.append(widths[c] - row[c].size(), ' ');
        }
        out += '\n';
    }
    return out;
}

} // namespace sentibt
