#pragma once

#include <string>
#include <vector>

#include "sentibt/metrics.hpp"

namespace sentibt {

// Main-metrics table columns, in order.
extern const std::vector<std::string> kMainMetricColumns;
// Supplementary-metrics table columns, in order.
extern const std::vector<std::string> kSupplementaryMetricColumns;

// Rendered cell values: percents at two decimals ("58.38"), Sharpe and max
// withdrawal rate at four.
std::vector<std::string> main_metric_cells(const MetricsReport& report);
std::vector<std::string> supplementary_metric_cells(const MetricsReport& report);

void write_main_metrics_csv(const MetricsReport& report, const std::string& path);
void write_supplementary_metrics_csv(const MetricsReport& report, const std::string& path);
void write_report_json(const MetricsReport& report, const MetricsConventions& conventions,
                       const std::string& path);

// Plot-ready series: date plus one value column per series.
void write_series_csv(const std::string& path, const std::vector<Date>& dates,
                      const std::vector<std::pair<std::string, std::vector<double>>>& columns);

// One row per completed run directory. Missing report files name the
// directory. `format` is "text" (best value per column marked with '*'),
// "csv", or "json".
std::string compare_runs(const std::vector<std::string>& run_dirs, const std::string& format);

} // namespace sentibt
