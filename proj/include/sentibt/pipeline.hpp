#pragma once

#include <map>
#include <string>
#include <vector>

#include "sentibt/engine.hpp"
#include "sentibt/metrics.hpp"

namespace sentibt {

inline constexpr const char* kToolName = "sentibt";
inline constexpr const char* kToolVersion = "0.1.0";

// Flat key = value run configuration. Engine keys mirror BacktestConfig field
// names exactly; unknown keys are rejected.
struct RunConfig {
    // inputs
    std::string news_path;
    NewsFormat news_format = NewsFormat::csv;
    std::string prices_path;
    std::string benchmark_path;
    std::string calendar_path;

    // pipeline
    std::string mode = "full";           // full | score | backtest
    ProviderKind provider_kind = ProviderKind::continuous_positive_prob;
    std::string score_source = "inline"; // inline | oracle | remote
    std::string oracle_path;
    std::string factor_panel_in;         // backtest mode input panel
    std::string factor_name = "factor";
    bool signed_transform_before_aggregation = false;
    int carry_forward_horizon_days = 5;
    bool skip_bad_rows = false;
    int threads = 0; // 0 = library default, 1 = serial

    RemoteClientConfig remote; // used only when score_source = remote

    MetricsConventions conventions;
    BacktestConfig engine;

    // Raw normalized key/value pairs, kept for the manifest snapshot.
    std::map<std::string, std::string> snapshot;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text, const std::string& origin);
    void validate() const;
};

struct RunArtifacts {
    std::string out_dir;
    std::vector<std::string> output_files; // relative to out_dir, manifest last
};

// End-to-end run: load, score, back-test, report, manifest. Throws Error on
// any failure; the CLI turns that into the structured error line.
RunArtifacts run_pipeline(const std::string& config_path, const std::string& out_dir);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

} // namespace sentibt
