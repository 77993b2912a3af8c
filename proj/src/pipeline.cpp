#include "sentibt/pipeline.hpp"

#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "sentibt/csv.hpp"
#include "sentibt/parallel.hpp"
#include "sentibt/report.hpp"

namespace sentibt {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config parsing

namespace {

[[noreturn]] void config_fail(const std::string& where, const std::string& why) {
    throw Error("ConfigInvalid", "cli", "parse_config", where, why);
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    config_fail(key, "expected true/false");
}

int parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        config_fail(key, "expected an integer");
    }
}

double parse_double_cfg(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        config_fail(key, "expected a decimal");
    }
}

} // namespace

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) config_fail(where, "expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (cfg.snapshot.count(key)) config_fail(where, "duplicate key " + key);
        cfg.snapshot[key] = value;

        try {
            if (key == "news_path") cfg.news_path = value;
            else if (key == "news_format") {
                if (value == "csv") cfg.news_format = NewsFormat::csv;
                else if (value == "jsonl") cfg.news_format = NewsFormat::jsonl;
                else config_fail(key, "expected csv or jsonl");
            } else if (key == "prices_path") cfg.prices_path = value;
            else if (key == "benchmark_path") cfg.benchmark_path = value;
            else if (key == "calendar_path") cfg.calendar_path = value;
            else if (key == "mode") cfg.mode = value;
            else if (key == "provider_kind") cfg.provider_kind = parse_provider_kind(value);
            else if (key == "score_source") cfg.score_source = value;
            else if (key == "oracle_path") cfg.oracle_path = value;
            else if (key == "factor_panel_in") cfg.factor_panel_in = value;
            else if (key == "factor_name") cfg.factor_name = value;
            else if (key == "signed_transform_before_aggregation")
                cfg.signed_transform_before_aggregation = parse_bool(value, key);
            else if (key == "carry_forward_horizon_days")
                cfg.carry_forward_horizon_days = parse_int(value, key);
            else if (key == "skip_bad_rows") cfg.skip_bad_rows = parse_bool(value, key);
            else if (key == "threads") cfg.threads = parse_int(value, key);
            else if (key == "remote_endpoint") cfg.remote.endpoint = value;
            else if (key == "remote_timeout_seconds")
                cfg.remote.timeout_seconds = parse_double_cfg(value, key);
            else if (key == "remote_max_retries") cfg.remote.max_retries = parse_int(value, key);
            else if (key == "days_per_year") cfg.conventions.days_per_year = parse_int(value, key);
            else if (key == "risk_free_rate_annual")
                cfg.conventions.risk_free_rate_annual = parse_double_cfg(value, key);
            else if (key == "annual_excess_mode") {
                if (value == "compound_active") cfg.conventions.excess_as_compounded_active = true;
                else if (value == "diff_annualized")
                    cfg.conventions.excess_as_compounded_active = false;
                else config_fail(key, "expected compound_active or diff_annualized");
            } else if (key == "drawdown_basis") {
                if (value == "net_asset") cfg.conventions.drawdown_on_net_asset = true;
                else if (value == "excess") cfg.conventions.drawdown_on_net_asset = false;
                else config_fail(key, "expected net_asset or excess");
            }
            // BacktestConfig fields, names mirrored exactly
            else if (key == "max_buys_per_day") cfg.engine.max_buys_per_day = parse_int(value, key);
            else if (key == "max_sells_per_day")
                cfg.engine.max_sells_per_day = parse_int(value, key);
            else if (key == "turnover_cap") cfg.engine.turnover_cap = DecimalRate::parse(value);
            else if (key == "fee_rate") cfg.engine.fee_rate = DecimalRate::parse(value);
            else if (key == "buy_threshold") cfg.engine.buy_threshold = parse_double_cfg(value, key);
            else if (key == "sell_threshold")
                cfg.engine.sell_threshold = parse_double_cfg(value, key);
            else if (key == "initial_cash") cfg.engine.initial_cash = Money::parse(value);
            else if (key == "lot_size") cfg.engine.lot_size = parse_int(value, key);
            else if (key == "group_count") cfg.engine.group_count = parse_int(value, key);
            else config_fail(where, "unknown key " + key);
        } catch (const Error& e) {
            if (e.code() == "ConfigInvalid") throw;
            config_fail(where, std::string(e.what()));
        }
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw Error("ConfigInvalid", "cli", "parse_config", path, "cannot open config file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path);
}

void RunConfig::validate() const {
    engine.validate();
    if (mode != "full" && mode != "score" && mode != "backtest") {
        config_fail("mode", "expected full, score, or backtest");
    }
    if (score_source != "inline" && score_source != "oracle" && score_source != "remote") {
        config_fail("score_source", "expected inline, oracle, or remote");
    }
    if (calendar_path.empty()) config_fail("calendar_path", "required");
    const bool needs_news = mode != "backtest";
    if (needs_news && news_path.empty()) config_fail("news_path", "required in this mode");
    if (mode != "score") {
        if (prices_path.empty()) config_fail("prices_path", "required in this mode");
        if (benchmark_path.empty()) config_fail("benchmark_path", "required in this mode");
    }
    if (mode == "backtest" && factor_panel_in.empty()) {
        config_fail("factor_panel_in", "required in backtest mode");
    }
    if (score_source == "oracle" && needs_news && oracle_path.empty()) {
        config_fail("oracle_path", "required when score_source = oracle");
    }
    if (score_source == "remote" && needs_news && remote.endpoint.empty()) {
        config_fail("remote_endpoint", "required when score_source = remote");
    }
    if (carry_forward_horizon_days < 0) config_fail("carry_forward_horizon_days", "must be >= 0");
    if (conventions.days_per_year <= 0) config_fail("days_per_year", "must be positive");
    if (threads < 0) config_fail("threads", "must be >= 0");
}

// ---------------------------------------------------------------------------
// Hashing

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw Error("FileNotFound", "cli", "sha256", path, "cannot open file");
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Remote transport (only constructed when explicitly configured)

namespace {

class HttpPostTransport final : public RemoteTransport {
public:
    explicit HttpPostTransport(RemoteClientConfig config) : config_(std::move(config)) {}

    std::string request(const std::string& payload) override {
        // endpoint = scheme://host:port/path
        const auto scheme_end = config_.endpoint.find("://");
        if (scheme_end == std::string::npos) {
            throw std::runtime_error("endpoint must carry a scheme: " + config_.endpoint);
        }
        const auto path_start = config_.endpoint.find('/', scheme_end + 3);
        const std::string base = path_start == std::string::npos
                                     ? config_.endpoint
                                     : config_.endpoint.substr(0, path_start);
        const std::string path =
            path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
        httplib::Client client(base);
        const auto seconds = static_cast<time_t>(config_.timeout_seconds);
        const auto micros = static_cast<time_t>(
            (config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
        client.set_connection_timeout(seconds, micros);
        client.set_read_timeout(seconds, micros);
        const httplib::Result res = client.Post(path, payload, "text/plain");
        if (!res) {
            throw std::runtime_error("transport error: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw std::runtime_error("endpoint returned status " + std::to_string(res->status));
        }
        return res->body;
    }

private:
    RemoteClientConfig config_;
};

} // namespace

// ---------------------------------------------------------------------------
// The run itself

RunArtifacts run_pipeline(const std::string& config_path, const std::string& out_dir) {
    const auto started = std::chrono::steady_clock::now();

    RunConfig cfg = RunConfig::parse_file(config_path);
    cfg.validate();
    configure_threads(cfg.threads);

    fs::create_directories(out_dir);

    // Input digests are taken before anything is parsed.
    std::vector<std::pair<std::string, std::string>> input_digests;
    const auto add_input = [&](const std::string& path) {
        if (!path.empty()) input_digests.emplace_back(path, sha256_file(path));
    };
    add_input(config_path);
    add_input(cfg.calendar_path);
    add_input(cfg.news_path);
    add_input(cfg.prices_path);
    add_input(cfg.benchmark_path);
    add_input(cfg.oracle_path);
    add_input(cfg.factor_panel_in);

    RunArtifacts artifacts;
    artifacts.out_dir = out_dir;
    const auto out_path = [&](const std::string& name) {
        artifacts.output_files.push_back(name);
        return (fs::path(out_dir) / name).string();
    };

    const TradingCalendar calendar = load_calendar(cfg.calendar_path);
    const LoadOptions load_options{cfg.skip_bad_rows};

    // Factor panel: scored from news or imported, then carried forward.
    FactorPanel panel;
    if (cfg.mode == "backtest") {
        panel = import_factor_panel(cfg.factor_panel_in, calendar);
    } else {
        const NewsLoadResult news = load_news(cfg.news_path, cfg.news_format, load_options);
        const NewsDataset pre_open = filter_pre_open(news.dataset);

        std::unique_ptr<SentimentProvider> provider;
        if (cfg.score_source == "inline") {
            provider = std::make_unique<InlineScoreProvider>(cfg.provider_kind);
        } else if (cfg.score_source == "oracle") {
            provider = std::make_unique<FileOracleProvider>(cfg.oracle_path, cfg.provider_kind);
        } else {
            provider = std::make_unique<RemoteScoreClient>(
                std::make_shared<HttpPostTransport>(cfg.remote), cfg.remote, cfg.provider_kind);
        }
        const std::vector<SentimentScore> scores = score_news(pre_open, *provider);
        panel = aggregate_daily(pre_open.records, scores, calendar,
                                AggregateOptions{cfg.signed_transform_before_aggregation});

        // Source distribution of everything that loaded, pre-filter.
        if (!news.dataset.records.empty()) {
            const auto report = news_source_report(news.dataset);
            std::ofstream src(out_path("source_report.csv"));
            src << "source,percentage\n";
            char buf[32];
            for (const auto& [source, pct] : report) {
                std::snprintf(buf, sizeof(buf), "%.2f", pct);
                src << csv_escape(source) << ',' << buf << '\n';
            }
        }
        if (!news.issues.empty()) {
            std::ofstream issues(out_path("load_issues.csv"));
            issues << "line,code,message\n";
            for (const RowIssue& issue : news.issues) {
                issues << issue.line << ',' << issue.code << ',' << csv_escape(issue.message)
                       << '\n';
            }
        }
    }
    panel = carry_forward(panel, cfg.carry_forward_horizon_days);
    export_factor_panel(panel, out_path("factor_panel.csv"));

    if (cfg.mode != "score") {
        const std::vector<double> benchmark = load_benchmark(cfg.benchmark_path, calendar);
        const PriceLoadResult prices =
            load_prices(cfg.prices_path, calendar, benchmark, load_options);
        const PriceBook book = PriceBook::build(prices.dataset);

        const BacktestResult result = run_backtest(panel, book, cfg.engine);

        export_ledgers(result.ledgers, out_path("ledger.csv"));
        export_nav_series(result.ledgers, book, out_path("nav_series.csv"));

        const MetricsReport report =
            build_metrics_report(cfg.factor_name, result.ledgers, book, cfg.conventions);
        write_main_metrics_csv(report, out_path("report_main.csv"));
        write_supplementary_metrics_csv(report, out_path("report_supplementary.csv"));
        write_report_json(report, cfg.conventions, out_path("report.json"));

        const ReturnSeries port = daily_returns(result.ledgers);
        const ReturnSeries bench = benchmark_returns(book);
        const ReturnSeries excess = excess_return_series(port, bench);
        write_series_csv(out_path("series_net.csv"), port.dates,
                         {{"cumulative_net_return", cumulative_curve(port)}});
        write_series_csv(out_path("series_excess.csv"), excess.dates,
                         {{"cumulative_excess_return", cumulative_curve(excess)}});

        const auto memberships =
            build_group_memberships(result.ledgers, panel, cfg.engine.group_count);
        const auto curves = group_excess_curves(result.ledgers, memberships, book, bench);
        std::vector<std::pair<std::string, std::vector<double>>> group_columns;
        for (std::size_t g = 0; g < curves.size(); ++g) {
            group_columns.emplace_back("group_" + std::to_string(g + 1) + "_cumulative_excess",
                                       cumulative_curve(curves[g]));
        }
        write_series_csv(out_path("series_groups.csv"), bench.dates, group_columns);
    }

    // Manifest last so it can list every other artifact with its digest.
    nlohmann::ordered_json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["config"] = cfg.snapshot;
    auto inputs = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : input_digests) {
        inputs.push_back({{"path", path}, {"sha256", digest}});
    }
    manifest["inputs"] = inputs;
    auto outputs = nlohmann::ordered_json::array();
    for (const std::string& name : artifacts.output_files) {
        outputs.push_back(
            {{"path", name}, {"sha256", sha256_file((fs::path(out_dir) / name).string())}});
    }
    manifest["outputs"] = outputs;
    manifest["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    {
        std::ofstream out(out_path("manifest.json"));
        out << manifest.dump(2) << '\n';
    }
    return artifacts;
}

} // namespace sentibt
