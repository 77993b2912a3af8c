#include "sentibt/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sentibt/csv.hpp"

namespace sentibt {

const char* provider_kind_token(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::discrete_three_class: return "discrete_three_class";
        case ProviderKind::continuous_positive_prob: return "continuous_positive_prob";
        case ProviderKind::discrete_classifier: return "discrete_classifier";
    }
    return "discrete_three_class";
}

ProviderKind parse_provider_kind(const std::string& token) {
    if (token == "discrete_three_class") return ProviderKind::discrete_three_class;
    if (token == "continuous_positive_prob") return ProviderKind::continuous_positive_prob;
    if (token == "discrete_classifier") return ProviderKind::discrete_classifier;
    throw Error("UnknownProviderKind", "sentiment", "parse_provider_kind", token,
                "expected discrete_three_class, continuous_positive_prob, or discrete_classifier");
}

SentimentScore map_discrete(DiscreteLabel label, ProviderKind kind) {
    double v = 0.0;
    switch (label) {
        case DiscreteLabel::good:
        case DiscreteLabel::positive: v = 1.0; break;
        case DiscreteLabel::not_sure:
        case DiscreteLabel::neutral: v = 0.0; break;
        case DiscreteLabel::bad:
        case DiscreteLabel::negative: v = -1.0; break;
    }
    return SentimentScore{v, ScoreScale::signed_unit, kind};
}

SentimentScore map_discrete(DiscreteLabel label) {
    const bool classifier = label == DiscreteLabel::positive ||
                            label == DiscreteLabel::neutral ||
                            label == DiscreteLabel::negative;
    return map_discrete(label, classifier ? ProviderKind::discrete_classifier
                                          : ProviderKind::discrete_three_class);
}

SentimentScore wrap_continuous(double p_positive) {
    if (!(p_positive >= 0.0 && p_positive <= 1.0)) {
        throw Error("InvalidProbability", "sentiment", "wrap_continuous",
                    format_double(p_positive), "probability must lie in [0, 1]");
    }
    return SentimentScore{p_positive, ScoreScale::unit, ProviderKind::continuous_positive_prob};
}

SentimentScore to_signed(const SentimentScore& s) {
    if (s.scale == ScoreScale::signed_unit) return s;
    return SentimentScore{2.0 * s.value - 1.0, ScoreScale::signed_unit, s.provider};
}

// ---------------------------------------------------------------------------
// Prompt-response parsing

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Substring match with word boundaries on both ends, so "bad" does not fire
// inside "badminton".
bool contains_keyword(const std::string& lower_text, const std::string& keyword) {
    std::size_t pos = 0;
    while ((pos = lower_text.find(keyword, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(lower_text[pos - 1]);
        const std::size_t end = pos + keyword.size();
        const bool right_ok = end >= lower_text.size() || !is_word_char(lower_text[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool matches_any(const std::string& lower_text, const std::vector<std::string>& keywords) {
    for (const std::string& k : keywords) {
        if (contains_keyword(lower_text, to_lower(k))) return true;
    }
    return false;
}

} // namespace

DiscreteLabel parse_prompt_response(const std::string& raw, const KeywordConfig& keywords,
                                    ParseDiagnostics* diagnostics) {
    const std::string lower = to_lower(raw);
    const bool not_sure = matches_any(lower, keywords.not_sure);
    const bool good = matches_any(lower, keywords.good);
    const bool bad = matches_any(lower, keywords.bad);
    if (not_sure) return DiscreteLabel::not_sure;
    if (good && !bad) return DiscreteLabel::good;
    if (bad && !good) return DiscreteLabel::bad;
    if (!good && !bad && diagnostics) ++diagnostics->unmatched;
    return DiscreteLabel::not_sure;
}

DiscreteLabel parse_prompt_response(const std::string& raw, ParseDiagnostics* diagnostics) {
    static const KeywordConfig defaults;
    return parse_prompt_response(raw, defaults, diagnostics);
}

// ---------------------------------------------------------------------------
// Providers

namespace {

SentimentScore score_from_value(double v, ProviderKind kind, const std::string& where) {
    if (kind == ProviderKind::continuous_positive_prob) return wrap_continuous(v);
    if (v != 1.0 && v != 0.0 && v != -1.0) {
        throw Error("InvalidDiscreteScore", "sentiment", "score_news", where,
                    "discrete providers only emit -1, 0, or +1");
    }
    return SentimentScore{v, ScoreScale::signed_unit, kind};
}

bool try_label_token(const std::string& token, DiscreteLabel* out) {
    const std::string t = to_lower(token);
    if (t == "good" || t == "good news") *out = DiscreteLabel::good;
    else if (t == "bad" || t == "bad news") *out = DiscreteLabel::bad;
    else if (t == "not sure" || t == "not_sure") *out = DiscreteLabel::not_sure;
    else if (t == "positive") *out = DiscreteLabel::positive;
    else if (t == "neutral") *out = DiscreteLabel::neutral;
    else if (t == "negative") *out = DiscreteLabel::negative;
    else return false;
    return true;
}

} // namespace

SentimentScore InlineScoreProvider::score(const NewsRecord& record) const {
    if (record.has_text()) {
        throw Error("MissingScore", "sentiment", "score_news", record.news_id,
                    "record carries text but the run expects precomputed scores");
    }
    return score_from_value(record.score_value(), kind_, record.news_id);
}

FileOracleProvider::FileOracleProvider(const std::string& path, ProviderKind kind)
    : kind_(kind) {
    const CsvTable table = read_csv(path);
    const auto id_col = table.column("news_id");
    const auto value_col = table.column("label_or_score");
    const auto kind_col = table.column("provider_kind");
    if (!id_col || !value_col || !kind_col) {
        throw Error("MissingColumn", "sentiment", "load_oracle", path,
                    "expected columns news_id, label_or_score, provider_kind");
    }
    for (const CsvRow& row : table.rows) {
        const std::string where = "line " + std::to_string(row.line);
        const ProviderKind row_kind = parse_provider_kind(row.fields[*kind_col]);
        if (row_kind != kind) {
            throw Error("MixedProviders", "sentiment", "load_oracle", where,
                        "oracle row kind differs from the configured provider kind");
        }
        const std::string& value = row.fields[*value_col];
        SentimentScore s;
        DiscreteLabel label;
        if (try_label_token(value, &label)) {
            s = map_discrete(label, kind);
        } else {
            double v = 0.0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
                throw Error("MalformedScore", "sentiment", "load_oracle", where,
                            "label_or_score is neither a known label nor a decimal");
            }
            s = score_from_value(v, kind, where);
        }
        if (!scores_.emplace(row.fields[*id_col], s).second) {
            throw Error("DuplicateKey", "sentiment", "load_oracle", where,
                        "duplicate oracle entry for news_id " + row.fields[*id_col]);
        }
    }
}

SentimentScore FileOracleProvider::score(const NewsRecord& record) const {
    const auto it = scores_.find(record.news_id);
    if (it == scores_.end()) {
        throw Error("MissingScore", "sentiment", "score_news", record.news_id,
                    "oracle has no entry for news_id " + record.news_id);
    }
    return it->second;
}

RemoteScoreClient::RemoteScoreClient(std::shared_ptr<RemoteTransport> transport,
                                     RemoteClientConfig config, ProviderKind kind)
    : transport_(std::move(transport)), config_(std::move(config)), kind_(kind) {}

SentimentScore RemoteScoreClient::score(const NewsRecord& record) const {
    if (!record.has_text()) {
        throw Error("MissingScore", "sentiment", "score_news", record.news_id,
                    "remote scoring needs the raw text payload");
    }
    std::string response;
    std::string last_failure;
    const int attempts = config_.max_retries + 1;
    int attempt = 0;
    for (; attempt < attempts; ++attempt) {
        try {
            response = transport_->request(record.text());
            break;
        } catch (const std::exception& e) {
            last_failure = e.what();
        }
    }
    if (attempt == attempts) {
        throw Error("TransportFailure", "sentiment", "score_news", record.news_id,
                    "remote scoring failed after " + std::to_string(attempts) +
                        " attempts: " + last_failure);
    }
    if (kind_ == ProviderKind::continuous_positive_prob) {
        double v = 0.0;
        const auto res = std::from_chars(response.data(), response.data() + response.size(), v);
        if (res.ec != std::errc()) {
            throw Error("MalformedScore", "sentiment", "score_news", record.news_id,
                        "remote response is not a probability: " + response);
        }
        return wrap_continuous(v);
    }
    return map_discrete(parse_prompt_response(response, nullptr), kind_);
}

// ---------------------------------------------------------------------------
// score_news

std::vector<SentimentScore> score_news(const NewsDataset& ds, const SentimentProvider& provider) {
    const std::size_t n = ds.records.size();
    std::vector<SentimentScore> out(n);

#ifdef _OPENMP
    if (provider.thread_safe() && n > 1) {
        // Slot-indexed writes keep output order equal to input order; the
        // first failing record by input index wins so errors are stable too.
        std::vector<std::unique_ptr<Error>> failures(n);
        bool failed = false;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            try {
                out[i] = provider.score(ds.records[i]);
            } catch (const Error& e) {
                failures[i] = std::make_unique<Error>(e);
#pragma omp atomic write
                failed = true;
            }
        }
        if (failed) {
            for (auto& f : failures) {
                if (f) throw *f;
            }
        }
        return out;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = provider.score(ds.records[i]);
    }
    return out;
}

} // namespace sentibt
