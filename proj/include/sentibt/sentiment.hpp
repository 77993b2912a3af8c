#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "sentibt/core.hpp"
#include "sentibt/ingest.hpp"

namespace sentibt {

// The three provider families: a prompted chat model returning GOOD/BAD/NOT
// SURE verdicts, a model emitting a positive-sentiment probability in [0,1],
// and a 3-class classifier emitting Positive/Neutral/Negative.
enum class ProviderKind { discrete_three_class, continuous_positive_prob, discrete_classifier };

const char* provider_kind_token(ProviderKind kind);
ProviderKind parse_provider_kind(const std::string& token);

enum class ScoreScale { signed_unit, unit }; // [-1,+1] vs [0,1]

struct SentimentScore {
    double value = 0.0;
    ScoreScale scale = ScoreScale::signed_unit;
    ProviderKind provider = ProviderKind::discrete_three_class;

    bool operator==(const SentimentScore&) const = default;
};

enum class DiscreteLabel { good, not_sure, bad, positive, neutral, negative };

// Good/Positive -> +1, NotSure/Neutral -> 0, Bad/Negative -> -1. Total.
SentimentScore map_discrete(DiscreteLabel label);
SentimentScore map_discrete(DiscreteLabel label, ProviderKind kind);

// Wraps a positive-sentiment probability; out of [0,1] is rejected.
SentimentScore wrap_continuous(double p_positive);

// Signed scores pass through; unit scores map affinely via v -> 2v - 1.
SentimentScore to_signed(const SentimentScore& s);

// ---------------------------------------------------------------------------
// Free-text verdict parsing for prompted-model responses.

struct KeywordConfig {
    std::vector<std::string> good = {"good news", "good"};
    std::vector<std::string> bad = {"bad news", "bad"};
    std::vector<std::string> not_sure = {"not sure", "unsure", "neutral"};
};

struct ParseDiagnostics {
    std::size_t unmatched = 0; // responses with no keyword from any list
};

// Case-insensitive, word-boundary keyword match. An explicit NOT-SURE keyword
// wins; a response matching both GOOD and BAD keywords degrades to NotSure;
// no match at all degrades to NotSure and bumps the unmatched tally.
DiscreteLabel parse_prompt_response(const std::string& raw, const KeywordConfig& keywords,
                                    ParseDiagnostics* diagnostics);
DiscreteLabel parse_prompt_response(const std::string& raw, ParseDiagnostics* diagnostics);

// ---------------------------------------------------------------------------
// Providers.

class SentimentProvider {
public:
    virtual ~SentimentProvider() = default;
    virtual ProviderKind kind() const = 0;
    virtual SentimentScore score(const NewsRecord& record) const = 0;
    // Providers that are not thread safe are called serially by score_news.
    virtual bool thread_safe() const { return true; }
};

// Uses the score column already present on each record.
class InlineScoreProvider final : public SentimentProvider {
public:
    explicit InlineScoreProvider(ProviderKind kind) : kind_(kind) {}
    ProviderKind kind() const override { return kind_; }
    SentimentScore score(const NewsRecord& record) const override;

private:
    ProviderKind kind_;
};

// File-backed oracle: news_id -> label_or_score. Labels are the verdict and
// class tokens (good / not sure / bad / positive / neutral / negative, any
// case); numeric entries are -1/0/1 for discrete kinds or a probability for
// the continuous kind.
class FileOracleProvider final : public SentimentProvider {
public:
    FileOracleProvider(const std::string& path, ProviderKind kind);
    ProviderKind kind() const override { return kind_; }
    SentimentScore score(const NewsRecord& record) const override;

private:
    ProviderKind kind_;
    std::unordered_map<std::string, SentimentScore> scores_;
};

// Transport-agnostic remote scoring. The transport moves one request string
// to one response string; everything else (endpoint, auth, wire format) is
// behind it. No default code path constructs a network transport.
class RemoteTransport {
public:
    virtual ~RemoteTransport() = default;
    virtual std::string request(const std::string& payload) = 0; // throws on failure
};

struct RemoteClientConfig {
    std::string endpoint;
    double timeout_seconds = 10.0;
    int max_retries = 2; // retries after the first attempt
};

class RemoteScoreClient final : public SentimentProvider {
public:
    RemoteScoreClient(std::shared_ptr<RemoteTransport> transport, RemoteClientConfig config,
                      ProviderKind kind);
    ProviderKind kind() const override { return kind_; }
    SentimentScore score(const NewsRecord& record) const override;
    bool thread_safe() const override { return false; }

private:
    std::shared_ptr<RemoteTransport> transport_;
    RemoteClientConfig config_;
    ProviderKind kind_;
};

// One score per record, output order equal to input order regardless of the
// execution order underneath.
std::vector<SentimentScore> score_news(const NewsDataset& ds, const SentimentProvider& provider);

} // namespace sentibt
