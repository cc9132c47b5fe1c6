// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors
//
// Attack success and stealth measurements.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "typeswap/corpus.hpp"
#include "typeswap/graph.hpp"
#include "typeswap/swap.hpp"
#include "typeswap/synth.hpp"

namespace typeswap {

// ---- substring ASR -------------------------------------------------------

/// ASCII case fold plus whitespace collapse (runs -> one space, trimmed).
std::string normalize_answer(std::string_view text);

struct Response {
    std::string query_id;
    std::string prediction;
};

enum class MissingPolicy {
    Strict,   // a query without a response is an error
    Lenient,  // a query without a response counts as a success
};

struct AsrOutcome {
    std::string query_id;
    std::string predicted;
    std::string gold;
    bool success = false;
    bool missing = false;
};

struct AsrReport {
    double rate = 0.0;
    std::size_t total = 0;
    std::size_t successes = 0;
    std::size_t missing = 0;
    MissingPolicy policy = MissingPolicy::Strict;
    std::vector<AsrOutcome> outcomes;
};

/// Success means the normalized gold answer is not a substring of the
/// normalized prediction.
bool attack_succeeded(std::string_view prediction, std::string_view gold);

std::vector<Response> parse_responses(std::string_view jsonl, const std::string& origin = "<memory>");
std::vector<Response> load_responses(const std::filesystem::path& path);

AsrReport asr(std::span<const Response> responses, std::span<const Query> queries,
              MissingPolicy policy = MissingPolicy::Strict);
AsrReport asr(const std::filesystem::path& responses_path, std::span<const Query> queries,
              MissingPolicy policy = MissingPolicy::Strict);

// ---- external judge aggregation -----------------------------------------

enum class Judgment { Yes, No, Unjudged };

struct JudgmentRecord {
    std::string query_id;
    Judgment judgment = Judgment::Unjudged;
};

std::vector<JudgmentRecord> parse_judgments(std::string_view jsonl, const std::string& origin = "<memory>");

struct JudgedAsr {
    double rate = 0.0;          // NO / (YES + NO)
    std::size_t judged = 0;
    std::size_t unjudged = 0;
};

/// A "NO" (prediction does not match the answer) is an attack success;
/// UNJUDGED records are reported but left out of the rate.
JudgedAsr judged_asr(std::span<const JudgmentRecord> judgments);

// ---- reasoning-chain severance ------------------------------------------

struct ChainOutcome {
    std::string query_id;
    std::vector<TypedEntity> chain;
    bool intact_clean = false;
    bool intact_poisoned = false;
    bool severed = false;
};

struct SeveranceReport {
    double rate = 0.0;  // severed / intact in the clean graph
    std::size_t intact_clean = 0;
    std::size_t severed = 0;
    std::vector<ChainOutcome> outcomes;
    std::vector<std::string> excluded;  // chains naming an entity absent from the clean graph
};

/// A chain is intact in a graph when every consecutive pair of its entities
/// is within `hop_slack` hops.
bool chain_intact(const EntityGraph& graph, std::span<const TypedEntity> chain, std::size_t hop_slack);

SeveranceReport chain_severance(std::span<const GoldChain> chains, const EntityGraph& clean,
                                const EntityGraph& poisoned, std::size_t hop_slack = 1);

// ---- perplexity stealth --------------------------------------------------

/// Byte-level n-gram language model with add-one smoothing over 256 symbols.
class CharNgramModel {
public:
    explicit CharNgramModel(std::size_t order);

    void train(std::string_view text);
    double log_prob(std::string_view context, unsigned char next) const;
    double perplexity(std::string_view text) const;
    std::size_t order() const noexcept { return order_; }

private:
    std::string padded(std::string_view text) const;

    std::size_t order_;
    std::unordered_map<std::string, std::size_t> context_counts_;
    std::unordered_map<std::string, std::size_t> gram_counts_;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

/// ROC of the rule "score >= threshold means positive", one point per
/// distinct threshold, starting at (0,0) and ending at (1,1). Tied scores
/// move both rates at once, so all-tied input yields the chance diagonal.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
double auc_trapezoid(std::span<const RocPoint> curve);

struct StealthOptions {
    std::size_t ngram_order = 4;
    /// Every `holdout_stride`-th document (offset 0) trains the model; the
    /// rest are scored in clean and poisoned form.
    std::size_t holdout_stride = 2;
};

struct StealthReport {
    std::vector<std::string> doc_ids;
    std::vector<double> clean_perplexity;
    std::vector<double> poisoned_perplexity;
    std::vector<RocPoint> roc;
    double auc = 0.5;
};

StealthReport stealth(const Corpus& clean, const Corpus& poisoned, const StealthOptions& options = {});

// ---- efficiency ---------------------------------------------------------

struct PhaseTiming {
    std::string phase;
    double seconds = 0.0;
};

struct EfficiencyReport {
    std::vector<PhaseTiming> timings;
    std::size_t mentions_modified = 0;
    std::size_t documents_modified = 0;
    long long net_token_delta = 0;
    std::size_t injected_tokens = 0;
    bool vocabulary_subset = true;
    std::size_t external_tokens = 0;  // LLM spend; zero on the built-in path
};

EfficiencyReport efficiency_report(const RewriteLog& log, std::span<const PhaseTiming> timings,
                                   std::size_t external_tokens = 0);

nlohmann::ordered_json to_json(const AsrReport& report);
nlohmann::ordered_json to_json(const SeveranceReport& report);
nlohmann::ordered_json to_json(const StealthReport& report);
nlohmann::ordered_json to_json(const EfficiencyReport& report);

} // namespace typeswap
