// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

namespace typeswap {

namespace {

using ojson = nlohmann::ordered_json;

constexpr char kPad = '\x02';

} // namespace

std::string normalize_answer(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u == ' ' || u == '\t' || u == '\n' || u == '\r' || u == '\f' || u == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

bool attack_succeeded(std::string_view prediction, std::string_view gold) {
    return normalize_answer(prediction).find(normalize_answer(gold)) == std::string::npos;
}

std::vector<Response> parse_responses(std::string_view jsonl, const std::string& origin) {
    std::vector<Response> out;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        out.push_back(Response{io::require_string(record, "query_id", origin, line),
                               io::require_string(record, "prediction", origin, line)});
    });
    return out;
}

std::vector<Response> load_responses(const std::filesystem::path& path) {
    return parse_responses(io::read_file(path), path.string());
}

AsrReport asr(std::span<const Response> responses, std::span<const Query> queries, MissingPolicy policy) {
    std::unordered_map<std::string, const Response*> by_id;
    for (const auto& r : responses) {
        if (!by_id.emplace(r.query_id, &r).second) {
            fail(ErrorKind::Validation, "duplicate response for query '" + r.query_id + "'");
        }
    }
    AsrReport report;
    report.policy = policy;
    for (const auto& q : queries) {
        AsrOutcome outcome;
        outcome.query_id = q.id;
        outcome.gold = q.gold_answer;
        auto it = by_id.find(q.id);
        if (it == by_id.end()) {
            if (policy == MissingPolicy::Strict) {
                fail(ErrorKind::Validation, "no response for query '" + q.id + "'");
            }
            outcome.missing = true;
            outcome.success = true;
            ++report.missing;
        } else {
            outcome.predicted = it->second->prediction;
            outcome.success = attack_succeeded(outcome.predicted, outcome.gold);
        }
        report.successes += outcome.success ? 1 : 0;
        report.outcomes.push_back(std::move(outcome));
    }
    report.total = queries.size();
    report.rate = report.total == 0 ? 0.0
                                    : static_cast<double>(report.successes) / static_cast<double>(report.total);
    return report;
}

AsrReport asr(const std::filesystem::path& responses_path, std::span<const Query> queries, MissingPolicy policy) {
    auto responses = load_responses(responses_path);
    return asr(responses, queries, policy);
}

std::vector<JudgmentRecord> parse_judgments(std::string_view jsonl, const std::string& origin) {
    std::vector<JudgmentRecord> out;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        JudgmentRecord r;
        r.query_id = io::require_string(record, "query_id", origin, line);
        auto label = io::require_string(record, "judgment", origin, line);
        if (label == "YES") {
            r.judgment = Judgment::Yes;
        } else if (label == "NO") {
            r.judgment = Judgment::No;
        } else if (label == "UNJUDGED") {
            r.judgment = Judgment::Unjudged;
        } else {
            fail(ErrorKind::Validation, origin + ":" + std::to_string(line) + ": judgment must be YES, NO or UNJUDGED");
        }
        out.push_back(std::move(r));
    });
    return out;
}

JudgedAsr judged_asr(std::span<const JudgmentRecord> judgments) {
    JudgedAsr out;
    std::size_t no = 0;
    for (const auto& j : judgments) {
        if (j.judgment == Judgment::Unjudged) {
            ++out.unjudged;
            continue;
        }
        ++out.judged;
        no += j.judgment == Judgment::No ? 1 : 0;
    }
    out.rate = out.judged == 0 ? 0.0 : static_cast<double>(no) / static_cast<double>(out.judged);
    return out;
}

bool chain_intact(const EntityGraph& graph, std::span<const TypedEntity> chain, std::size_t hop_slack) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        auto a = graph.find(chain[i]);
        auto b = graph.find(chain[i + 1]);
        if (!a || !b || !bounded_distance(graph, *a, *b, hop_slack)) {
            return false;
        }
    }
    return true;
}

SeveranceReport chain_severance(std::span<const GoldChain> chains, const EntityGraph& clean,
                                const EntityGraph& poisoned, std::size_t hop_slack) {
    SeveranceReport report;
    for (const auto& chain : chains) {
        bool known = std::all_of(chain.entities.begin(), chain.entities.end(),
                                 [&](const TypedEntity& e) { return clean.find(e).has_value(); });
        if (!known) {
            report.excluded.push_back(chain.query_id);
            continue;
        }
        ChainOutcome outcome;
        outcome.query_id = chain.query_id;
        outcome.chain = chain.entities;
        outcome.intact_clean = chain_intact(clean, chain.entities, hop_slack);
        outcome.intact_poisoned = chain_intact(poisoned, chain.entities, hop_slack);
        outcome.severed = outcome.intact_clean && !outcome.intact_poisoned;
        report.intact_clean += outcome.intact_clean ? 1 : 0;
        report.severed += outcome.severed ? 1 : 0;
        report.outcomes.push_back(std::move(outcome));
    }
    report.rate = report.intact_clean == 0
                      ? 0.0
                      : static_cast<double>(report.severed) / static_cast<double>(report.intact_clean);
    return report;
}

CharNgramModel::CharNgramModel(std::size_t order) : order_(order) {
    if (order_ < 1) {
        fail(ErrorKind::Validation, "n-gram order must be >= 1");
    }
}

std::string CharNgramModel::padded(std::string_view text) const {
    std::string out(order_ - 1, kPad);
    out.append(text);
    return out;
}

void CharNgramModel::train(std::string_view text) {
    const auto p = padded(text);
    for (std::size_t i = order_ - 1; i < p.size(); ++i) {
        const auto start = i + 1 - order_;
        ++context_counts_[p.substr(start, order_ - 1)];
        ++gram_counts_[p.substr(start, order_)];
    }
}

double CharNgramModel::log_prob(std::string_view context, unsigned char next) const {
    std::string ctx(context);
    auto c = context_counts_.find(ctx);
    ctx.push_back(static_cast<char>(next));
    auto g = gram_counts_.find(ctx);
    const double gram = g == gram_counts_.end() ? 0.0 : static_cast<double>(g->second);
    const double total = c == context_counts_.end() ? 0.0 : static_cast<double>(c->second);
    return std::log((gram + 1.0) / (total + 256.0));
}

double CharNgramModel::perplexity(std::string_view text) const {
    if (text.empty()) {
        return 1.0;
    }
    const auto p = padded(text);
    double sum = 0.0;
    for (std::size_t i = order_ - 1; i < p.size(); ++i) {
        const auto start = i + 1 - order_;
        sum += log_prob(std::string_view(p).substr(start, order_ - 1), static_cast<unsigned char>(p[i]));
    }
    return std::exp(-sum / static_cast<double>(text.size()));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        fail(ErrorKind::Validation, "roc_curve: scores and labels differ in length");
    }
    const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const auto negatives = static_cast<double>(labels.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) {
        fail(ErrorKind::Validation, "roc_curve needs both positive and negative examples");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> curve{{0.0, 0.0}};
    double tp = 0.0;
    double fp = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1.0;
            ++i;
        }
        curve.push_back(RocPoint{fp / negatives, tp / positives});
    }
    return curve;
}

double auc_trapezoid(std::span<const RocPoint> curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    }
    return area;
}

StealthReport stealth(const Corpus& clean, const Corpus& poisoned, const StealthOptions& options) {
    if (clean.size() != poisoned.size()) {
        fail(ErrorKind::Validation, "stealth: corpora differ in size (" + std::to_string(clean.size()) + " vs " +
                                        std::to_string(poisoned.size()) + ")");
    }
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (clean[i].id != poisoned[i].id) {
            fail(ErrorKind::Validation, "stealth: document " + std::to_string(i) + " is '" + clean[i].id +
                                            "' in the clean corpus but '" + poisoned[i].id + "' in the poisoned one");
        }
    }
    if (options.holdout_stride < 2) {
        fail(ErrorKind::Validation, "stealth: holdout stride must be >= 2");
    }
    CharNgramModel model(options.ngram_order);
    for (std::size_t i = 0; i < clean.size(); i += options.holdout_stride) {
        model.train(clean[i].text);
    }

    StealthReport report;
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (i % options.holdout_stride == 0) {
            continue;
        }
        report.doc_ids.push_back(clean[i].id);
        report.clean_perplexity.push_back(model.perplexity(clean[i].text));
        report.poisoned_perplexity.push_back(model.perplexity(poisoned[i].text));
        scores.push_back(report.clean_perplexity.back());
        labels.push_back(0);
        scores.push_back(report.poisoned_perplexity.back());
        labels.push_back(1);
    }
    if (report.doc_ids.empty()) {
        fail(ErrorKind::Validation, "stealth: no held-out documents to score");
    }
    report.roc = roc_curve(scores, labels);
    report.auc = auc_trapezoid(report.roc);
    return report;
}

EfficiencyReport efficiency_report(const RewriteLog& log, std::span<const PhaseTiming> timings,
                                   std::size_t external_tokens) {
    EfficiencyReport r;
    r.timings.assign(timings.begin(), timings.end());
    r.mentions_modified = log.totals.mentions_modified;
    r.documents_modified = log.totals.documents_modified;
    r.net_token_delta = log.totals.net_token_delta;
    r.injected_tokens = log.totals.injected_tokens;
    r.vocabulary_subset = log.totals.injected_tokens == 0;
    r.external_tokens = external_tokens;
    return r;
}

ojson to_json(const AsrReport& report) {
    ojson j;
    j["asr"] = report.rate;
    j["total"] = report.total;
    j["successes"] = report.successes;
    j["missing"] = report.missing;
    j["missing_policy"] = report.policy == MissingPolicy::Strict ? "strict" : "lenient";
    auto outcomes = ojson::array();
    for (const auto& o : report.outcomes) {
        ojson item;
        item["query_id"] = o.query_id;
        item["predicted"] = o.predicted;
        item["gold"] = o.gold;
        item["success"] = o.success;
        item["missing"] = o.missing;
        outcomes.push_back(std::move(item));
    }
    j["outcomes"] = std::move(outcomes);
    return j;
}

ojson to_json(const SeveranceReport& report) {
    ojson j;
    j["severance_rate"] = report.rate;
    j["intact_clean"] = report.intact_clean;
    j["severed"] = report.severed;
    j["excluded"] = report.excluded;
    auto outcomes = ojson::array();
    for (const auto& o : report.outcomes) {
        ojson item;
        item["query_id"] = o.query_id;
        auto chain = ojson::array();
        for (const auto& e : o.chain) {
            chain.push_back(ojson::array({e.surface, to_string(e.type)}));
        }
        item["chain"] = std::move(chain);
        item["intact_clean"] = o.intact_clean;
        item["intact_poisoned"] = o.intact_poisoned;
        item["severed"] = o.severed;
        outcomes.push_back(std::move(item));
    }
    j["outcomes"] = std::move(outcomes);
    return j;
}

ojson to_json(const StealthReport& report) {
    ojson j;
    j["auc"] = report.auc;
    auto roc = ojson::array();
    for (const auto& p : report.roc) {
        roc.push_back(ojson::array({p.fpr, p.tpr}));
    }
    j["roc"] = std::move(roc);
    auto docs = ojson::array();
    for (std::size_t i = 0; i < report.doc_ids.size(); ++i) {
        ojson item;
        item["doc_id"] = report.doc_ids[i];
        item["clean_perplexity"] = report.clean_perplexity[i];
        item["poisoned_perplexity"] = report.poisoned_perplexity[i];
        docs.push_back(std::move(item));
    }
    j["documents"] = std::move(docs);
    return j;
}

ojson to_json(const EfficiencyReport& report) {
    ojson j;
    auto timings = ojson::object();
    for (const auto& t : report.timings) {
        timings[t.phase] = t.seconds;
    }
    j["phase_seconds"] = std::move(timings);
    j["mentions_modified"] = report.mentions_modified;
    j["documents_modified"] = report.documents_modified;
    j["net_token_delta"] = report.net_token_delta;
    j["injected_tokens"] = report.injected_tokens;
    j["vocabulary_subset"] = report.vocabulary_subset;
    j["external_tokens"] = report.external_tokens;
    return j;
}

} // namespace typeswap
