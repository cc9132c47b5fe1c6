// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/swap.hpp"

#include <algorithm>

#include <json.hpp>

#include "typeswap/error.hpp"
#include "typeswap/io.hpp"

namespace typeswap {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 3> kStrategyLabels = {"global", "query", "full"};
constexpr std::array<std::string_view, 2> kRotationLabels = {"backward", "forward"};

bool overlaps(std::size_t a_start, std::size_t a_end, std::size_t b_start, std::size_t b_end) {
    return a_start < b_end && b_start < a_end;
}

ojson entity_json(const TypedEntity& e) {
    ojson j;
    j["surface"] = e.surface;
    j["type"] = to_string(e.type);
    return j;
}

TypedEntity entity_from_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object() || !j.contains("surface") || !j["surface"].is_string() ||
        !j.contains("type") || !j["type"].is_string()) {
        fail(ErrorKind::Parse, origin + ": entity needs string 'surface' and 'type'");
    }
    auto type = parse_entity_type(j["type"].get<std::string>());
    if (!type) {
        fail(ErrorKind::Validation,
             origin + ": unknown entity type '" + j["type"].get<std::string>() + "'");
    }
    return TypedEntity{j["surface"].get<std::string>(), *type};
}

std::size_t count_tokens(std::string_view s) { return tokenize(s).size(); }

} // namespace

std::string_view to_string(Strategy s) noexcept { return kStrategyLabels[static_cast<int>(s)]; }

std::optional<Strategy> parse_strategy(std::string_view label) noexcept {
    for (std::size_t i = 0; i < kStrategyLabels.size(); ++i) {
        if (kStrategyLabels[i] == label) {
            return static_cast<Strategy>(i);
        }
    }
    return std::nullopt;
}

std::string_view to_string(Rotation r) noexcept { return kRotationLabels[static_cast<int>(r)]; }

std::optional<Rotation> parse_rotation(std::string_view label) noexcept {
    for (std::size_t i = 0; i < kRotationLabels.size(); ++i) {
        if (kRotationLabels[i] == label) {
            return static_cast<Rotation>(i);
        }
    }
    return std::nullopt;
}

UnifiedPool unify_pools(const GlobalPool& global, const QueryPool& query) {
    UnifiedPool unified;
    for (const auto& [type, members] : global.buckets) {
        if (!members.empty()) {
            unified[type].insert(members.begin(), members.end());
        }
    }
    for (const auto& [type, members] : query.buckets) {
        if (!members.empty()) {
            unified[type].insert(members.begin(), members.end());
        }
    }
    return unified;
}

std::optional<TypeCycle> build_permutation(std::vector<CycleEntry> members, Rotation rotation) {
    if (members.size() < 2) {
        return std::nullopt;
    }
    const auto type = members.front().entity.type;
    for (const auto& m : members) {
        if (m.entity.type != type) {
            fail(ErrorKind::Validation, "permutation members mix types: " + describe(m.entity) +
                                            " in a " + std::string(to_string(type)) + " cycle");
        }
    }
    std::sort(members.begin(), members.end(), [](const CycleEntry& a, const CycleEntry& b) {
        if (a.frequency != b.frequency) {
            return a.frequency > b.frequency;
        }
        return a.entity.surface < b.entity.surface;
    });
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i].entity == members[i - 1].entity) {
            fail(ErrorKind::Validation, "duplicate permutation member " + describe(members[i].entity));
        }
    }

    TypeCycle cycle;
    cycle.type = type;
    const auto m = members.size();
    cycle.mapping.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = rotation == Rotation::Backward ? (i + m - 1) % m : (i + 1) % m;
        cycle.mapping.emplace_back(members[i].entity, members[j].entity);
    }
    cycle.sequence = std::move(members);
    return cycle;
}

std::optional<TypeCycle> build_permutation(const std::set<TypedEntity>& members,
                                           const EntityInventory& inventory, Rotation rotation) {
    std::vector<CycleEntry> entries;
    entries.reserve(members.size());
    for (const auto& e : members) {
        entries.push_back(CycleEntry{e, inventory.frequency(e)});
    }
    return build_permutation(std::move(entries), rotation);
}

const TypedEntity* PoisonPlan::target_of(const TypedEntity& entity) const {
    auto it = forward_.find(entity);
    return it == forward_.end() ? nullptr : &it->second;
}

const TypedEntity* PoisonPlan::source_of(const TypedEntity& entity) const {
    auto it = backward_.find(entity);
    return it == backward_.end() ? nullptr : &it->second;
}

std::size_t PoisonPlan::target_count() const { return forward_.size(); }

std::vector<TypedEntity> PoisonPlan::targets() const {
    std::vector<TypedEntity> out;
    for (const auto& c : cycles) {
        for (const auto& entry : c.sequence) {
            out.push_back(entry.entity);
        }
    }
    return out;
}

void PoisonPlan::reindex() {
    forward_.clear();
    backward_.clear();
    for (const auto& c : cycles) {
        for (const auto& [from, to] : c.mapping) {
            if (from.type != to.type) {
                fail(ErrorKind::Validation, "mapping " + describe(from) + " -> " + describe(to) +
                                                " changes the entity type");
            }
            if (!forward_.emplace(from, to).second || !backward_.emplace(to, from).second) {
                fail(ErrorKind::Validation,
                     "mapping is not a bijection at " + describe(from) + " -> " + describe(to));
            }
        }
    }
}

PoisonPlan make_plan(const EntityInventory& inventory, const GlobalPool& global,
                     const QueryPool& query, Strategy strategy, Rotation rotation) {
    static const GlobalPool kNoGlobal;
    static const QueryPool kNoQuery;
    const auto& g = strategy == Strategy::Query ? kNoGlobal : global;
    const auto& q = strategy == Strategy::Global ? kNoQuery : query;

    PoisonPlan plan;
    plan.budget_percent = global.budget_percent;
    plan.strategy = strategy;
    plan.rotation = rotation;
    if (strategy != Strategy::Query) {
        plan.warnings = global.warnings;
    }
    for (const auto& [type, members] : g.buckets) {
        plan.global_targets.insert(plan.global_targets.end(), members.begin(), members.end());
    }
    for (const auto& [type, members] : q.buckets) {
        plan.query_targets.insert(plan.query_targets.end(), members.begin(), members.end());
    }

    for (const auto& [type, members] : unify_pools(g, q)) {
        auto cycle = build_permutation(members, inventory, rotation);
        if (!cycle) {
            plan.warnings.push_back("type " + std::string(to_string(type)) +
                                    " has a single target; no swap possible");
            continue;
        }
        plan.cycles.push_back(std::move(*cycle));
    }
    plan.reindex();
    return plan;
}

std::string serialize_plan(const PoisonPlan& plan) {
    ojson doc;
    doc["budget_percent"] = plan.budget_percent;
    doc["strategy"] = to_string(plan.strategy);
    doc["rotation"] = to_string(plan.rotation);
    auto types = ojson::array();
    for (const auto& c : plan.cycles) {
        ojson t;
        t["type"] = to_string(c.type);
        auto seq = ojson::array();
        for (const auto& entry : c.sequence) {
            auto j = entity_json(entry.entity);
            j["frequency"] = entry.frequency;
            seq.push_back(std::move(j));
        }
        t["sequence"] = std::move(seq);
        auto mapping = ojson::array();
        for (const auto& [from, to] : c.mapping) {
            mapping.push_back(ojson::array({from.surface, to.surface}));
        }
        t["mapping"] = std::move(mapping);
        types.push_back(std::move(t));
    }
    doc["types"] = std::move(types);
    auto pools = ojson::object();
    pools["global"] = ojson::array();
    for (const auto& e : plan.global_targets) {
        pools["global"].push_back(entity_json(e));
    }
    pools["query"] = ojson::array();
    for (const auto& e : plan.query_targets) {
        pools["query"].push_back(entity_json(e));
    }
    doc["pools"] = std::move(pools);
    doc["warnings"] = plan.warnings;
    return doc.dump(2) + "\n";
}

PoisonPlan parse_plan(std::string_view json_text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Parse, origin + ": malformed plan: " + e.what());
    }
    PoisonPlan plan;
    try {
        plan.budget_percent = doc.at("budget_percent").get<double>();
        auto strategy = parse_strategy(doc.at("strategy").get<std::string>());
        auto rotation = parse_rotation(doc.at("rotation").get<std::string>());
        if (!strategy || !rotation) {
            fail(ErrorKind::Validation, origin + ": unknown strategy or rotation");
        }
        plan.strategy = *strategy;
        plan.rotation = *rotation;
        for (const auto& t : doc.at("types")) {
            auto type = parse_entity_type(t.at("type").get<std::string>());
            if (!type) {
                fail(ErrorKind::Validation, origin + ": unknown type in plan");
            }
            TypeCycle cycle;
            cycle.type = *type;
            for (const auto& entry : t.at("sequence")) {
                auto entity = entity_from_json(entry, origin);
                if (entity.type != *type) {
                    fail(ErrorKind::Validation, origin + ": " + describe(entity) +
                                                    " filed under the wrong type");
                }
                cycle.sequence.push_back(CycleEntry{entity, entry.at("frequency").get<std::size_t>()});
            }
            for (const auto& pair : t.at("mapping")) {
                cycle.mapping.emplace_back(TypedEntity{pair.at(0).get<std::string>(), *type},
                                           TypedEntity{pair.at(1).get<std::string>(), *type});
            }
            plan.cycles.push_back(std::move(cycle));
        }
        for (const auto& e : doc.at("pools").at("global")) {
            plan.global_targets.push_back(entity_from_json(e, origin));
        }
        for (const auto& e : doc.at("pools").at("query")) {
            plan.query_targets.push_back(entity_from_json(e, origin));
        }
        plan.warnings = doc.value("warnings", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, origin + ": plan does not match the schema: " + e.what());
    }
    plan.reindex();
    return plan;
}

PoisonPlan load_plan(const std::filesystem::path& path) {
    return parse_plan(io::read_file(path), path.string());
}

RewriteResult rewrite_corpus(const Corpus& corpus, const EntityInventory& inventory,
                             const PoisonPlan& plan) {
    if (inventory.document_count() != corpus.size()) {
        fail(ErrorKind::Reference, "inventory covers " + std::to_string(inventory.document_count()) +
                                       " documents but the corpus has " +
                                       std::to_string(corpus.size()));
    }
    std::vector<Document> documents;
    documents.reserve(corpus.size());
    std::vector<Mention> carried;
    RewriteLog log;
    log.totals.documents = corpus.size();

    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto& doc = corpus[d];
        const auto mentions = inventory.document_mentions(d);

        std::vector<const Mention*> candidates;
        for (const auto& m : mentions) {
            if (plan.target_of(m.entity) != nullptr) {
                candidates.push_back(&m);
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Mention* a, const Mention* b) {
            const auto la = a->end - a->start;
            const auto lb = b->end - b->start;
            if (la != lb) {
                return la > lb;
            }
            if (a->start != b->start) {
                return a->start < b->start;
            }
            return a->entity < b->entity;
        });
        std::vector<const Mention*> chosen;
        for (const auto* c : candidates) {
            bool clash = std::any_of(chosen.begin(), chosen.end(), [&](const Mention* k) {
                return overlaps(c->start, c->end, k->start, k->end);
            });
            if (clash) {
                ++log.totals.overlaps_resolved;
            } else {
                chosen.push_back(c);
            }
        }
        std::sort(chosen.begin(), chosen.end(),
                  [](const Mention* a, const Mention* b) { return a->start < b->start; });

        if (chosen.empty()) {
            documents.push_back(doc);
            for (const auto& m : mentions) {
                carried.push_back(m);
            }
            continue;
        }

        DocumentRewrite entry;
        entry.doc_id = doc.id;
        std::string text;
        text.reserve(doc.text.size());
        std::size_t cursor = 0;
        // (clean end, cumulative byte shift after this substitution)
        std::vector<std::pair<std::size_t, long long>> shifts;
        long long shift = 0;
        for (const auto* c : chosen) {
            const auto& replacement = *plan.target_of(c->entity);
            text.append(doc.text, cursor, c->start - cursor);
            const auto new_start = text.size();
            text += replacement.surface;
            carried.push_back(Mention{d, new_start, text.size(), replacement});
            cursor = c->end;
            shift += static_cast<long long>(replacement.surface.size()) -
                     static_cast<long long>(c->end - c->start);
            shifts.emplace_back(c->end, shift);
            log.totals.net_token_delta += static_cast<long long>(count_tokens(replacement.surface)) -
                                          static_cast<long long>(count_tokens(c->entity.surface));
            entry.substitutions.push_back(
                Substitution{c->start, c->end, c->entity.surface, replacement.surface, c->entity.type});
        }
        text.append(doc.text, cursor);

        for (const auto& m : mentions) {
            bool touched = std::any_of(chosen.begin(), chosen.end(), [&](const Mention* k) {
                return overlaps(m.start, m.end, k->start, k->end);
            });
            if (touched) {
                continue;
            }
            long long offset = 0;
            for (const auto& [clean_end, cumulative] : shifts) {
                if (clean_end <= m.start) {
                    offset = cumulative;
                }
            }
            carried.push_back(Mention{d, static_cast<std::size_t>(static_cast<long long>(m.start) + offset),
                                      static_cast<std::size_t>(static_cast<long long>(m.end) + offset),
                                      m.entity});
        }

        log.totals.mentions_modified += entry.substitutions.size();
        ++log.totals.documents_modified;
        log.documents.push_back(std::move(entry));
        documents.push_back(Document{doc.id, std::move(text)});
    }

    RewriteResult result;
    result.poisoned = Corpus::from_documents(std::move(documents));
    result.log = std::move(log);
    result.log.totals.injected_tokens = injected_token_count(corpus, result.poisoned);
    result.poisoned_inventory = EntityInventory::build(result.poisoned, std::move(carried));
    return result;
}

Corpus invert_rewrite(const Corpus& poisoned, const RewriteLog& log) {
    std::vector<Document> documents(poisoned.documents());
    for (const auto& entry : log.documents) {
        auto index = poisoned.find(entry.doc_id);
        if (!index) {
            fail(ErrorKind::Reference, "rewrite log names unknown document '" + entry.doc_id + "'");
        }
        const auto& text = poisoned[*index].text;
        std::string restored;
        restored.reserve(text.size());
        std::size_t cursor = 0;  // position in the poisoned text
        long long shift = 0;     // poisoned offset minus clean offset
        for (const auto& s : entry.substitutions) {
            const auto at = static_cast<std::size_t>(static_cast<long long>(s.start) + shift);
            if (at < cursor || at + s.to.size() > text.size() ||
                text.compare(at, s.to.size(), s.to) != 0) {
                fail(ErrorKind::StaleAnnotation, "rewrite log does not match document '" +
                                                     entry.doc_id + "' at clean offset " +
                                                     std::to_string(s.start));
            }
            restored.append(text, cursor, at - cursor);
            restored += s.from;
            cursor = at + s.to.size();
            shift += static_cast<long long>(s.to.size()) - static_cast<long long>(s.end - s.start);
        }
        restored.append(text, cursor);
        documents[*index].text = std::move(restored);
    }
    return Corpus::from_documents(std::move(documents));
}

std::set<std::string, std::less<>> token_vocabulary(const Corpus& corpus) {
    std::set<std::string, std::less<>> vocab;
    for (const auto& doc : corpus) {
        for (const auto& t : tokenize(doc.text)) {
            if (!vocab.contains(t.surface)) {
                vocab.emplace(t.surface);
            }
        }
    }
    return vocab;
}

std::size_t injected_token_count(const Corpus& clean, const Corpus& poisoned) {
    const auto clean_vocab = token_vocabulary(clean);
    std::size_t injected = 0;
    for (const auto& form : token_vocabulary(poisoned)) {
        if (!clean_vocab.contains(form)) {
            ++injected;
        }
    }
    return injected;
}

std::string serialize_rewrite_log(const RewriteLog& log) {
    ojson doc;
    auto docs = ojson::array();
    for (const auto& entry : log.documents) {
        ojson d;
        d["doc_id"] = entry.doc_id;
        auto subs = ojson::array();
        for (const auto& s : entry.substitutions) {
            ojson j;
            j["start"] = s.start;
            j["end"] = s.end;
            j["from"] = s.from;
            j["to"] = s.to;
            j["type"] = to_string(s.type);
            subs.push_back(std::move(j));
        }
        d["substitutions"] = std::move(subs);
        docs.push_back(std::move(d));
    }
    doc["documents"] = std::move(docs);
    ojson totals;
    totals["documents"] = log.totals.documents;
    totals["documents_modified"] = log.totals.documents_modified;
    totals["mentions_modified"] = log.totals.mentions_modified;
    totals["overlaps_resolved"] = log.totals.overlaps_resolved;
    totals["net_token_delta"] = log.totals.net_token_delta;
    totals["injected_tokens"] = log.totals.injected_tokens;
    doc["totals"] = std::move(totals);
    return doc.dump(2) + "\n";
}

RewriteLog parse_rewrite_log(std::string_view json_text, const std::string& origin) {
    RewriteLog log;
    try {
        auto doc = nlohmann::json::parse(json_text);
        for (const auto& d : doc.at("documents")) {
            DocumentRewrite entry;
            entry.doc_id = d.at("doc_id").get<std::string>();
            for (const auto& j : d.at("substitutions")) {
                Substitution s;
                s.start = j.at("start").get<std::size_t>();
                s.end = j.at("end").get<std::size_t>();
                s.from = j.at("from").get<std::string>();
                s.to = j.at("to").get<std::string>();
                auto type = parse_entity_type(j.at("type").get<std::string>());
                if (!type) {
                    fail(ErrorKind::Validation, origin + ": unknown type in rewrite log");
                }
                s.type = *type;
                entry.substitutions.push_back(std::move(s));
            }
            log.documents.push_back(std::move(entry));
        }
        const auto& t = doc.at("totals");
        log.totals.documents = t.at("documents").get<std::size_t>();
        log.totals.documents_modified = t.at("documents_modified").get<std::size_t>();
        log.totals.mentions_modified = t.at("mentions_modified").get<std::size_t>();
        log.totals.overlaps_resolved = t.at("overlaps_resolved").get<std::size_t>();
        log.totals.net_token_delta = t.at("net_token_delta").get<long long>();
        log.totals.injected_tokens = t.at("injected_tokens").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, origin + ": rewrite log does not match the schema: " + e.what());
    }
    return log;
}

} // namespace typeswap
