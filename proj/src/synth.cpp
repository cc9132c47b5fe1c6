// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/synth.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "typeswap/error.hpp"
#include "typeswap/io.hpp"
#include "typeswap/rng.hpp"

namespace typeswap {

namespace {

constexpr std::array<std::string_view, 19> kOnsets = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                                      "s", "t", "v", "z", "br", "dr", "kr", "st", "tr"};
constexpr std::array<std::string_view, 7> kVowels = {"a", "e", "i", "o", "u", "ai", "ei"};
constexpr std::array<std::string_view, 5> kCodas = {"", "n", "r", "l", "s"};
constexpr std::array<std::string_view, 5> kOrgSuffixes = {"Institute", "Company", "Foundation", "Group",
                                                          "Society"};
constexpr std::array<std::string_view, 4> kEventSuffixes = {"Summit", "Festival", "Accord", "Games"};

// Every template opens with the first entity so no other capitalized word
// starts a sentence.
constexpr std::array<std::string_view, 8> kTemplates = {
    "{a} worked closely with {b}.",
    "{a} was often mentioned alongside {b}.",
    "{a} signed an agreement with {b}.",
    "{a} received a delegation from {b}.",
    "{a} has long been associated with {b}.",
    "{a} shared several projects with {b}.",
    "{a} was frequently compared to {b}.",
    "{a} exchanged letters with {b}.",
};

std::string_view kind_word(EntityType type) {
    switch (type) {
    case EntityType::Person:
        return "person";
    case EntityType::Org:
        return "organization";
    case EntityType::Gpe:
        return "place";
    default:
        return "event";
    }
}

class NameGenerator {
public:
    explicit NameGenerator(Rng& rng) : rng_(rng) {
        for (auto s : kOrgSuffixes) {
            used_.emplace(s);
        }
        for (auto s : kEventSuffixes) {
            used_.emplace(s);
        }
    }

    std::string word() {
        for (;;) {
            std::string w;
            const auto syllables = 2 + rng_.below(2);
            for (std::uint64_t i = 0; i < syllables; ++i) {
                w += kOnsets[rng_.below(kOnsets.size())];
                w += kVowels[rng_.below(kVowels.size())];
            }
            w += kCodas[rng_.below(kCodas.size())];
            w[0] = static_cast<char>(w[0] - 'a' + 'A');
            if (used_.insert(w).second) {
                return w;
            }
        }
    }

    TypedEntity entity(EntityType type) {
        switch (type) {
        case EntityType::Person: {
            auto given = word();
            return {given + " " + word(), type};
        }
        case EntityType::Org:
            return {word() + " " + std::string(kOrgSuffixes[rng_.below(kOrgSuffixes.size())]), type};
        case EntityType::Event:
            return {word() + " " + std::string(kEventSuffixes[rng_.below(kEventSuffixes.size())]), type};
        default:
            return {word(), type};
        }
    }

private:
    Rng& rng_;
    std::set<std::string> used_;
};

EntityType draw_type(Rng& rng) {
    const double r = rng.unit();
    if (r < 0.40) {
        return EntityType::Person;
    }
    if (r < 0.60) {
        return EntityType::Org;
    }
    if (r < 0.85) {
        return EntityType::Gpe;
    }
    return EntityType::Event;
}

} // namespace

std::vector<WeightedEdge> preferential_attachment(std::size_t nodes, std::size_t attachment,
                                                  std::uint64_t seed) {
    if (attachment < 1 || nodes < attachment + 1) {
        fail(ErrorKind::Validation, "preferential attachment needs attachment >= 1 and nodes >= attachment + 1");
    }
    Rng rng(seed);
    std::vector<WeightedEdge> edges;
    std::vector<std::size_t> endpoints;  // each node repeated once per incident edge
    for (std::size_t u = 0; u <= attachment; ++u) {
        for (std::size_t v = u + 1; v <= attachment; ++v) {
            edges.push_back(WeightedEdge{u, v, 1.0});
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }
    for (std::size_t t = attachment + 1; t < nodes; ++t) {
        std::vector<std::size_t> chosen;
        while (chosen.size() < attachment) {
            auto candidate = endpoints[rng.below(endpoints.size())];
            if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end()) {
                chosen.push_back(candidate);
            }
        }
        std::sort(chosen.begin(), chosen.end());
        for (auto target : chosen) {
            edges.push_back(WeightedEdge{target, t, 1.0});
            endpoints.push_back(target);
            endpoints.push_back(t);
        }
    }
    return edges;
}

SyntheticFixture synth_corpus(const SynthOptions& options) {
    if (options.docs < 1) {
        fail(ErrorKind::Validation, "synthetic corpus needs at least one document");
    }
    SyntheticFixture fx;
    fx.topology = preferential_attachment(options.nodes, options.attachment, options.seed);

    Rng rng(options.seed ^ 0x5DEECE66Dull);
    NameGenerator names(rng);
    fx.entities.reserve(options.nodes);
    for (std::size_t i = 0; i < options.nodes; ++i) {
        fx.entities.push_back(names.entity(draw_type(rng)));
        fx.gazetteer.emplace(fx.entities.back().surface, fx.entities.back().type);
    }

    std::vector<std::size_t> edge_order(fx.topology.size());
    for (std::size_t i = 0; i < edge_order.size(); ++i) {
        edge_order[i] = i;
    }
    shuffle(edge_order, rng);

    std::vector<Document> documents;
    std::vector<Mention> mentions;
    const int width = static_cast<int>(std::to_string(options.docs).size());
    for (std::size_t d = 0; d < options.docs; ++d) {
        std::string id = std::to_string(d);
        id = "doc" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0') + id;
        std::string text;
        for (std::size_t k = d; k < edge_order.size(); k += options.docs) {
            const auto& edge = fx.topology[edge_order[k]];
            // Random orientation so neither endpoint always opens the sentence.
            auto a = edge.u;
            auto b = edge.v;
            if (rng.below(2) == 1) {
                std::swap(a, b);
            }
            std::string_view tmpl = kTemplates[rng.below(kTemplates.size())];
            if (!text.empty()) {
                text += ' ';
            }
            std::size_t pos = 0;
            while (pos < tmpl.size()) {
                auto brace = tmpl.find('{', pos);
                text.append(tmpl.substr(pos, brace == std::string_view::npos ? std::string_view::npos : brace - pos));
                if (brace == std::string_view::npos) {
                    break;
                }
                const auto& entity = fx.entities[tmpl[brace + 1] == 'a' ? a : b];
                mentions.push_back(Mention{d, text.size(), text.size() + entity.surface.size(), entity});
                text += entity.surface;
                pos = brace + 3;
            }
        }
        if (text.empty()) {
            text = "nothing of note was recorded here.";
        }
        documents.push_back(Document{std::move(id), std::move(text)});
    }
    fx.corpus = Corpus::from_documents(std::move(documents));
    fx.inventory = EntityInventory::build(fx.corpus, std::move(mentions));

    std::vector<std::vector<std::size_t>> adjacency(options.nodes);
    for (const auto& e : fx.topology) {
        adjacency[e.u].push_back(e.v);
        adjacency[e.v].push_back(e.u);
    }
    const std::size_t wanted = options.chains == 0 ? std::max<std::size_t>(1, options.nodes / 5) : options.chains;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    std::size_t attempts = 0;
    while (fx.chains.size() < wanted && attempts < wanted * 50) {
        ++attempts;
        const auto& edge = fx.topology[rng.below(fx.topology.size())];
        auto head = edge.u;
        auto bridge = edge.v;
        if (rng.below(2) == 1) {
            std::swap(head, bridge);
        }
        const auto& options_c = adjacency[bridge];
        if (options_c.size() < 2) {
            continue;
        }
        auto answer = options_c[rng.below(options_c.size())];
        if (answer == head || !seen.emplace(head, bridge, answer).second) {
            continue;
        }
        std::string qid = "q" + std::to_string(fx.chains.size() + 1);
        const auto& h = fx.entities[head];
        const auto& b = fx.entities[bridge];
        const auto& c = fx.entities[answer];
        fx.queries.push_back(Query{qid,
                                   "Which " + std::string(kind_word(c.type)) +
                                       " is connected to the associate of " + h.surface + "?",
                                   c.surface});
        fx.chains.push_back(GoldChain{qid, {h, b, c}});
        fx.query_entities.push_back(QueryEntity{qid, 1, h, ReasoningRole::Target});
        fx.query_entities.push_back(QueryEntity{qid, 2, b, ReasoningRole::Bridge});
    }
    return fx;
}

std::string serialize_chains(const std::vector<GoldChain>& chains) {
    std::string out;
    for (const auto& c : chains) {
        nlohmann::ordered_json record;
        record["query_id"] = c.query_id;
        auto list = nlohmann::ordered_json::array();
        for (const auto& e : c.entities) {
            nlohmann::ordered_json j;
            j["surface"] = e.surface;
            j["type"] = to_string(e.type);
            list.push_back(std::move(j));
        }
        record["chain"] = std::move(list);
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<GoldChain> parse_chains(std::string_view jsonl, const std::string& origin) {
    std::vector<GoldChain> out;
    io::for_each_jsonl_record(jsonl, origin, [&](std::size_t line, const nlohmann::json& record) {
        const auto where = origin + ":" + std::to_string(line);
        GoldChain chain;
        chain.query_id = io::require_string(record, "query_id", origin, line);
        auto list = record.find("chain");
        if (list == record.end() || !list->is_array()) {
            fail(ErrorKind::Parse, where + ": missing array field 'chain'");
        }
        for (const auto& item : *list) {
            if (!item.is_object()) {
                fail(ErrorKind::Parse, where + ": chain entry is not an object");
            }
            auto label = io::require_string(item, "type", origin, line);
            auto type = parse_entity_type(label);
            if (!type) {
                fail(ErrorKind::Validation, where + ": unknown entity type '" + label + "'");
            }
            chain.entities.push_back(TypedEntity{io::require_string(item, "surface", origin, line), *type});
        }
        out.push_back(std::move(chain));
    });
    return out;
}

std::vector<GoldChain> load_chains(const std::filesystem::path& path) {
    return parse_chains(io::read_file(path), path.string());
}

} // namespace typeswap
