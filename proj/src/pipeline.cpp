// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The typeswap Authors

#include "typeswap/pipeline.hpp"

#include <chrono>

#include "typeswap/error.hpp"

namespace typeswap {

namespace {

class PhaseClock {
public:
    explicit PhaseClock(std::vector<PhaseTiming>& sink) : sink_(sink) {}

    void mark(std::string phase) {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back(PhaseTiming{std::move(phase), std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }

private:
    std::vector<PhaseTiming>& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

} // namespace

PoisonRun run_poison(PoisonInputs inputs, const PoisonOptions& options) {
    if (inputs.corpus == nullptr) {
        fail(ErrorKind::Validation, "run_poison: no corpus given");
    }
    const Corpus& corpus = *inputs.corpus;
    PoisonRun run;
    PhaseClock clock(run.timings);

    if (inputs.inventory) {
        run.inventory = std::move(*inputs.inventory);
    } else {
        ExtractorOptions extractor;
        extractor.threads = options.threads;
        run.inventory = extract_builtin(corpus, inputs.gazetteer, extractor);
    }
    clock.mark("inventory");

    run.global = build_global_pool(run.inventory, options.budget_percent);
    clock.mark("global_pool");

    if (options.strategy != Strategy::Global) {
        std::vector<QueryEntity> entities;
        if (inputs.query_entities) {
            entities = std::move(*inputs.query_entities);
        } else if (inputs.queries != nullptr) {
            entities = fallback_query_entities(*inputs.queries, run.inventory);
        } else {
            fail(ErrorKind::Validation, "strategy '" + std::string(to_string(options.strategy)) +
                                            "' needs queries or query entities");
        }
        run.query = verify_against_corpus(entities, run.inventory);
    }
    clock.mark("query_pool");

    run.plan = make_plan(run.inventory, run.global, run.query, options.strategy, options.rotation);
    clock.mark("plan");

    run.rewrite = rewrite_corpus(corpus, run.inventory, run.plan);
    clock.mark("rewrite");
    return run;
}

} // namespace typeswap
