# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The typeswap Authors
"""Entity-swap corpus poisoning and co-occurrence graph analysis."""

from ._core import (
    Corpus,
    EntityGraph,
    EntityInventory,
    PoisonResult,
    Query,
    SyntheticFixture,
    TypeswapError,
    __version__,
    asr,
    attack_succeeded,
    build_graph,
    centrality,
    frequency_degree_correlation,
    giant_fraction,
    hub_attack_report,
    invert,
    load_queries,
    metrics,
    normalize_answer,
    parse_queries,
    poison,
    severance,
    spectral,
    stealth,
    synth,
    top_degree_nodes,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
