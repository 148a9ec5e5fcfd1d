"""Per-layer statistics and inter-layer similarity measures.

The statistics battery mirrors what one usually reports for a sparse
directed layer: edge count, share of ties the layer participates in,
non-isolated user count, strength moments, density of the graph and of
the strength mass.  Densities normalize by the number of ordered user
pairs of the whole network, card(U) * (card(U) - 1).

Layer pairs are compared with four measures: the density of the edge
union, the binary cosine of the edge sets, the binary Jaccard
coefficient, and the Pearson correlation of the strength vectors indexed
by every ordered user pair (absent edges count as zeros).  Pearson is
evaluated with the sparse sum identity, never by materializing the
card(U)^2 vectors.  A zero-variance side makes Pearson undefined and is
reported as None rather than 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from .layers import LAYER_KINDS, OBJECT_BACKED_KINDS, RelationLayer
from .network import MSN


@dataclass(frozen=True)
class LayerStats:
    kind: str
    relation_count: int
    contribution_in_ties: float
    non_isolated_users: int
    non_isolated_fraction: float
    avg_strength: float
    strength_std_dev: float
    avg_relations_per_user: float
    meeting_object_count: int | None
    relations_per_object: float | None
    graph_density: float
    strength_density: float


@dataclass(frozen=True)
class LayerSimilarityReport:
    pair: tuple[str, str]
    union_density: float
    cosine: float
    jaccard: float
    pearson: float | None


def ordered_pair_count(universe_size: int) -> int:
    return universe_size * (universe_size - 1)


def graph_density(relation_count: float, universe_size: int) -> float:
    """Edges over ordered user pairs; zero for degenerate universes."""
    pairs = ordered_pair_count(universe_size)
    return relation_count / pairs if pairs > 0 else 0.0


def strength_density(total_strength: float, universe_size: int) -> float:
    """Strength mass over ordered user pairs."""
    pairs = ordered_pair_count(universe_size)
    return total_strength / pairs if pairs > 0 else 0.0


def avg_relations_per_user(relation_count: float, non_isolated_users: int) -> float:
    return relation_count / non_isolated_users if non_isolated_users > 0 else 0.0


def relations_per_object(relation_count: float, object_count: int) -> float:
    return relation_count / object_count if object_count > 0 else 0.0


def layer_stats(layer: RelationLayer, universe: MSN) -> LayerStats:
    """The statistics battery for one layer inside its network.

    An empty layer is a value, not an error: every numeric field is zero.
    """
    n_users = len(universe.users)
    n_ties = len(universe.ties)
    edges = layer.edges
    count = len(edges)

    participants: set[str] = set()
    total = 0.0
    for (i, j), s in edges.items():
        participants.add(i)
        participants.add(j)
        total += s

    avg = total / count if count else 0.0
    if count:
        var = sum((s - avg) ** 2 for s in edges.values()) / count
        std = math.sqrt(var)
    else:
        std = 0.0

    objects = layer.meeting_object_count
    per_object = None
    if layer.kind in OBJECT_BACKED_KINDS:
        per_object = relations_per_object(count, objects or 0)

    return LayerStats(
        kind=layer.kind,
        relation_count=count,
        contribution_in_ties=count / n_ties if n_ties else 0.0,
        non_isolated_users=len(participants),
        non_isolated_fraction=len(participants) / n_users if n_users else 0.0,
        avg_strength=avg,
        strength_std_dev=std,
        avg_relations_per_user=avg_relations_per_user(count, len(participants)),
        meeting_object_count=objects if layer.kind in OBJECT_BACKED_KINDS else None,
        relations_per_object=per_object,
        graph_density=graph_density(count, n_users),
        strength_density=strength_density(total, n_users),
    )


def all_layer_stats(universe: MSN) -> list[LayerStats]:
    return [layer_stats(universe.layers[kind], universe) for kind in LAYER_KINDS]


def compare_layers(a: RelationLayer, b: RelationLayer, universe: MSN) -> LayerSimilarityReport:
    """Four similarity measures between two layers of one network."""
    set_a = set(a.edges)
    set_b = set(b.edges)
    inter = len(set_a & set_b)
    union = len(set_a | set_b)
    pairs = ordered_pair_count(len(universe.users))

    union_density = union / pairs if pairs else 0.0
    cosine = inter / math.sqrt(len(set_a) * len(set_b)) if set_a and set_b else 0.0
    jaccard = inter / union if union else 0.0
    pearson = _sparse_pearson(a.edges, b.edges, pairs)

    # standard set inequality; holds for every pair of edge sets
    assert jaccard <= cosine + 1e-12

    return LayerSimilarityReport(
        pair=(a.kind, b.kind),
        union_density=union_density,
        cosine=cosine,
        jaccard=jaccard,
        pearson=pearson,
    )


def _sparse_pearson(
    edges_a: dict[tuple[str, str], float],
    edges_b: dict[tuple[str, str], float],
    pairs: int,
) -> float | None:
    """Pearson over all ordered pairs via sparse sums (absent edge = 0)."""
    if pairs < 2:
        return None
    sum_a = sum(edges_a.values())
    sum_b = sum(edges_b.values())
    sum_aa = sum(s * s for s in edges_a.values())
    sum_bb = sum(s * s for s in edges_b.values())
    smaller, larger = (edges_a, edges_b) if len(edges_a) <= len(edges_b) else (edges_b, edges_a)
    sum_ab = sum(s * larger[pair] for pair, s in smaller.items() if pair in larger)

    var_a = sum_aa - sum_a * sum_a / pairs
    var_b = sum_bb - sum_b * sum_b / pairs
    if var_a <= 0.0 or var_b <= 0.0:
        return None
    cov = sum_ab - sum_a * sum_b / pairs
    r = cov / math.sqrt(var_a * var_b)
    return max(-1.0, min(1.0, r))


def compare_all_layers(universe: MSN) -> list[LayerSimilarityReport]:
    """All unordered layer pairs (55 for eleven layers), canonical order."""
    reports = []
    for i, kind_a in enumerate(LAYER_KINDS):
        for kind_b in LAYER_KINDS[i + 1:]:
            reports.append(compare_layers(universe.layers[kind_a], universe.layers[kind_b], universe))
    return reports


def tie_overlap_histogram(msn: MSN) -> dict[int, int]:
    """How many ties are backed by exactly k layers, for k = 1..11."""
    histogram = {k: 0 for k in range(1, len(LAYER_KINDS) + 1)}
    for tie in msn.ties.values():
        present = sum(1 for s in tie.layer_strengths if s > 0.0)
        histogram[present] += 1
    return histogram
