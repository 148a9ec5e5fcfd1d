"""Aggregation of relation layers into one multidimensional network.

A tie from i to j exists as soon as any layer has the edge (i, j); its
strength is the importance-weighted mean of the per-layer strengths,
with absent layers contributing zero.  Users without a single incoming
or outgoing tie are dropped from the user set.  Each tie keeps its full
per-layer strength vector because ranking and feedback credit need the
components, not just the aggregate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import MsnError
from .layers import LAYER_INDEX, LAYER_KINDS, N_LAYERS, RelationLayer


class UnknownUser(MsnError):
    """The user is not part of the network (possibly pruned as isolated)."""


@dataclass(frozen=True)
class AggregationConfig:
    """Static per-layer importance coefficients, in canonical layer order."""

    alpha: tuple[float, ...] = (1.0,) * N_LAYERS

    def __post_init__(self) -> None:
        if len(self.alpha) != N_LAYERS:
            raise MsnError(f"alpha must have {N_LAYERS} entries, got {len(self.alpha)}")
        if any(a < 0 for a in self.alpha):
            raise MsnError("alpha entries must be nonnegative")
        if sum(self.alpha) <= 0:
            raise MsnError("alpha entries must not all be zero")


@dataclass(frozen=True)
class Tie:
    strength: float
    layer_strengths: tuple[float, ...]


@dataclass(frozen=True)
class TieNeighbor:
    neighbor: str
    strength: float
    layer_strengths: tuple[float, ...]


@dataclass
class MSN:
    """The aggregated multidimensional social network."""

    users: set[str]
    layers: dict[str, RelationLayer]
    ties: dict[tuple[str, str], Tie]
    alpha: tuple[float, ...]
    _out: dict[str, list[str]] = field(init=False, repr=False, default_factory=dict)
    _layer_max: tuple[float, ...] | None = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        for (i, j) in self.ties:
            self._out.setdefault(i, []).append(j)
        for neighbors in self._out.values():
            neighbors.sort()

    def out_neighbors(self, user: str) -> list[str]:
        return self._out.get(user, [])

    def layer_max_strengths(self) -> tuple[float, ...]:
        """Largest strength present in each layer (0 for empty layers)."""
        if self._layer_max is None:
            maxima = []
            for kind in LAYER_KINDS:
                edges = self.layers[kind].edges
                maxima.append(max(edges.values()) if edges else 0.0)
            self._layer_max = tuple(maxima)
        return self._layer_max


def aggregate(layers: Mapping[str, RelationLayer], cfg: AggregationConfig | None = None) -> MSN:
    """Union all layer edges into ties and average their strengths.

    Ties whose weighted mean happens to be zero (possible when some
    importance coefficients are zero) are kept: existence only requires
    an edge in one layer.
    """
    cfg = cfg or AggregationConfig()
    missing = [kind for kind in LAYER_KINDS if kind not in layers]
    if missing:
        raise MsnError(f"missing layers: {missing}")

    vectors: dict[tuple[str, str], list[float]] = {}
    for kind in LAYER_KINDS:
        idx = LAYER_INDEX[kind]
        for pair, strength in layers[kind].edges.items():
            vec = vectors.get(pair)
            if vec is None:
                vec = [0.0] * N_LAYERS
                vectors[pair] = vec
            vec[idx] = strength

    alpha_total = sum(cfg.alpha)
    ties: dict[tuple[str, str], Tie] = {}
    users: set[str] = set()
    for pair, vec in vectors.items():
        weighted = sum(a * s for a, s in zip(cfg.alpha, vec))
        ties[pair] = Tie(strength=weighted / alpha_total, layer_strengths=tuple(vec))
        users.add(pair[0])
        users.add(pair[1])

    return MSN(users=users, layers=dict(layers), ties=ties, alpha=cfg.alpha)


def tie_neighbors(msn: MSN, user: str) -> list[TieNeighbor]:
    """All outgoing ties of ``user`` with their per-layer breakdown."""
    if user not in msn.users:
        raise UnknownUser(f"user {user!r} is not in the network")
    return [
        TieNeighbor(neighbor=j, strength=msn.ties[(user, j)].strength,
                    layer_strengths=msn.ties[(user, j)].layer_strengths)
        for j in msn.out_neighbors(user)
    ]


def save_msn(msn: MSN, path: str | Path) -> None:
    doc = {
        "version": 1,
        "alpha": list(msn.alpha),
        "users": sorted(msn.users),
        "layers": {
            kind: {
                "meeting_object_count": msn.layers[kind].meeting_object_count,
                "edges": sorted([i, j, s] for (i, j), s in msn.layers[kind].edges.items()),
            }
            for kind in LAYER_KINDS
        },
        "ties": sorted(
            [i, j, tie.strength, list(tie.layer_strengths)] for (i, j), tie in msn.ties.items()
        ),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")


def load_msn(path: str | Path) -> MSN:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != 1:
        raise MsnError(f"unsupported network version {doc.get('version')!r}")
    layers = {
        kind: RelationLayer(
            kind,
            {(i, j): s for i, j, s in payload["edges"]},
            meeting_object_count=payload["meeting_object_count"],
        )
        for kind, payload in doc["layers"].items()
    }
    ties = {
        (i, j): Tie(strength=s, layer_strengths=tuple(vec)) for i, j, s, vec in doc["ties"]
    }
    return MSN(users=set(doc["users"]), layers=layers, ties=ties, alpha=tuple(doc["alpha"]))
