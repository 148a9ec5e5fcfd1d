"""Person-to-person recommendation over the multidimensional network.

A candidate's raw value for a requesting user is the sum over layers of
(system weight + personal weight) times the layer strength, divided by
the strongest layer strength of that pair.  Candidates already on the
requester's contact list or blocked by them are filtered out, values of
already-viewed candidates are damped, and the presented window rotates
over a top pool so repeated requests see different slices.

Feedback moves the rater's personal weight vector toward the layers
that carried the recommended person (the credit vector), scaled by how
important the feedback activity was.  Personal vectors always stay in
[0, 1] and sum to 1; system weights are the population mean of the
personal vectors and are refreshed periodically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import MsnError
from .layers import N_LAYERS
from .network import MSN, UnknownUser

UNIFORM_WEIGHTS: tuple[float, ...] = (1.0 / N_LAYERS,) * N_LAYERS

DEFAULT_ACTIVITY_IMPORTANCE: dict[str, float] = {
    "ViewProfile": 0.1,
    "Comment": 0.5,
    "Favourite": 0.7,
    "AddContact": 1.0,
}
EXPLICIT_RATING = "ExplicitRating"


class NoRelation(MsnError):
    """The pair has no positive strength in any layer."""


class InvalidImportance(MsnError):
    """The feedback importance is outside [0, 1]."""


class CandidateState(Enum):
    FRESH = "Fresh"
    VIEWED = "Viewed"
    CONTACTED = "Contacted"
    BLOCKED = "Blocked"


@dataclass(frozen=True)
class FeedbackEvent:
    """One monitored reaction of a rater to a recommended person."""

    user: str
    target: str
    activity: str
    timestamp: float
    rating: float | None = None

    def __post_init__(self) -> None:
        if self.activity == EXPLICIT_RATING:
            if self.rating is None:
                raise MsnError("explicit rating feedback requires a rating")
        elif self.rating is not None:
            raise MsnError(f"{self.activity} feedback must not carry a rating")


@dataclass(frozen=True)
class WeightState:
    """System and per-user layer weights driving recommendation values."""

    system: tuple[float, ...] = UNIFORM_WEIGHTS
    personal: dict[str, tuple[float, ...]] = field(default_factory=dict)
    epsilon: float = 1e-6
    activity_importance: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ACTIVITY_IMPORTANCE)
    )

    def vector_for(self, user: str) -> tuple[float, ...]:
        """The user's personal vector; new users start at the system weights."""
        return self.personal.get(user, self.system)

    def with_vector(self, user: str, vector: tuple[float, ...]) -> "WeightState":
        personal = dict(self.personal)
        personal[user] = vector
        return replace(self, personal=personal)


def validate_weight_state(state: WeightState) -> None:
    """Check the invariants kept by adaptation and refresh."""
    if len(state.system) != N_LAYERS:
        raise MsnError("system weight vector must have one entry per layer")
    if any(not 0.0 <= w <= 1.0 for w in state.system):
        raise MsnError("system weights must lie in [0, 1]")
    for user, vector in state.personal.items():
        if len(vector) != N_LAYERS:
            raise MsnError(f"personal vector of {user!r} must have one entry per layer")
        if any(not 0.0 <= w <= 1.0 for w in vector):
            raise MsnError(f"personal weights of {user!r} must lie in [0, 1]")
        if abs(sum(vector) - 1.0) > 1e-9:
            raise MsnError(f"personal weights of {user!r} must sum to 1")
    for activity, importance in state.activity_importance.items():
        if not 0.0 <= importance <= 1.0:
            raise InvalidImportance(f"importance of {activity!r} must lie in [0, 1]")


@dataclass(frozen=True)
class RankConfig:
    """Knobs of the ranking pipeline."""

    view_penalty: float = 0.8
    pool_factor: int = 5
    normalization: str = "pair_max"  # or "layer_max"

    def __post_init__(self) -> None:
        if self.normalization not in ("pair_max", "layer_max"):
            raise MsnError(f"unknown normalization {self.normalization!r}")


@dataclass(frozen=True)
class RecommendationEntry:
    candidate: str
    value: float
    layer_contributions: tuple[float, ...]
    presented_count: int = 0
    state: CandidateState = CandidateState.FRESH


@dataclass(frozen=True)
class RecommendationList:
    user: str
    entries: tuple[RecommendationEntry, ...]
    rotation_offset: int
    pool_size: int


def _pair_strengths(msn: MSN, u_i: str, u_j: str) -> tuple[float, ...] | None:
    tie = msn.ties.get((u_i, u_j))
    return tie.layer_strengths if tie is not None else None


def recommendation_value(
    u_i: str,
    u_j: str,
    msn: MSN,
    weights: WeightState,
    normalization: str = "pair_max",
) -> float:
    """Aggregated similarity of u_j as seen from u_i.

    With pair_max normalization the divisor is the strongest layer
    strength of this pair; with layer_max each term is divided by the
    strongest strength found anywhere in its own layer.  Returns 0 when
    no layer connects the pair.
    """
    if u_i not in msn.users:
        raise UnknownUser(f"user {u_i!r} is not in the network")
    if u_j not in msn.users:
        raise UnknownUser(f"user {u_j!r} is not in the network")
    strengths = _pair_strengths(msn, u_i, u_j)
    if strengths is None:
        return 0.0
    personal = weights.vector_for(u_i)
    combined = [w_sys + w_usr for w_sys, w_usr in zip(weights.system, personal)]
    if normalization == "pair_max":
        peak = max(strengths)
        if peak <= 0.0:
            return 0.0
        return sum(w * s for w, s in zip(combined, strengths)) / peak
    if normalization == "layer_max":
        maxima = msn.layer_max_strengths()
        return sum(
            w * s / m for w, s, m in zip(combined, strengths, maxima) if m > 0.0
        )
    raise MsnError(f"unknown normalization {normalization!r}")


def contribution(u_i: str, u_j: str, msn: MSN) -> tuple[float, ...]:
    """Share of each layer in the total pairwise strength; sums to 1."""
    strengths = _pair_strengths(msn, u_i, u_j)
    if strengths is None:
        raise NoRelation(f"no relation from {u_i!r} to {u_j!r}")
    total = sum(strengths)
    if total <= 0.0:
        raise NoRelation(f"no positive strength from {u_i!r} to {u_j!r}")
    return tuple(s / total for s in strengths)


def rank(
    u_i: str,
    msn: MSN,
    weights: WeightState,
    history: Mapping[str, RecommendationEntry] | None = None,
    n: int = 10,
    rotation_offset: int = 0,
    config: RankConfig | None = None,
    exclude: Iterable[str] = (),
) -> RecommendationList:
    """Ranked, filtered, rotated window of candidates for ``u_i``.

    Candidates are the tie neighbors of the requester minus their
    contact list, minus blocked candidates, minus ``exclude`` (used by
    rating sessions to keep stages disjoint).  Values of viewed
    candidates are multiplied by view_penalty once per presentation.
    The window of ``n`` entries starts at ``rotation_offset`` (mod pool
    size) inside the pool of the pool_factor * n best candidates and
    wraps around, so consecutive offsets show different slices.
    """
    if u_i not in msn.users:
        raise UnknownUser(f"user {u_i!r} is not in the network")
    config = config or RankConfig()
    history = history or {}
    excluded = set(exclude)
    contacts = {j for (i, j) in msn.layers["c"].edges if i == u_i}

    scored: list[tuple[float, str, RecommendationEntry]] = []
    for candidate in msn.out_neighbors(u_i):
        if candidate in contacts or candidate in excluded:
            continue
        entry = history.get(candidate)
        state = entry.state if entry else CandidateState.FRESH
        presented = entry.presented_count if entry else 0
        if state is CandidateState.BLOCKED:
            continue
        value = recommendation_value(u_i, candidate, msn, weights, config.normalization)
        if state is CandidateState.VIEWED:
            value *= config.view_penalty ** presented
        scored.append(
            (value, candidate,
             RecommendationEntry(
                 candidate=candidate,
                 value=value,
                 layer_contributions=contribution(u_i, candidate, msn),
                 presented_count=presented,
                 state=state,
             ))
        )

    scored.sort(key=lambda item: (-item[0], item[1]))
    pool = [entry for _, _, entry in scored[: config.pool_factor * n]]
    if not pool:
        return RecommendationList(user=u_i, entries=(), rotation_offset=rotation_offset, pool_size=0)

    window_len = min(n, len(pool))
    start = rotation_offset % len(pool)
    window = tuple(pool[(start + k) % len(pool)] for k in range(window_len))
    return RecommendationList(
        user=u_i, entries=window, rotation_offset=rotation_offset, pool_size=len(pool)
    )


def feedback_importance(weights: WeightState, fb: FeedbackEvent) -> float:
    """The importance a feedback event carries, from its activity or rating."""
    if fb.activity == EXPLICIT_RATING:
        importance = fb.rating
    else:
        try:
            importance = weights.activity_importance[fb.activity]
        except KeyError:
            raise InvalidImportance(f"unknown activity {fb.activity!r}") from None
    if importance is None or not 0.0 <= importance <= 1.0:
        raise InvalidImportance(f"importance {importance!r} outside [0, 1]")
    return float(importance)


def adapt_weights(weights: WeightState, fb: FeedbackEvent, msn: MSN) -> WeightState:
    """Move the rater's personal weights toward the credited layers.

    Each layer's weight becomes
        (w * (1 + eps) + c * (a - w)) / denominator
    where c is the layer's contribution for the rated pair and a the
    feedback importance, and the resulting vector is renormalized to sum
    exactly 1 (the common denominator cancels under renormalization).
    Every entry provably stays in [0, 1].
    """
    credit = np.asarray(contribution(fb.user, fb.target, msn))
    importance = feedback_importance(weights, fb)
    old = np.asarray(weights.vector_for(fb.user))

    raw = old * (1.0 + weights.epsilon) + credit * (importance - old)
    total = float(raw.sum())
    if total <= 0.0:
        # degenerate corner: all mass on one layer with importance 0 and eps 0
        return weights.with_vector(fb.user, weights.vector_for(fb.user))
    new = raw / total
    new = np.clip(new, 0.0, 1.0)
    new = new / new.sum()
    return weights.with_vector(fb.user, tuple(float(w) for w in new))


def apply_feedback_batch(
    weights: WeightState, events: Iterable[FeedbackEvent], msn: MSN
) -> WeightState:
    """Deferred application of queued feedback.

    Events are grouped per rater and applied in timestamp order (arrival
    order breaks ties), which is the ordering contract immediate
    application follows; raters' vectors are independent, so the final
    state equals the immediate, per-event application.
    """
    per_user: dict[str, list[tuple[float, int, FeedbackEvent]]] = {}
    for arrival, event in enumerate(events):
        per_user.setdefault(event.user, []).append((event.timestamp, arrival, event))
    for queued in per_user.values():
        queued.sort(key=lambda item: (item[0], item[1]))
        for _, _, event in queued:
            weights = adapt_weights(weights, event, msn)
    return weights


def refresh_system_weights(weights: WeightState) -> WeightState:
    """Reset system weights to the mean of all personal vectors."""
    if not weights.personal:
        raise MsnError("no personal vectors to average")
    stacked = np.asarray(list(weights.personal.values()))
    mean = stacked.mean(axis=0)
    return replace(weights, system=tuple(float(w) for w in mean))


def save_weights(weights: WeightState, path: str | Path) -> None:
    doc = {
        "version": 1,
        "epsilon": weights.epsilon,
        "activity_importance": weights.activity_importance,
        "system": list(weights.system),
        "personal": {user: list(vec) for user, vec in sorted(weights.personal.items())},
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")


def load_weights(path: str | Path) -> WeightState:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != 1:
        raise MsnError(f"unsupported weight document version {doc.get('version')!r}")
    state = WeightState(
        system=tuple(doc["system"]),
        personal={user: tuple(vec) for user, vec in doc["personal"].items()},
        epsilon=doc["epsilon"],
        activity_importance=dict(doc["activity_importance"]),
    )
    validate_weight_state(state)
    return state
