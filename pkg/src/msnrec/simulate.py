"""Simulated-feedback experiments over a network.

The harness replays the two-stage rating protocol: every simulated
rater starts from uniform personal weights, receives a ranked list,
rates each entry, the ratings adapt the rater's weights, and the next
stage presents a fresh list that excludes everything shown before.  A
rater's rating of a candidate is the dot product of the rater's hidden
layer preference with the candidate's contribution vector, so raters
consistently reward candidates reached through their preferred layers.

A deterministic synthetic event log generator is included so the
experiment is runnable without any external data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import MsnError
from .events import ActivityEvent, EventKind
from .layers import LAYER_INDEX, LAYER_KINDS, N_LAYERS, build_all_layers
from .network import MSN, AggregationConfig, aggregate
from .recommend import (
    EXPLICIT_RATING,
    FeedbackEvent,
    RankConfig,
    RecommendationEntry,
    UNIFORM_WEIGHTS,
    WeightState,
    adapt_weights,
    rank,
)
from .store import build_store


class InsufficientCandidates(MsnError):
    """A rater's eligible pool cannot fill every stage."""


@dataclass(frozen=True)
class RaterProfile:
    """A simulated rater with a hidden preference over layers."""

    user: str
    preference: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.preference) != N_LAYERS:
            raise MsnError("preference must have one entry per layer")
        if any(p < 0 for p in self.preference):
            raise MsnError("preference entries must be nonnegative")
        if sum(self.preference) <= 0:
            raise MsnError("preference must have positive mass")


@dataclass(frozen=True)
class StageOutcome:
    user: str
    stage: int
    presented: tuple[str, ...]
    ratings: dict[str, float]
    mean_rating: float
    weights_after: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentReport:
    n: int
    rounds: int
    outcomes: tuple[StageOutcome, ...]
    stage_mean_ratings: tuple[float, ...]
    initial_weights: tuple[float, ...]

    def mean_weight_after_stage(self, stage: int, kind: str) -> float:
        idx = LAYER_INDEX[kind]
        values = [o.weights_after[idx] for o in self.outcomes if o.stage == stage]
        if not values:
            raise MsnError(f"no outcomes recorded for stage {stage}")
        return sum(values) / len(values)


def biased_preference(kind: str, bias: float = 1.0) -> tuple[float, ...]:
    """Preference with ``bias`` mass on one layer, the rest spread evenly."""
    if not 0.0 < bias <= 1.0:
        raise MsnError("bias must lie in (0, 1]")
    rest = (1.0 - bias) / (N_LAYERS - 1)
    return tuple(bias if k == kind else rest for k in LAYER_KINDS)


def simulated_rating(profile: RaterProfile, contributions: tuple[float, ...]) -> float:
    value = sum(p * c for p, c in zip(profile.preference, contributions))
    norm = sum(profile.preference)
    return min(1.0, max(0.0, value / norm))


def eligible_pool_size(msn: MSN, user: str) -> int:
    contacts = {j for (i, j) in msn.layers["c"].edges if i == user}
    return sum(1 for j in msn.out_neighbors(user) if j not in contacts)


def run_experiment(
    msn: MSN,
    profiles: list[RaterProfile],
    n: int = 5,
    rounds: int = 2,
    epsilon: float = 1e-6,
    config: RankConfig | None = None,
) -> ExperimentReport:
    """Run the staged rating protocol for every profile.

    Raters whose filtered candidate pool is smaller than rounds * n
    cannot complete every stage and raise InsufficientCandidates before
    anything runs.
    """
    if rounds < 1:
        raise MsnError("at least one round is required")
    config = config or RankConfig()
    for profile in profiles:
        if eligible_pool_size(msn, profile.user) < rounds * n:
            raise InsufficientCandidates(
                f"rater {profile.user!r} has fewer than {rounds * n} eligible candidates"
            )

    outcomes: list[StageOutcome] = []
    for profile in profiles:
        weights = WeightState(epsilon=epsilon)
        weights = weights.with_vector(profile.user, UNIFORM_WEIGHTS)
        shown: set[str] = set()
        clock = 0.0
        for stage in range(1, rounds + 1):
            listing = rank(
                profile.user, msn, weights, n=n, rotation_offset=0,
                config=config, exclude=shown,
            )
            ratings: dict[str, float] = {}
            for entry in listing.entries:
                ratings[entry.candidate] = simulated_rating(profile, entry.layer_contributions)
            for entry in listing.entries:
                clock += 1.0
                fb = FeedbackEvent(
                    user=profile.user,
                    target=entry.candidate,
                    activity=EXPLICIT_RATING,
                    rating=ratings[entry.candidate],
                    timestamp=clock,
                )
                weights = adapt_weights(weights, fb, msn)
            shown.update(ratings)
            mean = sum(ratings.values()) / len(ratings) if ratings else 0.0
            outcomes.append(
                StageOutcome(
                    user=profile.user,
                    stage=stage,
                    presented=tuple(e.candidate for e in listing.entries),
                    ratings=ratings,
                    mean_rating=mean,
                    weights_after=weights.vector_for(profile.user),
                )
            )

    stage_means = []
    for stage in range(1, rounds + 1):
        stage_outcomes = [o for o in outcomes if o.stage == stage]
        stage_means.append(
            sum(o.mean_rating for o in stage_outcomes) / len(stage_outcomes)
            if stage_outcomes else 0.0
        )

    return ExperimentReport(
        n=n,
        rounds=rounds,
        outcomes=tuple(outcomes),
        stage_mean_ratings=tuple(stage_means),
        initial_weights=UNIFORM_WEIGHTS,
    )


def synthetic_events(
    seed: int,
    n_users: int = 40,
    n_objects: int = 60,
    n_tags: int = 14,
    n_groups: int = 8,
    contact_adds: int = 100,
    tag_uses: int = 120,
    group_joins: int = 55,
    favourite_marks: int = 100,
    comments: int = 120,
) -> list[ActivityEvent]:
    """A deterministic synthetic activity log with rich cross-layer structure.

    A handful of hub users attract a large share of the contact adds,
    which produces plenty of two-hop contact paths; tags, groups,
    favourites and comments are spread with mild popularity skew.
    """
    rng = random.Random(seed)
    users = [f"u{i:02d}" for i in range(n_users)]
    hubs = users[: max(3, n_users // 8)]
    tags = [f"tag{i}" for i in range(n_tags)]
    groups = [f"g{i}" for i in range(n_groups)]

    events: list[ActivityEvent] = []
    t = 1_500_000_000.0
    counter = 0

    def push(kind: EventKind, actor: str, **fields: str) -> None:
        nonlocal t, counter
        t += 60.0
        counter += 1
        events.append(
            ActivityEvent(event_id=f"e{counter:05d}", kind=kind, actor=actor, timestamp=t, **fields)
        )

    objects: list[str] = []
    authors: dict[str, str] = {}
    for i in range(n_objects):
        author = rng.choice(users)
        obj = f"o{i:03d}"
        objects.append(obj)
        authors[obj] = author
        push(EventKind.UPLOAD, author, object_id=obj)

    seen_contacts: set[tuple[str, str]] = set()
    for _ in range(contact_adds):
        actor = rng.choice(users)
        target = rng.choice(hubs) if rng.random() < 0.5 else rng.choice(users)
        if actor == target or (actor, target) in seen_contacts:
            continue
        seen_contacts.add((actor, target))
        push(EventKind.CONTACT_ADD, actor, target_user=target)

    for _ in range(tag_uses):
        actor = rng.choice(users)
        tag = rng.choice(tags[: n_tags // 2]) if rng.random() < 0.6 else rng.choice(tags)
        push(EventKind.TAG_USE, actor, object_id=rng.choice(objects), tag=tag)

    for _ in range(group_joins):
        push(EventKind.GROUP_JOIN, rng.choice(users), group_id=rng.choice(groups))

    for _ in range(favourite_marks):
        push(EventKind.FAVOURITE_MARK, rng.choice(users), object_id=rng.choice(objects))

    for _ in range(comments):
        obj = rng.choice(objects[: n_objects // 2]) if rng.random() < 0.6 else rng.choice(objects)
        push(EventKind.COMMENT, rng.choice(users), object_id=obj)

    return events


def synthetic_msn(seed: int, alpha: AggregationConfig | None = None, **kwargs) -> MSN:
    """Build a network straight from a synthetic log."""
    events = synthetic_events(seed, **kwargs)
    cutoff = max(e.timestamp for e in events)
    store = build_store(events, cutoff)
    return aggregate(build_all_layers(store), alpha or AggregationConfig())


def pick_raters(
    msn: MSN, count: int, n: int, rounds: int = 2
) -> list[str]:
    """Users with the largest eligible pools, enough for every stage."""
    sized = sorted(
        ((eligible_pool_size(msn, user), user) for user in msn.users),
        key=lambda item: (-item[0], item[1]),
    )
    chosen = [user for size, user in sized[:count] if size >= rounds * n]
    if len(chosen) < count:
        raise InsufficientCandidates(
            f"only {len(chosen)} of {count} requested raters have {rounds * n} candidates"
        )
    return chosen
