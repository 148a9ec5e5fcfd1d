"""Relation-layer extraction from an activity snapshot.

Eleven directed layers are derived, identified by short lowercase kinds
in a fixed order used everywhere a per-layer vector appears:

    c    direct contact (lister to listee)
    rc   reversed contact (listee back to lister)
    coc  contact of a contact, exactly two hops through the lister's list
    t    shared tag usage
    g    shared group membership through published photos
    ff   co-favouriting of the same photos
    fa   favouriter to the authors of the marked photos
    af   author to the users who favourited the author's photos
    oo   co-commenting of the same photos
    ao   author to the users who commented the author's photos
    oa   commenter to the authors of the commented photos

Strengths always lie in (0, 1]: the numerator counts items shared with
the other user and the denominator counts the source user's own
qualifying items, so each edge reads as "the share of my activity of
this kind that points at you".  Zero-strength edges are never stored and
there are no self edges.

Self-directed activity (favouriting or commenting one's own photo) never
pairs two users, so it is excluded from all cross-user counters; it does
still count toward the actor's own activity totals used as denominators.

When a DecayConfig is given, each qualifying item is weighted by
1 / lambda**periods instead of 1, where periods is the number of whole
decay periods between the item's first occurrence and the reference
time.  Items shared by a pair weigh the smaller of the two endpoint
weights, and author-side totals weigh each photo by its freshest
qualifying activity; both choices keep every strength inside (0, 1]
for any decay setting.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import MsnError
from .store import ActivityStore

LAYER_KINDS: tuple[str, ...] = ("c", "rc", "coc", "t", "g", "ff", "fa", "af", "oo", "ao", "oa")
LAYER_INDEX: dict[str, int] = {kind: i for i, kind in enumerate(LAYER_KINDS)}
N_LAYERS = len(LAYER_KINDS)

# layers whose edges are induced by a meeting object (tag, group or photo)
OBJECT_BACKED_KINDS = frozenset(("t", "g", "ff", "fa", "af", "oo", "ao", "oa"))


class ActivityInFuture(UserWarning):
    """An activity is dated after the decay reference time."""


@dataclass(frozen=True)
class DecayConfig:
    """Age-weighting of activity counts.

    ``lam`` is the decay base (> 1), ``period_seconds`` the length of one
    decay period, and ``reference_time`` the instant ages are measured
    from.  With ``enabled`` false the config is inert and every activity
    counts exactly 1.
    """

    lam: float
    period_seconds: float
    reference_time: float
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.enabled and not self.lam > 1.0:
            raise MsnError(f"decay base must be > 1, got {self.lam}")
        if self.period_seconds <= 0:
            raise MsnError(f"decay period must be positive, got {self.period_seconds}")


@dataclass(frozen=True)
class RelationLayer:
    """A directed, real-weighted sparse edge set of one relation kind."""

    kind: str
    edges: dict[tuple[str, str], float]
    meeting_object_count: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in LAYER_INDEX:
            raise MsnError(f"unknown layer kind {self.kind!r}")


def decayed_count(timestamps: Iterable[float], cfg: DecayConfig) -> float:
    """Age-weighted count of activities: the sum of 1 / lam**periods.

    Activities dated after the reference time are skipped and reported
    with an ActivityInFuture warning.
    """
    if not cfg.enabled:
        total = 0.0
        for t in timestamps:
            total += 1.0
        return total
    total = 0.0
    for t in timestamps:
        if t > cfg.reference_time:
            warnings.warn(
                f"activity at {t} is after reference time {cfg.reference_time}; skipped",
                ActivityInFuture,
                stacklevel=2,
            )
            continue
        periods = max(0, math.floor((cfg.reference_time - t) / cfg.period_seconds))
        total += cfg.lam ** -periods
    return total


def _weight_fn(store: ActivityStore, decay: DecayConfig | None) -> Callable[[float], float]:
    if decay is None or not decay.enabled:
        return lambda t: 1.0
    if decay.reference_time < store.cutoff:
        raise MsnError(
            "decay reference time predates the snapshot cutoff; "
            "activities would fall after the reference"
        )
    lam = decay.lam
    period = decay.period_seconds
    ref = decay.reference_time
    # floor at the smallest normal double: decay weakens an edge but must
    # never erase it, even when lam ** -periods underflows to zero
    floor = 2.2250738585072014e-308

    def weight(t: float) -> float:
        periods = max(0, math.floor((ref - t) / period))
        return max(lam ** -periods, floor)

    return weight


def _edge(strength: float) -> float:
    # guards against float drift only; exact arithmetic never exceeds 1
    return min(strength, 1.0)


def build_contact_layers(
    store: ActivityStore, decay: DecayConfig | None = None
) -> tuple[RelationLayer, RelationLayer, RelationLayer]:
    """Contact, reversed-contact and contact-of-contact layers.

    An edge (i, j) in the contact layer carries the weight of the list
    entry over the total weight of i's list, so each lister's outgoing
    strengths sum to exactly 1.  The reversed layer is the same edge seen
    from the listee.  The two-hop layer counts distinct middlemen k with
    i listing k and k listing j (j may also be a direct contact, never i
    itself), over the size of i's own list.
    """
    weight = _weight_fn(store, decay)
    totals: dict[str, float] = {}
    for lister, contacts in store.contact_lists.items():
        totals[lister] = sum(weight(t) for t in contacts.values())

    c_edges: dict[tuple[str, str], float] = {}
    rc_edges: dict[tuple[str, str], float] = {}
    for lister, contacts in store.contact_lists.items():
        total = totals[lister]
        if total <= 0:
            continue
        for target, t in contacts.items():
            s = _edge(weight(t) / total)
            c_edges[(lister, target)] = s
            rc_edges[(target, lister)] = s

    coc_edges: dict[tuple[str, str], float] = {}
    for i, contacts in store.contact_lists.items():
        total = totals[i]
        if total <= 0:
            continue
        witnessed: dict[str, float] = {}
        for k, t_ik in contacts.items():
            w_ik = weight(t_ik)
            for j, t_kj in store.contact_lists.get(k, {}).items():
                if j == i:
                    continue
                witnessed[j] = witnessed.get(j, 0.0) + min(w_ik, weight(t_kj))
        for j, count in witnessed.items():
            coc_edges[(i, j)] = _edge(count / total)

    return (
        RelationLayer("c", c_edges),
        RelationLayer("rc", rc_edges),
        RelationLayer("coc", coc_edges),
    )


def _shared_item_layer(
    kind: str,
    holders: dict[str, dict[str, float]],
    weight: Callable[[float], float],
) -> RelationLayer:
    """Generic equal-roles layer over user -> {item: first time} maps.

    Only items held by at least two users qualify.  The strength from i
    to j is the weight of their common items over the weight of all of
    i's qualifying items; common items weigh the smaller endpoint
    weight.
    """
    by_item: dict[str, list[tuple[str, float]]] = {}
    for user, items in holders.items():
        for item, t in items.items():
            by_item.setdefault(item, []).append((user, t))
    shared = {item: users for item, users in by_item.items() if len(users) >= 2}

    totals: dict[str, float] = {}
    for item, users in shared.items():
        for user, t in users:
            totals[user] = totals.get(user, 0.0) + weight(t)

    common: dict[tuple[str, str], float] = {}
    for item, users in shared.items():
        for a in range(len(users)):
            user_a, t_a = users[a]
            w_a = weight(t_a)
            for b in range(a + 1, len(users)):
                user_b, t_b = users[b]
                w = min(w_a, weight(t_b))
                common[(user_a, user_b)] = common.get((user_a, user_b), 0.0) + w
                common[(user_b, user_a)] = common.get((user_b, user_a), 0.0) + w

    edges = {
        (i, j): _edge(count / totals[i])
        for (i, j), count in common.items()
        if totals.get(i, 0.0) > 0
    }
    return RelationLayer(kind, edges, meeting_object_count=len(shared))


def build_tag_layer(store: ActivityStore, decay: DecayConfig | None = None) -> RelationLayer:
    """Shared-tag layer; only tags used by at least two users count.

    How many photos carry a given tag does not matter, a user either
    used the tag or did not.
    """
    return _shared_item_layer("t", store.user_tags, _weight_fn(store, decay))


def build_group_layer(store: ActivityStore, decay: DecayConfig | None = None) -> RelationLayer:
    """Shared-group layer; only groups with more than one member count."""
    inverted: dict[str, dict[str, float]] = {}
    for group, members in store.group_members.items():
        if len(members) < 2:
            continue
        for user, t in members.items():
            inverted.setdefault(user, {})[group] = t
    return _shared_item_layer("g", inverted, _weight_fn(store, decay))


def _marks_by_object(marks: dict[str, dict[str, float]]) -> dict[str, dict[str, float]]:
    by_object: dict[str, dict[str, float]] = {}
    for user, objects in marks.items():
        for obj, t in objects.items():
            by_object.setdefault(obj, {})[user] = t
    return by_object


def _engagement_layers(
    kinds: tuple[str, str, str],
    actor_marks: dict[str, dict[str, float]],
    authors: dict[str, str],
    weight: Callable[[float], float],
) -> tuple[RelationLayer, RelationLayer, RelationLayer]:
    """Co-action, actor-to-author and author-to-actor layers.

    ``actor_marks`` maps each user to the objects they favourited or
    commented.  Works identically for favourites (ff, fa, af) and
    comments (oo, oa, ao): the first kind pairs users acting on a common
    object, the second points from the actor to the object's author, and
    the third is the author's view of the same fact.
    """
    co_kind, actor_to_author_kind, author_to_actor_kind = kinds

    # own activity totals; self-directed marks stay in the denominator
    n_own = {user: sum(weight(t) for t in objects.values()) for user, objects in actor_marks.items()}

    by_object = _marks_by_object(actor_marks)

    co_counts: dict[tuple[str, str], float] = {}
    co_objects: set[str] = set()
    pair_actor_author: dict[tuple[str, str], float] = {}
    cross_objects: set[str] = set()
    best_per_object: dict[str, float] = {}

    for obj, marks in by_object.items():
        author = authors.get(obj)
        others = [(u, t) for u, t in marks.items() if u != author]
        if len(others) >= 2:
            co_objects.add(obj)
            for a in range(len(others)):
                user_a, t_a = others[a]
                w_a = weight(t_a)
                for b in range(a + 1, len(others)):
                    user_b, t_b = others[b]
                    w = min(w_a, weight(t_b))
                    co_counts[(user_a, user_b)] = co_counts.get((user_a, user_b), 0.0) + w
                    co_counts[(user_b, user_a)] = co_counts.get((user_b, user_a), 0.0) + w
        if author is not None and others:
            cross_objects.add(obj)
            best = 0.0
            for user, t in others:
                w = weight(t)
                pair_actor_author[(user, author)] = pair_actor_author.get((user, author), 0.0) + w
                best = max(best, w)
            best_per_object[obj] = best

    # per-author total: each touched photo weighs its freshest cross-user activity
    n_author: dict[str, float] = {}
    for obj, best in best_per_object.items():
        author = authors[obj]
        n_author[author] = n_author.get(author, 0.0) + best

    co_edges = {
        (i, j): _edge(count / n_own[i])
        for (i, j), count in co_counts.items()
        if n_own.get(i, 0.0) > 0
    }
    actor_to_author_edges = {
        (actor, author): _edge(count / n_own[actor])
        for (actor, author), count in pair_actor_author.items()
        if n_own.get(actor, 0.0) > 0
    }
    author_to_actor_edges = {
        (author, actor): _edge(count / n_author[author])
        for (actor, author), count in pair_actor_author.items()
        if n_author.get(author, 0.0) > 0
    }

    return (
        RelationLayer(co_kind, co_edges, meeting_object_count=len(co_objects)),
        RelationLayer(actor_to_author_kind, actor_to_author_edges, meeting_object_count=len(cross_objects)),
        RelationLayer(author_to_actor_kind, author_to_actor_edges, meeting_object_count=len(cross_objects)),
    )


def build_favourite_layers(
    store: ActivityStore, decay: DecayConfig | None = None
) -> tuple[RelationLayer, RelationLayer, RelationLayer]:
    """Co-favourite, favouriter-to-author and author-to-favouriter layers."""
    ff, fa, af = _engagement_layers(
        ("ff", "fa", "af"), store.favourites, store.photo_authors, _weight_fn(store, decay)
    )
    return ff, fa, af


def build_opinion_layers(
    store: ActivityStore, decay: DecayConfig | None = None
) -> tuple[RelationLayer, RelationLayer, RelationLayer]:
    """Co-comment, commenter-to-author and author-to-commenter layers."""
    commenter_marks: dict[str, dict[str, float]] = {}
    for obj, commenters in store.comments.items():
        for user, t in commenters.items():
            commenter_marks.setdefault(user, {})[obj] = t
    oo, oa, ao = _engagement_layers(
        ("oo", "oa", "ao"), commenter_marks, store.photo_authors, _weight_fn(store, decay)
    )
    return oo, ao, oa


def build_all_layers(
    store: ActivityStore, decay: DecayConfig | None = None
) -> dict[str, RelationLayer]:
    """All eleven layers keyed by kind, in canonical order."""
    c, rc, coc = build_contact_layers(store, decay)
    t = build_tag_layer(store, decay)
    g = build_group_layer(store, decay)
    ff, fa, af = build_favourite_layers(store, decay)
    oo, ao, oa = build_opinion_layers(store, decay)
    by_kind = {layer.kind: layer for layer in (c, rc, coc, t, g, ff, fa, af, oo, ao, oa)}
    return {kind: by_kind[kind] for kind in LAYER_KINDS}
