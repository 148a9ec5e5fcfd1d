from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from msnrec.events import ActivityEvent, EventKind
from msnrec.layers import build_all_layers
from msnrec.network import AggregationConfig, aggregate
from msnrec.store import build_store

FIXTURES = Path(__file__).parent / "fixtures"


def ev(event_id, kind, actor, timestamp, **fields) -> ActivityEvent:
    return ActivityEvent(event_id=event_id, kind=kind, actor=actor,
                         timestamp=timestamp, **fields)


def events_to_msn(events, cutoff=None, alpha=None):
    if cutoff is None:
        cutoff = max(e.timestamp for e in events)
    store = build_store(events, cutoff)
    layers = build_all_layers(store)
    cfg = AggregationConfig(alpha=alpha) if alpha else AggregationConfig()
    return aggregate(layers, cfg)


@pytest.fixture
def small_msn():
    """Ten-user network touching every layer kind."""
    K = EventKind
    t = iter(range(100, 100_000, 10))
    events = [
        # contacts: u0 -> {u1, u2}, u1 -> {u3}, u2 -> {u3}, u3 -> {u0}
        ev("c1", K.CONTACT_ADD, "u0", next(t), target_user="u1"),
        ev("c2", K.CONTACT_ADD, "u0", next(t), target_user="u2"),
        ev("c3", K.CONTACT_ADD, "u1", next(t), target_user="u3"),
        ev("c4", K.CONTACT_ADD, "u2", next(t), target_user="u3"),
        ev("c5", K.CONTACT_ADD, "u3", next(t), target_user="u0"),
        # uploads
        ev("p1", K.UPLOAD, "u4", next(t), object_id="o1"),
        ev("p2", K.UPLOAD, "u4", next(t), object_id="o2"),
        ev("p3", K.UPLOAD, "u5", next(t), object_id="o3"),
        ev("p4", K.UPLOAD, "u6", next(t), object_id="o4"),
        # tags: u4/u5 share "sunset", u6 alone on "macro"
        ev("t1", K.TAG_USE, "u4", next(t), object_id="o1", tag="sunset"),
        ev("t2", K.TAG_USE, "u5", next(t), object_id="o3", tag="Sunset"),
        ev("t3", K.TAG_USE, "u6", next(t), object_id="o4", tag="macro"),
        ev("t4", K.TAG_USE, "u4", next(t), object_id="o2", tag="beach"),
        ev("t5", K.TAG_USE, "u5", next(t), object_id="o3", tag="beach"),
        # groups: g1 = {u0, u7}, g2 = {u7} alone (ineligible)
        ev("g1", K.GROUP_JOIN, "u0", next(t), group_id="g1"),
        ev("g2", K.GROUP_JOIN, "u7", next(t), group_id="g1"),
        ev("g3", K.GROUP_JOIN, "u7", next(t), group_id="g2"),
        # favourites: u7, u8 both favourite o1 (author u4); u8 favourites o3
        ev("f1", K.FAVOURITE_MARK, "u7", next(t), object_id="o1"),
        ev("f2", K.FAVOURITE_MARK, "u8", next(t), object_id="o1"),
        ev("f3", K.FAVOURITE_MARK, "u8", next(t), object_id="o3"),
        # comments: u8, u9 comment o4 (author u6); u9 comments o1 too
        ev("m1", K.COMMENT, "u8", next(t), object_id="o4"),
        ev("m2", K.COMMENT, "u9", next(t), object_id="o4"),
        ev("m3", K.COMMENT, "u9", next(t), object_id="o1"),
    ]
    return events, events_to_msn(events)
