import pytest

from msnrec.errors import MsnError
from msnrec.layers import LAYER_INDEX, LAYER_KINDS, RelationLayer
from msnrec.network import (
    AggregationConfig,
    UnknownUser,
    aggregate,
    load_msn,
    save_msn,
    tie_neighbors,
)
from conftest import events_to_msn, ev
from generators import random_log
from oracle import brute_layers, brute_ties
from msnrec.events import EventKind

K = EventKind


def empty_layers(**overrides):
    layers = {kind: RelationLayer(kind, {}) for kind in LAYER_KINDS}
    layers.update(overrides)
    return layers


def test_single_edge_uniform_alpha():
    layers = empty_layers(c=RelationLayer("c", {("u1", "u2"): 0.55}))
    msn = aggregate(layers)
    assert msn.ties[("u1", "u2")].strength == pytest.approx(0.05)
    assert msn.users == {"u1", "u2"}


def test_two_layer_edge_uniform_alpha():
    layers = empty_layers(
        c=RelationLayer("c", {("u1", "u2"): 1.0}),
        t=RelationLayer("t", {("u1", "u2"): 1.0}),
    )
    msn = aggregate(layers)
    assert msn.ties[("u1", "u2")].strength == pytest.approx(2 / 11)
    vector = msn.ties[("u1", "u2")].layer_strengths
    assert vector[LAYER_INDEX["c"]] == 1.0
    assert vector[LAYER_INDEX["t"]] == 1.0
    assert sum(1 for s in vector if s > 0) == 2


def test_fixture_ties_match_brute_force(small_msn):
    events, msn = small_msn
    cutoff = max(e.timestamp for e in events)
    reference = brute_ties(brute_layers(events, cutoff), (1.0,) * 11)
    assert set(msn.ties) == set(reference)
    for pair, (strength, vector) in reference.items():
        assert msn.ties[pair].strength == pytest.approx(strength, abs=1e-12)
        assert msn.ties[pair].layer_strengths == pytest.approx(vector, abs=1e-12)


def test_alpha_scaling_leaves_ties_unchanged():
    for seed in (1, 5):
        events = random_log(seed)
        base = events_to_msn(events)
        scaled = events_to_msn(events, alpha=(7.5,) * 11)
        assert set(base.ties) == set(scaled.ties)
        for pair in base.ties:
            assert scaled.ties[pair].strength == pytest.approx(
                base.ties[pair].strength, abs=1e-12)


def test_tie_strength_bounds():
    for seed in range(10):
        msn = events_to_msn(random_log(seed))
        total = sum(msn.alpha)
        for tie in msn.ties.values():
            present = [s for s in tie.layer_strengths if s > 0]
            assert present
            assert 0.0 < tie.strength <= max(present)
            assert tie.strength >= min(present) * (1.0 / total) - 1e-12


def test_tie_count_bounded_by_layer_sum():
    for seed in range(10):
        msn = events_to_msn(random_log(seed))
        layer_total = sum(len(layer.edges) for layer in msn.layers.values())
        assert len(msn.ties) <= layer_total


def test_zero_alpha_layer_keeps_tie_existence():
    layers = empty_layers(c=RelationLayer("c", {("u1", "u2"): 1.0}))
    alpha = tuple(0.0 if kind == "c" else 1.0 for kind in LAYER_KINDS)
    msn = aggregate(layers, AggregationConfig(alpha=alpha))
    assert ("u1", "u2") in msn.ties
    assert msn.ties[("u1", "u2")].strength == 0.0


def test_all_zero_alpha_rejected():
    with pytest.raises(MsnError):
        AggregationConfig(alpha=(0.0,) * 11)


def test_isolated_users_pruned():
    events = [
        ev("e1", K.UPLOAD, "u1", 1, object_id="o1"),  # nobody touches o1
        ev("e2", K.CONTACT_ADD, "u2", 2, target_user="u3"),
    ]
    msn = events_to_msn(events)
    assert msn.users == {"u2", "u3"}
    with pytest.raises(UnknownUser):
        tie_neighbors(msn, "u1")


def test_tie_neighbors_single_contact():
    events = [ev("e1", K.CONTACT_ADD, "u1", 1, target_user="u2")]
    msn = events_to_msn(events)
    neighbors = tie_neighbors(msn, "u1")
    assert [n.neighbor for n in neighbors] == ["u2"]
    assert neighbors[0].layer_strengths[LAYER_INDEX["c"]] == 1.0


def test_tie_neighbors_match_layer_dumps(small_msn):
    events, msn = small_msn
    for user in sorted(msn.users):
        neighbors = tie_neighbors(msn, user)
        expected = {j for kind in LAYER_KINDS
                    for (i, j) in msn.layers[kind].edges if i == user}
        assert {n.neighbor for n in neighbors} == expected


def test_msn_round_trip(tmp_path, small_msn):
    _, msn = small_msn
    path = tmp_path / "msn.json"
    save_msn(msn, path)
    loaded = load_msn(path)
    assert loaded.users == msn.users
    assert loaded.alpha == msn.alpha
    assert loaded.ties == msn.ties
    for kind in LAYER_KINDS:
        assert loaded.layers[kind].edges == msn.layers[kind].edges
        assert loaded.layers[kind].meeting_object_count == msn.layers[kind].meeting_object_count
