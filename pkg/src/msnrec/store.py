"""Canonical activity snapshot built from an event log.

A store collects, per snapshot cutoff, everything the layer extractors
need: contact lists, photo authorship, tag usage, group membership,
favourite marks and comments.  Each qualification keeps the timestamp of
its first occurrence so extraction can optionally age-weight activity.
Repeated identical activities (re-adding a contact, re-tagging with the
same tag, commenting the same photo twice) are idempotent.

A built store is immutable by convention and safe to share across
threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import MsnError
from .events import ActivityEvent, EventKind, normalize_tag


class UnknownObject(MsnError):
    """A favourite, comment or tag references an object with no prior upload."""


class SelfContact(MsnError):
    """A contact add points at the actor."""


class ConflictingUpload(MsnError):
    """An object id was uploaded again under a different author."""


@dataclass
class ActivityStore:
    """Snapshot of all activity at or before ``cutoff``."""

    cutoff: float
    users: set[str] = field(default_factory=set)
    # lister -> {target: first add time}; insertion order preserves list order
    contact_lists: dict[str, dict[str, float]] = field(default_factory=dict)
    photo_authors: dict[str, str] = field(default_factory=dict)
    photo_tags: dict[str, set[str]] = field(default_factory=dict)
    # user -> {tag: first use time}, tags normalized
    user_tags: dict[str, dict[str, float]] = field(default_factory=dict)
    # group -> {member: first join time}
    group_members: dict[str, dict[str, float]] = field(default_factory=dict)
    # user -> {object: first mark time}
    favourites: dict[str, dict[str, float]] = field(default_factory=dict)
    # object -> {commenter: first comment time}
    comments: dict[str, dict[str, float]] = field(default_factory=dict)


def build_store(events: Iterable[ActivityEvent], cutoff: float) -> ActivityStore:
    """Assemble a snapshot from events at or before ``cutoff``.

    Events are replayed in timestamp order (uploads first within a
    timestamp), so file order never matters as long as references do not
    precede the referenced upload in time.
    """
    store = ActivityStore(cutoff=cutoff)
    eligible = [e for e in events if e.timestamp <= cutoff]
    ordered = sorted(
        enumerate(eligible),
        key=lambda pair: (pair[1].timestamp, pair[1].kind is not EventKind.UPLOAD, pair[0]),
    )
    for _, event in ordered:
        _apply(store, event)
    return store


def _require_object(store: ActivityStore, event: ActivityEvent) -> str:
    object_id = event.object_id
    if object_id not in store.photo_authors:
        raise UnknownObject(
            f"event {event.event_id!r}: {event.kind.value} references object "
            f"{object_id!r} before any upload of it"
        )
    return object_id


def _apply(store: ActivityStore, event: ActivityEvent) -> None:
    actor = event.actor
    store.users.add(actor)
    if event.kind is EventKind.CONTACT_ADD:
        target = event.target_user
        if target == actor:
            raise SelfContact(f"event {event.event_id!r}: contact add points at the actor")
        store.users.add(target)
        store.contact_lists.setdefault(actor, {}).setdefault(target, event.timestamp)
    elif event.kind is EventKind.UPLOAD:
        object_id = event.object_id
        known = store.photo_authors.get(object_id)
        if known is not None and known != actor:
            raise ConflictingUpload(
                f"event {event.event_id!r}: object {object_id!r} already uploaded by {known!r}"
            )
        store.photo_authors[object_id] = actor
    elif event.kind is EventKind.TAG_USE:
        object_id = _require_object(store, event)
        tag = normalize_tag(event.tag)
        store.user_tags.setdefault(actor, {}).setdefault(tag, event.timestamp)
        store.photo_tags.setdefault(object_id, set()).add(tag)
    elif event.kind is EventKind.GROUP_JOIN:
        store.group_members.setdefault(event.group_id, {}).setdefault(actor, event.timestamp)
    elif event.kind is EventKind.FAVOURITE_MARK:
        object_id = _require_object(store, event)
        store.favourites.setdefault(actor, {}).setdefault(object_id, event.timestamp)
    elif event.kind is EventKind.COMMENT:
        object_id = _require_object(store, event)
        store.comments.setdefault(object_id, {}).setdefault(actor, event.timestamp)
    else:  # pragma: no cover - enum is closed
        raise MsnError(f"unhandled kind {event.kind!r}")


def save_store(store: ActivityStore, path: str | Path) -> None:
    doc = {
        "version": 1,
        "cutoff": store.cutoff,
        "users": sorted(store.users),
        "contact_lists": store.contact_lists,
        "photo_authors": store.photo_authors,
        "photo_tags": {obj: sorted(tags) for obj, tags in store.photo_tags.items()},
        "user_tags": store.user_tags,
        "group_members": store.group_members,
        "favourites": store.favourites,
        "comments": store.comments,
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")


def load_store(path: str | Path) -> ActivityStore:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != 1:
        raise MsnError(f"unsupported store version {doc.get('version')!r}")
    return ActivityStore(
        cutoff=doc["cutoff"],
        users=set(doc["users"]),
        contact_lists={u: dict(v) for u, v in doc["contact_lists"].items()},
        photo_authors=dict(doc["photo_authors"]),
        photo_tags={obj: set(tags) for obj, tags in doc["photo_tags"].items()},
        user_tags={u: dict(v) for u, v in doc["user_tags"].items()},
        group_members={g: dict(v) for g, v in doc["group_members"].items()},
        favourites={u: dict(v) for u, v in doc["favourites"].items()},
        comments={o: dict(v) for o, v in doc["comments"].items()},
    )
