"""Activity events and log parsing.

The external log is line-delimited: one self-describing JSON object per
line with the fields ``event_id, kind, actor, target_user?, object_id?,
tag?, group_id?, timestamp``.  Which of the optional fields must be
present is fully determined by ``kind``; anything extra or missing makes
the line malformed.  Timestamps are epoch seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import MsnError


class EventKind(Enum):
    """The six user actions a log line can describe."""

    CONTACT_ADD = "ContactAdd"
    TAG_USE = "TagUse"
    GROUP_JOIN = "GroupJoin"
    UPLOAD = "Upload"
    FAVOURITE_MARK = "FavouriteMark"
    COMMENT = "Comment"


class MalformedRecord(MsnError):
    """A log line violates the record schema."""


class UnknownKind(MalformedRecord):
    """A log line names a kind outside the six supported ones."""


class DuplicateEventId(MsnError):
    """Two lines of one log share an event id."""


_FIELDS = ("event_id", "kind", "actor", "target_user", "object_id", "tag", "group_id", "timestamp")

# kind -> optional fields that must be present; all other optionals must be absent
_REQUIRED = {
    EventKind.CONTACT_ADD: ("target_user",),
    EventKind.TAG_USE: ("tag", "object_id"),
    EventKind.GROUP_JOIN: ("group_id",),
    EventKind.UPLOAD: ("object_id",),
    EventKind.FAVOURITE_MARK: ("object_id",),
    EventKind.COMMENT: ("object_id",),
}
_OPTIONAL = ("target_user", "object_id", "tag", "group_id")


@dataclass(frozen=True)
class ActivityEvent:
    """One timestamped user action."""

    event_id: str
    kind: EventKind
    actor: str
    timestamp: float
    target_user: str | None = None
    object_id: str | None = None
    tag: str | None = None
    group_id: str | None = None

    def __post_init__(self) -> None:
        if not self.event_id or not self.actor:
            raise MalformedRecord("event_id and actor must be non-empty")
        required = _REQUIRED[self.kind]
        for name in _OPTIONAL:
            value = getattr(self, name)
            if name in required:
                if value is None or value == "":
                    raise MalformedRecord(f"{self.kind.value} requires {name}")
            elif value is not None:
                raise MalformedRecord(f"{self.kind.value} does not take {name}")
        if self.kind is EventKind.TAG_USE and not self.tag.strip():
            raise MalformedRecord("tag must contain non-whitespace characters")


def normalize_tag(tag: str) -> str:
    """Canonical tag form: whitespace-trimmed, case-folded."""
    return tag.strip().casefold()


def _iter_lines(stream: Union[IO[str], IO[bytes], Iterable[str], Iterable[bytes]]) -> Iterable[str]:
    for raw in stream:
        if isinstance(raw, bytes):
            yield raw.decode("utf-8")
        else:
            yield raw


def parse_events(stream: Union[IO[str], IO[bytes], Iterable[str], Iterable[bytes]]) -> list[ActivityEvent]:
    """Parse an event log into a list of events, preserving file order.

    Raises MalformedRecord / UnknownKind / DuplicateEventId with the
    offending line number in the message.  Blank lines are skipped.
    """
    events: list[ActivityEvent] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(_iter_lines(stream), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"line {lineno}: not a valid record: {exc}") from None
        if not isinstance(obj, dict):
            raise MalformedRecord(f"line {lineno}: record must be a JSON object")
        unknown = set(obj) - set(_FIELDS)
        if unknown:
            raise MalformedRecord(f"line {lineno}: unexpected fields {sorted(unknown)}")
        for name in ("event_id", "kind", "actor", "timestamp"):
            if name not in obj:
                raise MalformedRecord(f"line {lineno}: missing field {name!r}")
        kind_name = obj["kind"]
        try:
            kind = EventKind(kind_name)
        except ValueError:
            raise UnknownKind(f"line {lineno}: unknown kind {kind_name!r}") from None

        event_id = obj["event_id"]
        if isinstance(event_id, int) and not isinstance(event_id, bool):
            event_id = str(event_id)
        if not isinstance(event_id, str) or not event_id:
            raise MalformedRecord(f"line {lineno}: event_id must be a non-empty string")
        if event_id in seen_ids:
            raise DuplicateEventId(f"line {lineno}: duplicate event id {event_id!r}")

        timestamp = obj["timestamp"]
        if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
            raise MalformedRecord(f"line {lineno}: timestamp must be numeric epoch seconds")

        fields: dict[str, str | None] = {}
        for name in ("actor", *_OPTIONAL):
            value = obj.get(name)
            if value is not None and (not isinstance(value, str) or not value):
                raise MalformedRecord(f"line {lineno}: {name} must be a non-empty string")
            fields[name] = value

        if kind is EventKind.CONTACT_ADD and fields["target_user"] == fields["actor"]:
            raise MalformedRecord(f"line {lineno}: contact add must not point at the actor")

        try:
            event = ActivityEvent(
                event_id=event_id,
                kind=kind,
                actor=fields["actor"],
                timestamp=float(timestamp),
                target_user=fields["target_user"],
                object_id=fields["object_id"],
                tag=fields["tag"],
                group_id=fields["group_id"],
            )
        except MalformedRecord as exc:
            raise MalformedRecord(f"line {lineno}: {exc}") from None
        seen_ids.add(event_id)
        events.append(event)
    return events


def parse_log_file(path: str | Path) -> list[ActivityEvent]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_events(handle)


def event_to_record(event: ActivityEvent) -> str:
    """Serialize one event back to its log-line form."""
    obj: dict[str, object] = {"event_id": event.event_id, "kind": event.kind.value, "actor": event.actor}
    for name in _OPTIONAL:
        value = getattr(event, name)
        if value is not None:
            obj[name] = value
    obj["timestamp"] = event.timestamp
    return json.dumps(obj, sort_keys=True)
