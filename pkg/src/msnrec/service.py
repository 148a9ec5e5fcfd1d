"""HTTP service over a network snapshot and a weight state.

Endpoints
    GET  /recommendations/{user}?n=     rotated ranked list; advances the
                                        user's rotation offset
    POST /feedback                      apply one feedback event
    GET  /layers/{user}                 tie neighbors with layer breakdown
    GET  /stats                         per-layer statistics battery
    GET  /compare                       all layer-pair similarity reports
    GET  /session/{user}                current rating-session stage
    POST /session/{user}/ratings        submit stage ratings, adapt weights

Reads never mutate the network.  All weight writes are serialized per
user; feedback with a timestamp older than the user's last applied one
is rejected with 409.  The weight state is persisted to the data
directory (argument or MSN_DATA_DIR) after every mutation.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .analytics import all_layer_stats, compare_all_layers, tie_overlap_histogram
from .layers import LAYER_KINDS
from .network import MSN, UnknownUser, tie_neighbors
from .recommend import (
    CandidateState,
    EXPLICIT_RATING,
    FeedbackEvent,
    InvalidImportance,
    NoRelation,
    RankConfig,
    RecommendationEntry,
    RecommendationList,
    WeightState,
    adapt_weights,
    rank,
    save_weights,
)


class SessionStage(Enum):
    INITIAL = "Initial"
    POST_ADAPTATION = "PostAdaptation"


@dataclass
class SessionRecord:
    user: str
    stage: SessionStage
    presented: list[dict]
    candidates: list[str]
    created_at: float
    ratings: dict[str, float] = field(default_factory=dict)
    rated_at: float | None = None

    @property
    def rated(self) -> bool:
        return self.rated_at is not None


class FeedbackIn(BaseModel):
    user: str
    target: str
    activity: str
    timestamp: float
    rating: float | None = None


class RatingsIn(BaseModel):
    ratings: dict[str, float]


@dataclass
class ServiceState:
    msn: MSN
    weights: WeightState
    config: RankConfig
    session_n: int
    data_dir: Path | None
    offsets: dict[str, int] = field(default_factory=dict)
    last_feedback: dict[str, float] = field(default_factory=dict)
    sessions: dict[str, list[SessionRecord]] = field(default_factory=dict)
    # per requester: candidate -> (times shown, candidate state)
    history: dict[str, dict[str, RecommendationEntry]] = field(default_factory=dict)
    _global_lock: threading.Lock = field(default_factory=threading.Lock)
    _user_locks: dict[str, threading.Lock] = field(default_factory=dict)

    def user_lock(self, user: str) -> threading.Lock:
        with self._global_lock:
            lock = self._user_locks.get(user)
            if lock is None:
                lock = threading.Lock()
                self._user_locks[user] = lock
            return lock

    def user_history(self, user: str) -> dict[str, RecommendationEntry]:
        return self.history.setdefault(user, {})

    def record_presented(self, user: str, listing: RecommendationList) -> None:
        """Count every shown candidate so repeat views can be damped."""
        entries = self.user_history(user)
        for shown in listing.entries:
            previous = entries.get(shown.candidate)
            entries[shown.candidate] = RecommendationEntry(
                candidate=shown.candidate,
                value=shown.value,
                layer_contributions=shown.layer_contributions,
                presented_count=(previous.presented_count if previous else 0) + 1,
                state=previous.state if previous else CandidateState.FRESH,
            )

    def record_state(self, user: str, candidate: str, state: CandidateState) -> None:
        entries = self.user_history(user)
        previous = entries.get(candidate)
        entries[candidate] = RecommendationEntry(
            candidate=candidate,
            value=previous.value if previous else 0.0,
            layer_contributions=previous.layer_contributions if previous else (),
            presented_count=previous.presented_count if previous else 0,
            state=state,
        )

    def persist(self) -> None:
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            save_weights(self.weights, self.data_dir / "weights.json")


def _entry_payload(entry) -> dict:
    return {
        "candidate": entry.candidate,
        "value": entry.value,
        "layer_contributions": list(entry.layer_contributions),
        "presented_count": entry.presented_count,
        "state": entry.state.value,
    }


def _listing_payload(listing: RecommendationList) -> dict:
    return {
        "user": listing.user,
        "rotation_offset": listing.rotation_offset,
        "pool_size": listing.pool_size,
        "entries": [_entry_payload(e) for e in listing.entries],
    }


def _require_user(msn: MSN, user: str) -> None:
    if user not in msn.users:
        raise HTTPException(status_code=404, detail=f"unknown user {user!r}")


def create_app(
    msn: MSN,
    weights: WeightState | None = None,
    data_dir: str | Path | None = None,
    session_n: int = 5,
    config: RankConfig | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    if data_dir is None:
        env_dir = os.environ.get("MSN_DATA_DIR")
        data_dir = Path(env_dir) if env_dir else None
    state = ServiceState(
        msn=msn,
        weights=weights or WeightState(),
        config=config or RankConfig(),
        session_n=session_n,
        data_dir=Path(data_dir) if data_dir else None,
    )
    app = FastAPI(title="msnrec", version="0.1.0")
    app.state.engine = state

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    @app.get("/recommendations/{user}")
    def recommendations(user: str, n: int = Query(default=10, ge=1)) -> dict:
        _require_user(state.msn, user)
        with state.user_lock(user):
            offset = state.offsets.get(user, 0)
            listing = rank(user, state.msn, state.weights,
                           history=state.user_history(user), n=n,
                           rotation_offset=offset, config=state.config)
            if listing.pool_size > 0:
                state.offsets[user] = (offset + n) % listing.pool_size
            state.record_presented(user, listing)
        return _listing_payload(listing)

    @app.post("/feedback")
    def feedback(body: FeedbackIn) -> dict:
        _require_user(state.msn, body.user)
        _require_user(state.msn, body.target)
        try:
            event = FeedbackEvent(
                user=body.user, target=body.target, activity=body.activity,
                timestamp=body.timestamp, rating=body.rating,
            )
        except Exception as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        with state.user_lock(body.user):
            last = state.last_feedback.get(body.user)
            if last is not None and body.timestamp < last:
                raise HTTPException(
                    status_code=409,
                    detail=f"feedback at {body.timestamp} is older than last applied {last}",
                )
            before = state.weights.vector_for(body.user)
            try:
                state.weights = adapt_weights(state.weights, event, state.msn)
            except (NoRelation, InvalidImportance) as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from None
            state.last_feedback[body.user] = body.timestamp
            if body.activity == "ViewProfile":
                state.record_state(body.user, body.target, CandidateState.VIEWED)
            elif body.activity == "AddContact":
                state.record_state(body.user, body.target, CandidateState.CONTACTED)
            after = state.weights.vector_for(body.user)
            state.persist()
        return {"user": body.user, "weights_before": list(before), "weights_after": list(after)}

    @app.get("/layers/{user}")
    def layers(user: str) -> dict:
        try:
            neighbors = tie_neighbors(state.msn, user)
        except UnknownUser as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return {
            "user": user,
            "layer_kinds": list(LAYER_KINDS),
            "neighbors": [
                {
                    "neighbor": nb.neighbor,
                    "strength": nb.strength,
                    "layer_strengths": list(nb.layer_strengths),
                }
                for nb in neighbors
            ],
        }

    @app.get("/stats")
    def stats() -> dict:
        return {
            "users": len(state.msn.users),
            "ties": len(state.msn.ties),
            "layers": [vars(s) for s in all_layer_stats(state.msn)],
            "tie_overlap_histogram": tie_overlap_histogram(state.msn),
        }

    @app.get("/compare")
    def compare() -> dict:
        return {
            "pairs": [
                {
                    "pair": list(r.pair),
                    "union_density": r.union_density,
                    "cosine": r.cosine,
                    "jaccard": r.jaccard,
                    "pearson": r.pearson,
                }
                for r in compare_all_layers(state.msn)
            ]
        }

    @app.get("/session/{user}")
    def session(user: str) -> dict:
        _require_user(state.msn, user)
        with state.user_lock(user):
            records = state.sessions.setdefault(user, [])
            if not records:
                records.append(_new_session(state, user, SessionStage.INITIAL, exclude=()))
            elif records[-1].rated and len(records) == 1:
                shown = records[0].candidates
                records.append(
                    _new_session(state, user, SessionStage.POST_ADAPTATION, exclude=shown)
                )
            record = records[-1]
        return {
            "user": user,
            "stage": record.stage.value,
            "rated": record.rated,
            "presented": record.presented,
            "layer_kinds": list(LAYER_KINDS),
            "weights_current": list(state.weights.vector_for(user)),
        }

    @app.post("/session/{user}/ratings")
    def session_ratings(user: str, body: RatingsIn) -> dict:
        _require_user(state.msn, user)
        with state.user_lock(user):
            records = state.sessions.get(user) or []
            if not records or records[-1].rated:
                raise HTTPException(status_code=422, detail="no unrated session to rate")
            record = records[-1]
            if not body.ratings:
                raise HTTPException(status_code=422, detail="at least one rating is required")
            unknown = set(body.ratings) - set(record.candidates)
            if unknown:
                raise HTTPException(
                    status_code=422,
                    detail=f"candidates not presented in this session: {sorted(unknown)}",
                )
            for value in body.ratings.values():
                if not 0.0 <= value <= 1.0:
                    raise HTTPException(status_code=422, detail="ratings must lie in [0, 1]")

            before = state.weights.vector_for(user)
            now = time.time()
            base = max(now, state.last_feedback.get(user, 0.0))
            step = 0
            for candidate in record.candidates:  # deterministic application order
                if candidate not in body.ratings:
                    continue
                step += 1
                event = FeedbackEvent(
                    user=user, target=candidate, activity=EXPLICIT_RATING,
                    rating=body.ratings[candidate], timestamp=base + step * 1e-3,
                )
                try:
                    state.weights = adapt_weights(state.weights, event, state.msn)
                except (NoRelation, InvalidImportance) as exc:
                    raise HTTPException(status_code=422, detail=str(exc)) from None
                state.last_feedback[user] = event.timestamp
            record.ratings = dict(body.ratings)
            record.rated_at = now
            after = state.weights.vector_for(user)
            state.persist()
        return {
            "user": user,
            "stage": record.stage.value,
            "weights_before": list(before),
            "weights_after": list(after),
        }

    return app


def _new_session(
    state: ServiceState, user: str, stage: SessionStage, exclude
) -> SessionRecord:
    listing = rank(
        user, state.msn, state.weights, history=state.user_history(user),
        n=state.session_n, rotation_offset=0, config=state.config, exclude=exclude,
    )
    state.record_presented(user, listing)
    return SessionRecord(
        user=user,
        stage=stage,
        presented=[_entry_payload(e) for e in listing.entries],
        candidates=[e.candidate for e in listing.entries],
        created_at=time.time(),
    )
