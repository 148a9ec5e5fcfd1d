"""Capture a scripted two-stage rating session from the real service.

Runs the FastAPI app in process over a deterministic synthetic network,
replays the session protocol a browser client would follow, and records
every request/response pair into frontend/test/fixtures/session_replay.json.
The frontend tests replay their session state machine against exactly
these recorded exchanges.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from msnrec.layers import LAYER_INDEX
from msnrec.recommend import WeightState
from msnrec.service import create_app
from msnrec.simulate import pick_raters, synthetic_msn

OUT = Path(__file__).resolve().parents[1] / "frontend" / "test" / "fixtures"


def main() -> None:
    msn = synthetic_msn(8)
    user = pick_raters(msn, 1, 5, rounds=2)[0]
    client = TestClient(create_app(msn, WeightState(), session_n=5))
    steps = []

    def record(method: str, path: str, payload=None):
        response = client.get(path) if method == "GET" else client.post(path, json=payload)
        steps.append({
            "method": method,
            "path": path,
            "request_body": payload,
            "status": response.status_code,
            "response": response.json(),
        })
        return response.json()

    initial = record("GET", f"/session/{user}")
    assert initial["stage"] == "Initial" and len(initial["presented"]) == 5

    # reward candidates reached through two-hop contacts, skip the last card
    k = LAYER_INDEX["coc"]
    ratings = {}
    for entry in initial["presented"][:-1]:
        share = entry["layer_contributions"][k]
        ratings[entry["candidate"]] = round(0.2 + 0.8 * share, 3)
    record("POST", f"/session/{user}/ratings", {"ratings": ratings})

    adapted = record("GET", f"/session/{user}")
    assert adapted["stage"] == "PostAdaptation"
    stage1 = {e["candidate"] for e in initial["presented"]}
    stage2 = {e["candidate"] for e in adapted["presented"]}
    assert not stage1 & stage2

    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "session_replay.json").write_text(
        json.dumps({"user": user, "steps": steps}, indent=1, sort_keys=True),
        encoding="utf-8",
    )
    print(f"recorded {len(steps)} exchanges for user {user} -> {OUT / 'session_replay.json'}")


if __name__ == "__main__":
    main()
