"""The ``msn`` command line: ingest, extract, aggregate, stats, compare,
recommend, feedback, simulate, serve."""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from .analytics import all_layer_stats, compare_all_layers, tie_overlap_histogram
from .layers import DecayConfig, LAYER_KINDS, RelationLayer, build_all_layers
from .network import AggregationConfig, aggregate, load_msn, save_msn
from .recommend import (
    FeedbackEvent,
    WeightState,
    adapt_weights,
    apply_feedback_batch,
    load_weights,
    rank,
    save_weights,
)
from .reports import (
    COMPARE_COLUMNS,
    dump_layer,
    dump_ties,
    fmt_percent,
    load_layer_dump,
    render_compare_figure,
    render_overlap_figure,
    render_stats_figure,
    write_compare_csv,
    write_compare_json,
    write_experiment_report,
    write_stats_csv,
    write_stats_json,
)
from .simulate import (
    RaterProfile,
    biased_preference,
    pick_raters,
    run_experiment,
    synthetic_msn,
)
from .store import build_store, load_store, save_store
from .events import parse_log_file


def _parse_cutoff(text: str) -> float:
    if text.replace(".", "", 1).isdigit():
        return float(text)
    iso = text.replace("Z", "+00:00")
    moment = datetime.fromisoformat(iso)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.timestamp()


@click.group()
def main() -> None:
    """Multidimensional social network toolkit."""


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--cutoff", required=True, help="ISO8601 instant or epoch seconds")
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest(log_path: str, cutoff: str, out_path: str) -> None:
    """Parse an event log into a snapshot store."""
    events = parse_log_file(log_path)
    store = build_store(events, _parse_cutoff(cutoff))
    save_store(store, out_path)
    click.echo(f"ingested {len(events)} events, {len(store.users)} users -> {out_path}")


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--layers", "which", default="all", show_default=True,
              help="'all' or comma separated kinds, e.g. c,rc,t")
@click.option("--decay", "decay_spec", default=None,
              help="lambda,period_seconds (reference time = store cutoff)")
@click.option("--out", "out_dir", required=True, type=click.Path())
def extract(store_path: str, which: str, decay_spec: str | None, out_dir: str) -> None:
    """Derive relation layers from a store into a dump directory."""
    store = load_store(store_path)
    decay = None
    if decay_spec:
        lam_text, period_text = decay_spec.split(",")
        decay = DecayConfig(lam=float(lam_text), period_seconds=float(period_text),
                            reference_time=store.cutoff)
    layers = build_all_layers(store, decay)
    wanted = LAYER_KINDS if which == "all" else tuple(k.strip() for k in which.split(","))
    unknown = [k for k in wanted if k not in LAYER_KINDS]
    if unknown:
        raise click.BadParameter(f"unknown layer kinds {unknown}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {}
    for kind in wanted:
        layer = layers[kind]
        dump_layer(layer, out / f"{kind}.edges")
        meta[kind] = {
            "meeting_object_count": layer.meeting_object_count,
            "relation_count": len(layer.edges),
        }
    (out / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True), encoding="utf-8")
    click.echo(f"wrote {len(wanted)} layer dumps -> {out_dir}")


@main.command()
@click.option("--layers", "layers_dir", required=True, type=click.Path(exists=True))
@click.option("--alpha", default=",".join(["1"] * len(LAYER_KINDS)), show_default=True,
              help="comma separated importance per layer, canonical order")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--ties-out", "ties_path", default=None, type=click.Path(),
              help="also write the delimited tie dump with per-layer vectors")
def aggregate_cmd(layers_dir: str, alpha: str, out_path: str,
                  ties_path: str | None) -> None:
    """Aggregate a layer dump directory into a network snapshot."""
    directory = Path(layers_dir)
    meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
    layers = {}
    for kind in LAYER_KINDS:
        dump_path = directory / f"{kind}.edges"
        edges = load_layer_dump(kind, dump_path) if dump_path.exists() else {}
        object_count = meta.get(kind, {}).get("meeting_object_count")
        layers[kind] = RelationLayer(kind, edges, meeting_object_count=object_count)
    coefficients = tuple(float(a) for a in alpha.split(","))
    msn = aggregate(layers, AggregationConfig(alpha=coefficients))
    save_msn(msn, out_path)
    if ties_path:
        dump_ties(msn.ties, ties_path)
    click.echo(f"aggregated {len(msn.ties)} ties over {len(msn.users)} users -> {out_path}")


main.add_command(aggregate_cmd, name="aggregate")


@main.command()
@click.option("--msn", "msn_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="directory for the report and its figures; stdout when omitted")
def stats(msn_path: str, fmt: str, out_dir: str | None) -> None:
    """Per-layer statistics battery."""
    msn = load_msn(msn_path)
    battery = all_layer_stats(msn)
    if out_dir is None:
        if fmt == "json":
            click.echo(json.dumps({"layers": [vars(s) for s in battery]}, indent=1, sort_keys=True))
        else:
            import io

            buffer = io.StringIO()
            write_stats_csv(battery, buffer)
            click.echo(buffer.getvalue(), nl=False)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        write_stats_json(battery, {"users": len(msn.users), "ties": len(msn.ties)},
                         out / "stats.json")
    else:
        write_stats_csv(battery, out / "stats.csv")
    render_stats_figure(battery, out / "stats.png")
    render_overlap_figure(tie_overlap_histogram(msn), out / "tie_overlap.png")
    click.echo(f"stats report -> {out}")


@main.command()
@click.option("--msn", "msn_path", required=True, type=click.Path(exists=True))
@click.option("--pairs", default="all", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path())
def compare(msn_path: str, pairs: str, fmt: str, out_dir: str | None) -> None:
    """Similarity measures for every layer pair."""
    if pairs != "all":
        raise click.BadParameter("only --pairs all is supported")
    msn = load_msn(msn_path)
    reports = compare_all_layers(msn)
    if out_dir is None:
        click.echo(",".join(COMPARE_COLUMNS))
        for r in reports:
            pearson = "" if r.pearson is None else f"{r.pearson:.6f}"
            click.echo(f"{r.pair[0]},{r.pair[1]},{fmt_percent(r.union_density)},"
                       f"{r.cosine:.6f},{r.jaccard:.6f},{pearson}")
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        write_compare_json(reports, out / "compare.json")
    else:
        write_compare_csv(reports, out / "compare.csv")
    render_compare_figure(reports, out / "compare.png")
    click.echo(f"similarity report -> {out}")


@main.command()
@click.option("--msn", "msn_path", required=True, type=click.Path(exists=True))
@click.option("--weights", "weights_path", default=None, type=click.Path(),
              help="weight document; uniform weights when omitted")
@click.option("--user", required=True)
@click.option("-n", "list_length", default=10, show_default=True)
@click.option("--offset", default=0, show_default=True, help="rotation offset")
def recommend(msn_path: str, weights_path: str | None, user: str,
              list_length: int, offset: int) -> None:
    """Ranked people recommendations for one user."""
    msn = load_msn(msn_path)
    weights = load_weights(weights_path) if weights_path and Path(weights_path).exists() \
        else WeightState()
    listing = rank(user, msn, weights, n=list_length, rotation_offset=offset)
    if not listing.entries:
        click.echo("no candidates")
        return
    for position, entry in enumerate(listing.entries, start=1):
        top = sorted(zip(LAYER_KINDS, entry.layer_contributions),
                     key=lambda pair: -pair[1])[:3]
        breakdown = " ".join(f"{kind}={share:.2f}" for kind, share in top if share > 0)
        click.echo(f"{position:2d}. {entry.candidate}  value={entry.value:.6f}  {breakdown}")


@main.command()
@click.option("--msn", "msn_path", required=True, type=click.Path(exists=True))
@click.option("--weights", "weights_path", required=True, type=click.Path())
@click.option("--event", "event_json", default=None,
              help='JSON record {"user", "target", "activity", "timestamp", "rating"?}')
@click.option("--events-file", "events_path", default=None, type=click.Path(exists=True),
              help="line-delimited feedback records, applied as one batch")
def feedback(msn_path: str, weights_path: str, event_json: str | None,
             events_path: str | None) -> None:
    """Apply feedback (one event, or a batch file) and persist the weights."""
    if (event_json is None) == (events_path is None):
        raise click.UsageError("exactly one of --event / --events-file is required")
    msn = load_msn(msn_path)
    weights = load_weights(weights_path) if Path(weights_path).exists() else WeightState()

    def to_event(record: dict) -> FeedbackEvent:
        return FeedbackEvent(
            user=record["user"], target=record["target"], activity=record["activity"],
            timestamp=record["timestamp"], rating=record.get("rating"),
        )

    if event_json is not None:
        event = to_event(json.loads(event_json))
        updated = adapt_weights(weights, event, msn)
        touched = [event.user]
    else:
        lines = Path(events_path).read_text(encoding="utf-8").splitlines()
        events = [to_event(json.loads(line)) for line in lines if line.strip()]
        updated = apply_feedback_batch(weights, events, msn)
        touched = sorted({e.user for e in events})
    save_weights(updated, weights_path)
    for user in touched:
        vector = updated.vector_for(user)
        click.echo(f"updated weights for {user}: "
                   + " ".join(f"{w:.4f}" for w in vector))


@main.command()
@click.option("--profile", "profile_path", default=None, type=click.Path(exists=True),
              help="JSON rater spec; auto-picked biased raters when omitted")
@click.option("--rounds", default=2, show_default=True)
@click.option("--msn", "msn_path", default=None, type=click.Path(exists=True),
              help="network snapshot; a synthetic network is generated when omitted")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path())
def simulate(profile_path: str | None, rounds: int, msn_path: str | None,
             seed: int, out_dir: str | None) -> None:
    """Run the staged simulated-feedback experiment."""
    spec = json.loads(Path(profile_path).read_text(encoding="utf-8")) if profile_path else {}
    msn = load_msn(msn_path) if msn_path else synthetic_msn(spec.get("network_seed", seed))
    n = int(spec.get("n", 5))
    rounds = int(spec.get("rounds", rounds))

    profiles = []
    for rater in spec.get("raters", []):
        preference = _preference_vector(rater["preference"])
        profiles.append(RaterProfile(user=rater["user"], preference=preference))
    if not profiles:
        auto = spec.get("auto_raters", {"count": 6, "bias_layer": "coc", "bias": 0.85})
        users = pick_raters(msn, int(auto.get("count", 6)), n, rounds)
        preference = biased_preference(auto.get("bias_layer", "coc"),
                                       float(auto.get("bias", 0.85)))
        profiles = [RaterProfile(user=u, preference=preference) for u in users]

    report = run_experiment(msn, profiles, n=n, rounds=rounds)
    means = " -> ".join(f"{m:.4f}" for m in report.stage_mean_ratings)
    click.echo(f"{len(profiles)} raters, {rounds} stages, mean ratings: {means}")
    if out_dir:
        written = write_experiment_report(report, out_dir)
        for path in written:
            click.echo(f"wrote {path}")


def _preference_vector(spec: dict[str, float]) -> tuple[float, ...]:
    unknown = set(spec) - set(LAYER_KINDS)
    if unknown:
        raise click.BadParameter(f"unknown layer kinds in preference: {sorted(unknown)}")
    given = sum(spec.values())
    missing = [k for k in LAYER_KINDS if k not in spec]
    if given < 1.0 and missing:
        fill = (1.0 - given) / len(missing)
        return tuple(spec.get(k, fill) for k in LAYER_KINDS)
    return tuple(spec.get(k, 0.0) for k in LAYER_KINDS)


@main.command()
@click.option("--msn", "msn_path", required=True, type=click.Path(exists=True))
@click.option("--weights", "weights_path", default=None, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--session-n", default=5, show_default=True)
@click.option("--ui", "ui_dir", default=None, type=click.Path(exists=True),
              help="directory with the built rating frontend, mounted at /ui")
def serve(msn_path: str, weights_path: str | None, host: str, port: int,
          session_n: int, ui_dir: str | None) -> None:
    """Serve the recommendation API (and optionally the rating frontend)."""
    import uvicorn

    from .service import create_app

    msn = load_msn(msn_path)
    weights = load_weights(weights_path) if weights_path and Path(weights_path).exists() \
        else WeightState()
    app = create_app(msn, weights, session_n=session_n, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
