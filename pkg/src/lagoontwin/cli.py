"""Operator entry point: `twin` with subcommands.

Exit codes: 0 ok, 2 usage error, 3 remote/model error. Machine-readable
output via --json on every subcommand. The data root comes from
--data-root, the TWIN_DATA_ROOT environment variable, or ./twin-data.
`scenario` is a thin HTTP client against a running `twin serve`.
"""

from __future__ import annotations

import json
import re
import sys
from datetime import datetime, timedelta
from pathlib import Path

import click

from lagoontwin.config import Platform, resolve_data_root
from lagoontwin.core import timeutil
from lagoontwin.errors import RetriableError, TwinError, UsageError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REMOTE = 3

DEFAULT_ADDR = "127.0.0.1:8765"

_DURATION_RE = re.compile(r"^(\d+)([mhdw])$")
_DURATION_UNITS = {"m": "minutes", "h": "hours", "d": "days", "w": "weeks"}


def parse_duration(text: str) -> timedelta:
    match = _DURATION_RE.match(text.strip())
    if not match:
        raise UsageError(f"bad duration {text!r} (use e.g. 90m, 3h, 2d, 1w)")
    return timedelta(**{_DURATION_UNITS[match.group(2)]: int(match.group(1))})


def parse_iso_week(text: str) -> datetime:
    """'2024-W23' -> the instant that week ends (next Monday 00:00 UTC)."""
    match = re.match(r"^(\d{4})-W(\d{1,2})$", text.strip())
    if not match:
        raise UsageError(f"bad ISO week {text!r} (use e.g. 2024-W23)")
    year, week = int(match.group(1)), int(match.group(2))
    try:
        monday = datetime.fromisocalendar(year, week, 1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return monday.replace(tzinfo=timeutil.UTC) + timedelta(days=7)


def parse_target(text: str) -> tuple[str, str, str]:
    parts = text.split("/")
    if len(parts) != 3 or not all(parts):
        raise UsageError(f"target must be <source>/<station>/<variable>: {text!r}")
    return parts[0], parts[1], parts[2]


def parse_assignments(pairs: tuple[str, ...], flag: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"{flag} expects var=value, got {pair!r}")
        name, raw = pair.split("=", 1)
        try:
            out[name] = float(raw)
        except ValueError:
            raise UsageError(f"{flag} value for {name!r} is not a number") from None
    return out


def fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.option("--data-root", type=click.Path(), default=None,
              help="Data root (default: $TWIN_DATA_ROOT or ./twin-data).")
@click.pass_context
def main(ctx: click.Context, data_root: str | None) -> None:
    ctx.ensure_object(dict)
    ctx.obj["data_root"] = resolve_data_root(data_root)


def _platform(ctx: click.Context) -> Platform:
    return Platform.open(ctx.obj["data_root"])


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--schedule", "schedule_path", type=click.Path(), default=None,
              help="Schedule file (default: schedule.json next to --config).")
@click.option("--once", is_flag=True, help="Run each entry a single time.")
@click.option("--follow", is_flag=True, help="Keep running on the real clock.")
@click.option("--virtual-clock", "virtual", default=None,
              help="Run a virtual clock for DURATION (e.g. 3h) of minute ticks.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ingest(ctx, config_path, schedule_path, once, follow, virtual, as_json):
    """Run the ingest schedule against the configured sources."""
    from lagoontwin.ingest.config import load_schedule, load_sources
    from lagoontwin.ingest.pipeline import IngestPipeline
    from lagoontwin.ingest.scheduler import real_clock, run_once, run_schedule, virtual_clock

    config_file = Path(config_path)
    if not config_file.exists():
        fail(f"config path does not exist: {config_file}", EXIT_USAGE)
    schedule_file = Path(schedule_path) if schedule_path else config_file.parent / "schedule.json"
    if not schedule_file.exists():
        fail(f"schedule path does not exist: {schedule_file}", EXIT_USAGE)

    platform = _platform(ctx)
    try:
        adapters = load_sources(config_file, platform.catalog)
        entries = load_schedule(schedule_file)
        pipeline = IngestPipeline(
            adapters, platform.catalog, platform.window, platform.hist
        )
        if once:
            trace = run_once(entries, pipeline.run)
        elif virtual:
            start = timeutil.utcnow().replace(minute=0, second=0)
            trace = run_schedule(
                entries, virtual_clock(start, parse_duration(virtual)), pipeline.run
            )
        elif follow:
            trace = run_schedule(entries, real_clock(), pipeline.run)
        else:
            fail("choose one of --once, --follow, --virtual-clock", EXIT_USAGE)
    except UsageError as exc:
        fail(str(exc), EXIT_USAGE)

    if as_json:
        click.echo(json.dumps([
            {
                "instant": timeutil.format_rfc3339(t.instant),
                "source_id": t.source_id,
                "kind": t.kind.value,
                "outcome": t.outcome,
            }
            for t in trace
        ]))
    else:
        for t in trace:
            click.echo(
                f"{timeutil.format_rfc3339(t.instant)} {t.source_id} "
                f"{t.kind.value}: {t.outcome}"
            )
        c = pipeline.counters
        click.echo(
            f"polled={c.polled} accepted={c.accepted} "
            f"rejected={c.rejected} stale={c.stale}"
        )
    if any(not t.ok for t in trace):
        sys.exit(EXIT_REMOTE)


@main.command()
@click.option("--week", required=True, help="ISO week to compact, e.g. 2024-W23.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def compact(ctx, week, as_json):
    """Move one week of validated window data into historical segments."""
    from lagoontwin.store.compaction import compact as run_compaction
    from lagoontwin.store.validation import ValidationRules

    platform = _platform(ctx)
    try:
        week_ending = parse_iso_week(week)
        report = run_compaction(
            platform.window, platform.hist, ValidationRules.default(),
            week_ending, platform.catalog,
        )
    except TwinError as exc:
        fail(str(exc), EXIT_USAGE)
    doc = {
        "week": week,
        "moved": report.moved,
        "rejected": report.rejected,
        "segments_written": report.segments_written,
        "rejection_reasons": report.rejection_reasons,
    }
    if as_json:
        click.echo(json.dumps(doc))
    else:
        click.echo(
            f"week {week}: moved={report.moved} rejected={report.rejected} "
            f"segments={report.segments_written} reasons={report.rejection_reasons}"
        )


@main.command()
@click.option("--target", required=True, help="<source>/<station>/<variable>")
@click.option("--model", "model_kind",
              type=click.Choice(["gbrt", "linear", "lstm"]), default="gbrt")
@click.option("--search-budget", type=int, default=0)
@click.option("--seed", type=int, default=0)
@click.option("--lags", type=int, default=None)
@click.option("--horizons", default="1,6,12,24", help="Comma-separated hours.")
@click.option("--window", "window_len", type=int, default=24,
              help="Input window length for the run-off model.")
@click.option("--hidden", type=int, default=16,
              help="Recurrent units for the run-off model (paper preset: 128).")
@click.option("--epochs", type=int, default=25)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def train(ctx, target, model_kind, search_budget, seed, lags, horizons,
          window_len, hidden, epochs, as_json):
    """Train candidates for a target series; register the champion."""
    platform = _platform(ctx)
    try:
        source, station, variable = parse_target(target)
        horizon_list = tuple(int(h) for h in horizons.split(","))
        if model_kind in ("gbrt", "linear"):
            doc = _train_global(
                platform, source, station, variable, model_kind,
                search_budget, seed, lags, horizon_list,
            )
        else:
            doc = _train_runoff(
                platform, source, station, variable,
                seed, window_len, hidden, epochs, horizon_list,
            )
    except UsageError as exc:
        fail(str(exc), EXIT_USAGE)
    except TwinError as exc:
        fail(str(exc), EXIT_REMOTE)
    click.echo(json.dumps(doc) if as_json else doc["summary"])


def _train_global(platform, source, station, variable, model_kind,
                  search_budget, seed, lags, horizon_list) -> dict:
    from lagoontwin.training import (
        DEFAULT_HOURLY_LAGS,
        load_aligned_series,
        metrics_doc,
        prepare_series,
        train_global_candidates,
    )

    raw = load_aligned_series(platform, source, variable)
    series_set, dropped = prepare_series(raw)
    if not any(s.series.station_id == station for s in series_set):
        raise UsageError(f"target station {station!r} has no usable data")
    outcome = train_global_candidates(
        series_set,
        lags=lags or DEFAULT_HOURLY_LAGS,
        horizons=horizon_list,
        search_budget=search_budget,
        seed=seed,
    )
    champion_report = outcome.reports[outcome.champion]
    entry = platform.registry.save_global(
        outcome.forecaster, source, station, variable,
        kind="linear" if outcome.champion == "linear" else
             "naive" if outcome.champion == "naive" else "gbrt",
        horizons=outcome.horizons,
        metrics=metrics_doc(champion_report),
    )
    report_doc = {
        name: metrics_doc(r) for name, r in sorted(outcome.reports.items())
    }
    (entry.path / "backtest.json").write_text(json.dumps(report_doc, indent=2) + "\n")
    return {
        "champion": outcome.champion,
        "version": entry.version,
        "dropped_sparse": [str(k) for k, _ in dropped],
        "metrics": report_doc[outcome.champion],
        "reports": report_doc,
        "summary": (
            f"champion {outcome.champion} (version {entry.version}) registered "
            f"for {source}/{station}/{variable}"
        ),
    }


def _train_runoff(platform, source, station, variable, seed,
                  window_len, hidden, epochs, horizon_list) -> dict:
    import numpy as np

    from lagoontwin.runoff.dataset import build_dataset
    from lagoontwin.runoff.lstm import LstmNetwork, lstm_backward, lstm_forward
    from lagoontwin.runoff.scenario import RunoffModel
    from lagoontwin.runoff.train import TrainConfig, train as train_net
    from lagoontwin.training import load_aligned_series, prepare_series

    if variable != "streamflow":
        raise UsageError("the run-off model predicts streamflow targets")
    flows, _ = prepare_series(load_aligned_series(platform, source, "streamflow"))
    try:
        rains, _ = prepare_series(load_aligned_series(platform, source, "rain"))
    except UsageError:
        rains = []
    features = flows + rains
    target = next(
        (s for s in flows if s.series.station_id == station), None
    )
    if target is None:
        raise UsageError(f"no streamflow data for station {station!r}")
    horizon = horizon_list[0]
    dataset = build_dataset(features, target, horizon=horizon, window=window_len)

    # gradient-check preflight on a small probe before any real training
    probe = LstmNetwork.initialized(dataset.input_width, hidden=4, seed=seed)
    rng = np.random.default_rng(seed)
    sequence = rng.normal(size=(3, dataset.input_width))
    output, cache = lstm_forward(probe, sequence)
    grads = lstm_backward(probe, cache, 2.0 * output)
    eps = 1e-5
    flat = probe.params["W_i"].ravel()
    original = flat[0]
    flat[0] = original + eps
    up, _ = lstm_forward(probe, sequence)
    flat[0] = original - eps
    down, _ = lstm_forward(probe, sequence)
    flat[0] = original
    numeric = (up**2 - down**2) / (2 * eps)
    analytic = grads["W_i"].ravel()[0]
    if abs(numeric - analytic) > 1e-4 * max(abs(numeric), abs(analytic), 1e-8):
        raise TwinError("gradient-check preflight failed")

    net = LstmNetwork.initialized(dataset.input_width, hidden=hidden, seed=seed)
    result = train_net(net, dataset, TrainConfig(epochs=epochs, seed=seed))
    model = RunoffModel(
        net=result.net,
        feature_scaler=dataset.feature_scaler,
        target_scaler=dataset.target_scaler,
        feature_names=dataset.feature_names,
        station=station,
        horizon=horizon,
        window=window_len,
    )
    entry = platform.registry.save_runoff(
        model, source,
        metrics={str(horizon): {"val_mae": min(result.val_mae)}} if result.val_mae else {},
    )
    return {
        "champion": "lstm",
        "version": entry.version,
        "gradient_check": "passed",
        "val_mae": result.val_mae,
        "summary": (
            f"run-off model (version {entry.version}) registered for "
            f"{source}/{station}/streamflow, horizon {horizon}h"
        ),
    }


@main.command()
@click.option("--target", required=True, help="<source>/<station>/<variable>")
@click.option("--report", "report_format", type=click.Choice(["table", "json"]),
              default="table")
@click.option("--horizons", default="1,6,12,24")
@click.option("--folds", type=int, default=6)
@click.option("--lags", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.pass_context
def backtest(ctx, target, report_format, horizons, folds, lags, seed):
    """Backtest every candidate and print a variable x horizon x candidate
    table with MAE and CVRMSE columns."""
    from lagoontwin.training import (
        DEFAULT_HOURLY_LAGS,
        load_aligned_series,
        metrics_doc,
        prepare_series,
        train_global_candidates,
    )

    platform = _platform(ctx)
    try:
        source, station, variable = parse_target(target)
        horizon_list = tuple(int(h) for h in horizons.split(","))
        raw = load_aligned_series(platform, source, variable)
        series_set, _ = prepare_series(raw)
        outcome = train_global_candidates(
            series_set, lags=lags or DEFAULT_HOURLY_LAGS,
            horizons=horizon_list, n_folds=folds, seed=seed,
        )
    except UsageError as exc:
        fail(str(exc), EXIT_USAGE)

    doc = {
        "variable": variable,
        "horizons": list(horizon_list),
        "champion": outcome.champion,
        "candidates": {
            name: metrics_doc(r) for name, r in sorted(outcome.reports.items())
        },
    }
    if report_format == "json":
        click.echo(json.dumps(doc))
        return
    click.echo(f"variable: {variable}    champion: {outcome.champion}")
    header = f"{'candidate':>18} {'horizon':>8} {'MAE':>12} {'CVRMSE':>12}"
    click.echo(header)
    click.echo("-" * len(header))
    for name in sorted(outcome.reports):
        for h in horizon_list:
            metric = outcome.reports[name].per_horizon.get(h)
            if metric is None:
                continue
            cv = f"{metric.cvrmse:.3f}" if metric.cvrmse is not None else "-"
            click.echo(f"{name:>18} {h:>8} {metric.mae:>12.3f} {cv:>12}")


@main.command()
@click.option("--addr", default=DEFAULT_ADDR, help="host:port to listen on.")
@click.option("--reload-interval", type=float, default=3600.0,
              help="Seconds between in-memory snapshot reloads.")
@click.pass_context
def serve(ctx, addr, reload_interval):
    """Start the HTTP API."""
    import uvicorn

    from lagoontwin.service.app import create_app

    try:
        host, port_text = addr.rsplit(":", 1)
        port = int(port_text)
    except ValueError:
        fail(f"bad --addr {addr!r} (use host:port)", EXIT_USAGE)
    platform = _platform(ctx)
    app = create_app(platform, reload_interval_s=reload_interval)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--station", required=True)
@click.option("--horizon", type=int, default=1)
@click.option("--multiply", multiple=True, help="var=factor (repeatable).")
@click.option("--offset", multiple=True, help="var=value (repeatable).")
@click.option("--addr", default=DEFAULT_ADDR, help="host:port of a running server.")
@click.option("--json", "as_json", is_flag=True)
def scenario(station, horizon, multiply, offset, addr, as_json):
    """Run a what-if scenario against a running server (thin client)."""
    import httpx

    try:
        body = {
            "station": station,
            "horizon": horizon,
            "multipliers": parse_assignments(multiply, "--multiply"),
            "offsets": parse_assignments(offset, "--offset"),
        }
    except UsageError as exc:
        fail(str(exc), EXIT_USAGE)
    url = addr if addr.startswith("http") else f"http://{addr}"
    try:
        response = httpx.post(f"{url}/scenario", json=body, timeout=60.0)
    except httpx.HTTPError as exc:
        fail(f"server unreachable at {url}: {exc}", EXIT_REMOTE)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        fail(f"{response.status_code}: {detail}",
             EXIT_REMOTE if response.status_code in (404, 409, 500) else EXIT_USAGE)
    doc = response.json()
    if as_json:
        click.echo(json.dumps(doc))
    else:
        click.echo(
            f"baseline={doc['baseline']:.6g} perturbed={doc['perturbed']:.6g} "
            f"delta={doc['delta']:.6g} model={doc['model_version']}"
        )


@main.group()
def features():
    """Feature-matrix utilities."""


@features.command("dump")
@click.option("--target", required=True, help="<source>/<station>/<variable>")
@click.option("--lags", type=int, default=24)
@click.option("--out", "out_path", type=click.Path(), default="-")
@click.pass_context
def features_dump(ctx, target, lags, out_path):
    """Export the lag design matrix as tab-separated text."""
    from lagoontwin.features.matrix import build_lag_matrix
    from lagoontwin.training import load_aligned_series, prepare_series

    platform = _platform(ctx)
    try:
        source, station, variable = parse_target(target)
        series_set, _ = prepare_series(load_aligned_series(platform, source, variable))
        matrix = build_lag_matrix(series_set, lags=lags)
    except UsageError as exc:
        fail(str(exc), EXIT_USAGE)
    lines = ["\t".join(("timestamp", "series", "weight", "target")
                       + matrix.feature_names)]
    for i in range(len(matrix)):
        key = matrix.series_order[matrix.series_ids[i]]
        lines.append("\t".join(
            [
                timeutil.format_rfc3339(timeutil.from_epoch(int(matrix.timestamps[i]))),
                str(key),
                f"{matrix.weights[i]:g}",
                f"{matrix.y[i]!r}",
            ]
            + [f"{v!r}" for v in matrix.X[i]]
        ))
    text = "\n".join(lines) + "\n"
    if out_path == "-":
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text)
        click.echo(f"wrote {len(matrix)} rows to {out_path}")


if __name__ == "__main__":
    main()
