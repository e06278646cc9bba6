"""Command-line entry point: run sweeps, build tentpoles, filter, serve.

Exit codes: 0 success, 1 usage/config error, 2 runtime evaluation failure
under --fail-fast. stdout carries data only; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from functools import partial
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .cells import CellError, Polarity, build_tentpole, load_cell_records
from .config import ConfigError, parse_config
from .predicate import PredicateError, caret_diagnostic, compile_predicate
from .sweep import COLUMNS, NUMERIC_COLUMN_NAMES, SweepError, export_per_technology_csvs, run

THREADS_ENV_VAR = "ENVMX_THREADS"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _log(message: str):
    print(message, file=sys.stderr)


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_run(args) -> int:
    try:
        config = parse_config(args.config, seed_override=args.seed)
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return EXIT_USAGE
    out_dir = Path(args.out or config.output_directory)
    try:
        table = run(config, threads=args.threads, fail_fast=args.fail_fast)
    except SweepError as exc:
        _log(f"evaluation failed: {exc}")
        return EXIT_RUNTIME
    except (CellError, OSError, ValueError) as exc:
        _log(f"config error: {exc}")
        return EXIT_USAGE
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "results.csv").write_text(table.to_csv_text(), encoding="utf-8")
    (out_dir / "bundle.json").write_text(table.to_bundle_text(), encoding="utf-8")
    (out_dir / "config.canonical.json").write_text(config.canonical_json(), encoding="utf-8")
    if args.split_by_technology:
        export_per_technology_csvs(table, out_dir / "per_technology")
    _log(
        f"wrote {len(table.rows)} rows to {out_dir} "
        f"(fingerprint {table.config_fingerprint[:12]})"
    )
    return EXIT_OK


def cmd_tentpole(args) -> int:
    try:
        records = load_cell_records(args.records)
        definition = build_tentpole(records, args.tech, Polarity(args.polarity))
    except (CellError, OSError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    print(json.dumps(definition.to_json_dict(), indent=2))
    return EXIT_OK


def _typed_row_getter(header: list[str], row: list[str]):
    kinds = {c.name: c.kind for c in COLUMNS}
    values = {}
    for name, text in zip(header, row):
        kind = kinds.get(name)
        if text == "" or kind is None:
            values[name] = None
        elif kind in ("float", "int", "bool"):
            values[name] = float(text)  # handles the "inf" literal too
        else:
            values[name] = text
    return values.get


def cmd_filter(args) -> int:
    try:
        text = Path(args.results).read_text(encoding="utf-8")
    except OSError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    lines = text.splitlines()
    if not lines:
        _log("error: empty results file")
        return EXIT_USAGE
    header = next(csv.reader(io.StringIO(lines[0])))
    known_numeric = {name for name in header if name in NUMERIC_COLUMN_NAMES}
    try:
        predicate = compile_predicate(args.where, known_numeric)
    except PredicateError as exc:
        _log(f"bad --where expression: {exc}")
        _log(caret_diagnostic(args.where, exc))
        return EXIT_USAGE
    out = sys.stdout
    out.write(lines[0] + "\n")
    for line in lines[1:]:
        if not line:
            continue
        row = next(csv.reader(io.StringIO(line)))
        if predicate(_typed_row_getter(header, row)):
            out.write(line + "\n")  # original bytes preserved
    return EXIT_OK


class _BundleHandler(BaseHTTPRequestHandler):
    server_version = "envmx-serve/0.1"

    def __init__(self, bundle_path: Path, assets_dir: Path | None, *args, **kwargs):
        self.bundle_path = bundle_path
        self.assets_dir = assets_dir
        super().__init__(*args, **kwargs)

    def log_message(self, fmt, *args):  # requests logged to stderr
        _log(f"serve: {self.address_string()} {fmt % args}")

    def _send(self, payload: bytes, content_type: str):
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/bundle.json":
            self._send(self.bundle_path.read_bytes(), "application/json")
            return
        if self.assets_dir is not None:
            relative = "index.html" if path == "/" else path.lstrip("/")
            candidate = (self.assets_dir / relative).resolve()
            if candidate.is_file() and self.assets_dir.resolve() in candidate.parents:
                content_types = {
                    ".html": "text/html",
                    ".js": "text/javascript",
                    ".css": "text/css",
                    ".json": "application/json",
                    ".svg": "image/svg+xml",
                }
                self._send(
                    candidate.read_bytes(),
                    content_types.get(candidate.suffix, "application/octet-stream"),
                )
                return
        elif path == "/":
            self._send(_PLACEHOLDER_PAGE.encode(), "text/html")
            return
        self.send_error(404)


_PLACEHOLDER_PAGE = """<!doctype html>
<title>envmx</title>
<p>Result bundle is at <a href="/bundle.json">/bundle.json</a>.
Build the dashboard (frontend/) and pass --assets frontend/dist to serve it here.</p>
"""


def _find_assets(explicit: str | None) -> Path | None:
    if explicit:
        path = Path(explicit)
        return path if path.is_dir() else None
    fallback = Path("frontend/dist")
    return fallback if fallback.is_dir() else None


def cmd_serve(args) -> int:
    bundle_path = Path(args.bundle)
    if not bundle_path.is_file():
        _log(f"error: bundle not found: {bundle_path}")
        return EXIT_USAGE
    assets = _find_assets(args.assets)
    if args.assets and assets is None:
        _log(f"error: assets directory not found: {args.assets}")
        return EXIT_USAGE
    handler = partial(_BundleHandler, bundle_path, assets)
    try:
        server = ThreadingHTTPServer((args.host, args.port), handler)
    except OSError as exc:
        _log(f"error: cannot bind {args.host}:{args.port}: {exc}")
        return EXIT_USAGE
    _log(
        f"serving {bundle_path} on http://{args.host}:{server.server_address[1]}/ "
        + (f"with assets from {assets}" if assets else "(no dashboard assets)")
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        _log("serve: stopped")
    finally:
        server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envmx",
        description="Design-space exploration for embedded non-volatile on-chip memory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep config and write result tables")
    p_run.add_argument("config", help="sweep config JSON")
    p_run.add_argument("--out", help="output directory (default: config's output.directory)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument(
        "--threads", type=int, default=_default_threads(),
        help=f"worker threads (default ${THREADS_ENV_VAR} or 1)",
    )
    p_run.add_argument("--fail-fast", action="store_true",
                       help="abort on the first failing design point (exit 2)")
    p_run.add_argument("--split-by-technology", action="store_true",
                       help="also write per-technology per-BPC CSVs")
    p_run.set_defaults(func=cmd_run)

    p_tent = sub.add_parser("tentpole", help="print a bounding cell definition as JSON")
    p_tent.add_argument("records", help="cell record CSV")
    p_tent.add_argument("--tech", required=True, help="technology name")
    p_tent.add_argument("--polarity", required=True, choices=["optimistic", "pessimistic"])
    p_tent.set_defaults(func=cmd_tentpole)

    p_filter = sub.add_parser("filter", help="filter a results CSV to stdout")
    p_filter.add_argument("results", help="results.csv from a run")
    p_filter.add_argument("--where", required=True, help="predicate expression")
    p_filter.set_defaults(func=cmd_filter)

    p_serve = sub.add_parser("serve", help="serve a bundle (and dashboard) over HTTP")
    p_serve.add_argument("bundle", help="bundle.json from a run")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--assets", help="dashboard static directory (default: frontend/dist)")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
