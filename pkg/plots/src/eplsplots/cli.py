"""``plots render --spec figures.json`` — batch figure rendering.

Renders every spec in the figures file in order, printing one
``wrote <path>`` line per figure. On failure the last stderr line is a
single JSON object: ``{"error": "spec" | "schema" | "io", "detail": ...}``,
with ``path`` and ``missing`` added for schema mismatches; the exit code
is 2.
"""

from __future__ import annotations

import argparse
import json
import sys

from .figspec import SpecError, load_specs
from .render import SchemaError, render


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots", description="Render figures from benchmark CSV outputs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    render_parser = sub.add_parser("render", help="render every figure in a figures file")
    render_parser.add_argument("--spec", required=True, help="path to figures.json")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        for spec in load_specs(args.spec):
            print(f"wrote {render(spec)}")
    except SchemaError as exc:
        print(
            json.dumps(
                {"error": "schema", "detail": str(exc), "path": exc.path, "missing": exc.missing},
                sort_keys=True,
            ),
            file=sys.stderr,
        )
        return 2
    except SpecError as exc:
        print(json.dumps({"error": "spec", "detail": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "io", "detail": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
