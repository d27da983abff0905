"""Command-line front end.

Every command prints one JSON result document (or writes it to ``--out``).
Exit codes: 0 success, 2 bad input, 3 a solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from segmenter import bertrand, cournot, monopoly
from segmenter.errors import CatalogError, ConvergenceError, DomainError, InternalConsistencyError
from segmenter.model import DisplaySet, PriceVector, ProductCatalog, SolverConfig
from segmenter.segmentation import (
    Game,
    Objective,
    brute_force_optimize,
    is_quality_prefix,
    optimize,
    solve_game,
)

EXIT_INPUT = 2
EXIT_CONVERGENCE = 3
ORACLE_HARD_LIMIT = 22
AGREEMENT_TOL = 1e-9
DOCUMENT_KEYS = (
    "command", "game", "objective", "catalog_digest", "chosen_ids",
    "k_star", "value", "curve", "equilibrium", "solver",
)


def load_catalog(path) -> ProductCatalog:
    """Read a catalog from CSV (``id,quality`` header) or a JSON array."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc.strerror}") from None
    if not text.strip():
        raise CatalogError(f"catalog {path} is empty")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("["):
        rows = _json_rows(text, path)
    else:
        rows = _csv_rows(text, path)
    if not rows:
        raise CatalogError(f"catalog {path} lists no products")
    return ProductCatalog(rows)


def _json_rows(text, path):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    if not isinstance(data, list):
        raise CatalogError(f"{path}: expected a JSON array of products")
    rows = []
    for k, item in enumerate(data):
        if not isinstance(item, dict) or "id" not in item or "quality" not in item:
            raise CatalogError(f"{path}: entry {k} needs 'id' and 'quality' fields")
        pid, quality = item["id"], item["quality"]
        if not isinstance(pid, str):
            raise CatalogError(f"{path}: entry {k} has a non-string id")
        if isinstance(quality, bool) or not isinstance(quality, (int, float)):
            raise CatalogError(f"{path}: entry {k} has a non-numeric quality")
        rows.append((pid, quality))
    return rows


def _csv_rows(text, path):
    reader = csv.DictReader(io.StringIO(text))
    fields = [f.strip() for f in reader.fieldnames or []]
    for column in ("id", "quality"):
        if column not in fields:
            raise CatalogError(f"{path}: missing '{column}' column in CSV header")
    reader.fieldnames = fields
    rows = []
    for line, row in enumerate(reader, start=2):
        if not any((v or "").strip() for v in row.values()):
            continue
        pid, quality = (row.get("id") or "").strip(), (row.get("quality") or "").strip()
        if not pid:
            raise CatalogError(f"{path}:{line}: empty product id")
        try:
            rows.append((pid, float(quality)))
        except ValueError:
            raise CatalogError(f"{path}:{line}: quality {quality!r} is not a number") from None
    return rows


def load_initial_prices(source: str, catalog: ProductCatalog, display: DisplaySet) -> PriceVector:
    """``uniform:<p>`` or a CSV (``id,price``) / JSON (``{id: price}``) file."""
    if source.startswith("uniform:"):
        try:
            value = float(source.split(":", 1)[1])
        except ValueError:
            raise CatalogError(f"bad uniform initial price {source!r}") from None
        return PriceVector(np.full(len(display), value))
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read initial prices {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".json" or text.lstrip().startswith(("{", "[")):
            data = json.loads(text)
            if isinstance(data, list):
                data = {d["id"]: d["price"] for d in data}
            table = {str(k): float(v) for k, v in data.items()}
        else:
            reader = csv.DictReader(io.StringIO(text))
            table = {row["id"].strip(): float(row["price"]) for row in reader}
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise CatalogError(f"{path}: malformed initial prices ({exc})") from None
    ids = [catalog.products[r].id for r in display]
    missing = [i for i in ids if i not in table]
    if missing:
        raise CatalogError(f"{path}: no initial price for {', '.join(missing)}")
    return PriceVector([table[i] for i in ids])


def _display(catalog, raw):
    if not raw:
        return DisplaySet.full(catalog)
    return DisplaySet.from_ids(catalog, [s.strip() for s in raw.split(",") if s.strip()])


def _num(x):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def _render(value):
    if isinstance(value, dict):
        return {k: _render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return _num(value)


def result_document(command, catalog, **fields) -> dict:
    doc = {key: None for key in DOCUMENT_KEYS}
    doc["command"] = command
    doc["catalog_digest"] = catalog.digest()
    for key, value in fields.items():
        doc[key] = value
    return _render(doc)


def _equilibrium_section(catalog, eq):
    ids = [catalog.products[r].id for r in eq.display]
    return {
        "prices": dict(zip(ids, eq.prices.prices.tolist())),
        "demands": dict(zip(ids, eq.demands.demands.tolist())),
        "outside_share": eq.demands.outside_share,
        "welfare": eq.welfare,
        "revenue": eq.revenue,
    }


def _cournot_solver(catalog, eq):
    if len(eq.w_values) == 0:
        return {"iterations": 0, "residual": 0.0}
    theta = eq.display.qualities(catalog)
    resid = float(np.max(np.abs(cournot.first_order_residuals(theta, eq.demands))))
    return {"iterations": 0, "residual": resid}


def _solver_for(catalog, eq):
    if isinstance(eq, bertrand.BertrandEquilibrium):
        rep = eq.solve_report
        return {"iterations": rep.iterations, "residual": rep.residual}
    return _cournot_solver(catalog, eq)


def cmd_equilibrium(args, config):
    catalog = load_catalog(args.catalog)
    display = _display(catalog, args.display)
    eq = solve_game(catalog, display, args.game, config)
    return result_document(
        "equilibrium", catalog,
        game=args.game,
        chosen_ids=[catalog.products[r].id for r in display],
        k_star=len(display),
        equilibrium=_equilibrium_section(catalog, eq),
        solver=_solver_for(catalog, eq),
    )


def cmd_segment(args, config):
    catalog = load_catalog(args.catalog)
    result = optimize(catalog, args.game, args.objective, config)
    eq = solve_game(catalog, result.chosen, args.game, config)
    return result_document(
        "segment", catalog,
        game=args.game,
        objective=args.objective,
        chosen_ids=[catalog.products[r].id for r in result.chosen],
        k_star=result.k_star,
        value=result.objective_value,
        curve=[list(pair) for pair in result.curve] if args.curve else None,
        equilibrium=_equilibrium_section(catalog, eq),
        solver={"equilibrium_solves": len(catalog), **_solver_for(catalog, eq)},
    )


def _write_trace(path, catalog, trace):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["round", "seller_id", "price", "potential", "max_delta"])
        running, current = 0.0, None
        for e in trace.entries:
            if e.round != current:
                running, current = 0.0, e.round
            running = max(running, e.delta)
            writer.writerow([
                e.round, catalog.products[e.rank].id,
                f"{e.price:.12g}", f"{e.potential:.12g}", f"{running:.12g}",
            ])


def cmd_dynamics(args, config):
    catalog = load_catalog(args.catalog)
    display = _display(catalog, args.display)
    initial = load_initial_prices(args.init, catalog, display)
    overrides = {}
    if args.max_rounds is not None:
        overrides["max_dynamics_rounds"] = args.max_rounds
    if args.tol is not None:
        overrides["dynamics_tol"] = args.tol
    config = SolverConfig(**{**config.__dict__, **overrides})
    try:
        eq, trace = bertrand.best_response_dynamics(catalog, display, initial, config)
    except ConvergenceError as exc:
        if exc.report is not None:
            _write_trace(args.trace, catalog, exc.report)
        raise
    _write_trace(args.trace, catalog, trace)
    rounds = trace.rounds
    return result_document(
        "dynamics", catalog,
        game="bertrand",
        chosen_ids=[catalog.products[r].id for r in display],
        k_star=len(display),
        equilibrium=_equilibrium_section(catalog, eq),
        solver={
            "rounds": len(rounds),
            "updates": len(trace.entries),
            "final_max_delta": rounds[-1][3] if rounds else 0.0,
        },
    )


def cmd_oracle(args, config):
    catalog = load_catalog(args.catalog)
    limit = args.max_products if args.max_products is not None else config.oracle_max_products
    config = SolverConfig(**{**config.__dict__, "oracle_max_products": limit})
    chosen, value = brute_force_optimize(catalog, args.game, args.objective, config)
    seg = optimize(catalog, args.game, args.objective, config)
    agrees = abs(value - seg.objective_value) <= AGREEMENT_TOL * max(1.0, abs(value))
    same_set = len(chosen) == len(seg.chosen) and is_quality_prefix(catalog, chosen)
    eq = solve_game(catalog, chosen, args.game, config)
    doc = result_document(
        "oracle", catalog,
        game=args.game,
        objective=args.objective,
        chosen_ids=[catalog.products[r].id for r in chosen],
        k_star=len(chosen),
        value=value,
        equilibrium=_equilibrium_section(catalog, eq),
        solver={"subsets": (1 << len(catalog)) - 1},
    )
    doc["oracle"] = _render({
        "oracle_value": value,
        "segment_value": seg.objective_value,
        "segment_ids": [catalog.products[r].id for r in seg.chosen],
        "agrees": agrees,
        "same_set": same_set,
    })
    return doc


def cmd_benchmark(args, config):
    catalog = load_catalog(args.catalog)
    display = DisplaySet.full(catalog)
    mono_sw = monopoly.welfare_optimal(catalog, display).value
    mono_re = monopoly.revenue_optimal(catalog, display, config).value
    b = bertrand.solve_equilibrium(catalog, display, config)
    c = cournot.solve_equilibrium(catalog, display, config)
    doc = result_document(
        "benchmark", catalog,
        chosen_ids=list(catalog.ids),
        k_star=len(catalog),
        solver={"iterations": b.solve_report.iterations, "residual": b.solve_report.residual},
    )
    doc["benchmark"] = _render({
        "monopoly_welfare": mono_sw,
        "monopoly_revenue": mono_re,
        "bertrand_welfare": b.welfare,
        "bertrand_revenue": b.revenue,
        "cournot_welfare": c.welfare,
        "cournot_revenue": c.revenue,
        "ratio_welfare_bertrand": mono_sw / b.welfare,
        "ratio_revenue_bertrand": mono_re / b.revenue,
        "ratio_welfare_cournot": mono_sw / c.welfare,
        "ratio_revenue_cournot": mono_re / c.revenue,
    })
    return doc


def _oracle_limit(raw):
    value = int(raw)
    if not 1 <= value <= ORACLE_HARD_LIMIT:
        raise argparse.ArgumentTypeError(f"must be between 1 and {ORACLE_HARD_LIMIT}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="segmenter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    games = [g.value for g in Game]
    objectives = [o.value for o in Objective]

    p = sub.add_parser("equilibrium", help="equilibrium prices and demands for a display set")
    p.add_argument("--game", choices=games, required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--display", help="comma-separated product ids (default: all)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_equilibrium)

    p = sub.add_parser("segment", help="optimal display set via the top-k scan")
    p.add_argument("--game", choices=games, required=True)
    p.add_argument("--objective", choices=objectives, required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--curve", action="store_true", help="include the per-k objective curve")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_segment)

    p = sub.add_parser("dynamics", help="round-robin Bertrand best-response dynamics")
    p.add_argument("--catalog", required=True)
    p.add_argument("--display")
    p.add_argument("--init", required=True, help="uniform:<price> or a price file")
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--trace", required=True, help="CSV file receiving the per-update trace")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_dynamics)

    p = sub.add_parser("oracle", help="exhaustive subset search, compared with segment")
    p.add_argument("--game", choices=games, required=True)
    p.add_argument("--objective", choices=objectives, required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--max-products", type=_oracle_limit,
                   help=f"raise the enumeration limit (at most {ORACLE_HARD_LIMIT})")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("benchmark", help="full-control optima against both equilibria")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = args.handler(args, SolverConfig())
    except ConvergenceError as exc:
        print(f"segmenter: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except InternalConsistencyError as exc:
        print(f"segmenter: internal error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"segmenter: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
