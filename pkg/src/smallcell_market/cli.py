"""Command-line entry point.

Subcommands: ``monopoly``, ``duopoly``, ``regions``, ``sweep``, ``verify``.
Exit status is 0 on success, 1 on bad input, 2 on a solver diagnostic.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .duopoly import ConstraintPair, SolverDiagnostic, solve_ne
from .market import MarketError, MarketParams
from .monopoly import optimal_split
from .oracle import GridSpec, cross_check
from .welfare import RegulatorScenario, sweep

SWEEP_HEADER = ["b1_new", "b2_new", "sw_wo_star", "sw_w_star", "sw_w_ne",
                "region", "rev1", "rev2"]
REGIONS_HEADER = ["floor1", "floor2", "region", "b1s", "b2s"]

PARAM_KEYS = ("alpha", "n_mobile", "n_fixed", "r0", "lambda_s")
SP_KEYS = ("total", "initial", "floor")
REGULATOR_KEYS = ("b_new", "grid_points")
OUTPUT_KEYS = ("path", "format")
TOP_KEYS = ("params", "sps", "regulator", "output")


class ScenarioError(ValueError):
    """Malformed scenario input; the message names the offending field."""


@dataclass
class Scenario:
    params: MarketParams
    sps: list[dict] = field(default_factory=list)
    b_new: float | None = None
    grid_points: int | None = None
    out: str | None = None
    fmt: str = "human"


def fmt_num(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".12g")
    return "0" if s == "-0" else s


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(f"{where}: must be finite")
    return float(value)


def _section(doc: dict, key: str, allowed: tuple[str, ...]) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict):
        raise ScenarioError(f"{key}: expected an object")
    for k in sec:
        if k not in allowed:
            raise ScenarioError(f"{key}.{k}: unknown key")
    return sec


def _parse_pair(text: str, flag: str) -> tuple[float, float]:
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise ScenarioError(f"{flag}: expected two comma-separated numbers, got {text!r}")
    return a, b


def load_scenario(doc: dict, args: argparse.Namespace) -> Scenario:
    """Validate a scenario document and apply command-line overrides."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario: top level must be an object")
    for k in doc:
        if k not in TOP_KEYS:
            raise ScenarioError(f"{k}: unknown key")

    params_doc = dict(_section(doc, "params", PARAM_KEYS))
    for key in PARAM_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            params_doc[key] = flag_value
        if key not in params_doc:
            raise ScenarioError(f"params.{key}: missing")
        params_doc[key] = _number(params_doc[key], f"params.{key}")
    try:
        params = MarketParams(**params_doc)
    except MarketError as exc:
        name = str(exc).split("=", 1)[0]
        raise ScenarioError(f"params.{name}: {exc}") from exc

    sps_doc = doc.get("sps", [])
    if not isinstance(sps_doc, list):
        raise ScenarioError("sps: expected a list")
    sps = []
    for i, sp in enumerate(sps_doc):
        if not isinstance(sp, dict):
            raise ScenarioError(f"sps[{i}]: expected an object")
        for k in sp:
            if k not in SP_KEYS:
                raise ScenarioError(f"sps[{i}].{k}: unknown key")
        sps.append({k: _number(v, f"sps[{i}].{k}") for k, v in sp.items()})

    for flag, key in (("totals", "total"), ("initial", "initial"), ("floors", "floor")):
        text = getattr(args, flag, None)
        if text is None:
            continue
        values = _parse_pair(text, f"--{flag}")
        while len(sps) < 2:
            sps.append({})
        for sp, v in zip(sps, values):
            sp[key] = v

    reg = _section(doc, "regulator", REGULATOR_KEYS)
    b_new = reg.get("b_new")
    if b_new is not None:
        b_new = _number(b_new, "regulator.b_new")
    if getattr(args, "b_new", None) is not None:
        b_new = args.b_new
    grid_points = reg.get("grid_points")
    if grid_points is not None and (isinstance(grid_points, bool)
                                    or not isinstance(grid_points, int)):
        raise ScenarioError("regulator.grid_points: expected an integer")

    out = _section(doc, "output", OUTPUT_KEYS)
    fmt = out.get("format", "human")
    if getattr(args, "format", None):
        fmt = args.format
    if fmt not in ("csv", "human"):
        raise ScenarioError(f"output.format: expected 'csv' or 'human', got {fmt!r}")
    path = getattr(args, "out", None) or out.get("path")
    if path is not None and not isinstance(path, str):
        raise ScenarioError("output.path: expected a string")
    return Scenario(params=params, sps=sps, b_new=b_new, grid_points=grid_points,
                    out=path, fmt=fmt)


def _require(sps: list[dict], count: int, key: str) -> list[float]:
    if len(sps) != count:
        raise ScenarioError(f"sps: expected {count} entries, got {len(sps)}")
    values = []
    for i, sp in enumerate(sps):
        if key not in sp:
            raise ScenarioError(f"sps[{i}].{key}: missing")
        if sp[key] <= 0:
            raise ScenarioError(f"sps[{i}].{key}: must be > 0")
        values.append(sp[key])
    return values


def _floors(sps: list[dict], totals: list[float]) -> list[float]:
    floors = []
    for i, (sp, total) in enumerate(zip(sps, totals)):
        f = sp.get("floor", 0.0)
        if not 0 <= f <= total:
            raise ScenarioError(f"sps[{i}].floor: must lie in [0, {fmt_num(total)}]")
        floors.append(f)
    return floors


def _render(rows: list[dict], header: list[str], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([row[h] if isinstance(row[h], str) else fmt_num(row[h])
                             for h in header])
    else:
        for n, row in enumerate(rows):
            if n:
                buf.write("\n")
            width = max(len(h) for h in header)
            for h in header:
                v = row[h] if isinstance(row[h], str) else fmt_num(row[h])
                buf.write(f"{h.ljust(width)}  {v}\n")
    return buf.getvalue()


def cmd_monopoly(sc: Scenario, args) -> tuple[str, int]:
    (total,) = _require(sc.sps, 1, "total")
    (floor,) = _floors(sc.sps, [total])
    res = optimal_split(sc.params, total, floor)
    o = res.outcome
    row = {"total": total, "floor": floor, "small": res.allocation.small,
           "macro": res.allocation.macro, "clipped": res.clipped,
           "price_macro": o.price_macro, "price_small": o.price_small,
           "rate_macro": o.rate_macro, "rate_small": o.rate_small,
           "regime": o.regime.value, "revenue": res.revenue, "welfare": res.welfare}
    return _render([row], list(row), sc.fmt), 0


def cmd_duopoly(sc: Scenario, args) -> tuple[str, int]:
    b1, b2 = _require(sc.sps, 2, "total")
    floors = ConstraintPair(*_floors(sc.sps, [b1, b2]))
    res = solve_ne(sc.params, b1, b2, floors)
    a = res.allocation
    row = {"b1": b1, "b2": b2, "floor1": floors.floor1, "floor2": floors.floor2,
           "b1s": a.sp1.small, "b1m": a.sp1.macro, "b2s": a.sp2.small,
           "b2m": a.sp2.macro, "region": res.region.value,
           "kkt_residual_1": res.kkt_residual_1, "kkt_residual_2": res.kkt_residual_2,
           "iterations": res.iterations, "rev1": res.revenues[0],
           "rev2": res.revenues[1], "welfare": res.welfare}
    return _render([row], list(row), sc.fmt), 0


def cmd_regions(sc: Scenario, args) -> tuple[str, int]:
    b1, b2 = _require(sc.sps, 2, "total")
    n = args.grid or sc.grid_points or 50
    if n < 2:
        raise ScenarioError("--grid: must be >= 2")
    rows = []
    for f1 in np.linspace(0.0, b1, n):
        for f2 in np.linspace(0.0, b2, n):
            res = solve_ne(sc.params, b1, b2, ConstraintPair(float(f1), float(f2)))
            rows.append({"floor1": f1, "floor2": f2, "region": res.region.value,
                         "b1s": res.allocation.sp1.small, "b2s": res.allocation.sp2.small})
    return _render(rows, REGIONS_HEADER, "csv" if sc.fmt == "csv" else "human"), 0


def cmd_sweep(sc: Scenario, args) -> tuple[str, int]:
    b1o, b2o = _require(sc.sps, 2, "initial")
    if sc.b_new is None:
        raise ScenarioError("regulator.b_new: missing")
    if sc.b_new <= 0:
        raise ScenarioError("regulator.b_new: must be > 0")
    n = args.grid or sc.grid_points or 201
    if n < 2:
        raise ScenarioError("--grid: must be >= 2")
    scenario = RegulatorScenario(sc.params, b1o, b2o, sc.b_new)
    rows, failed = [], []
    for r in sweep(scenario, n):
        if r.error:
            failed.append(f"b1_new={fmt_num(r.b1_new)}: {r.error}")
        rows.append({"b1_new": r.b1_new, "b2_new": r.b2_new, "sw_wo_star": r.sw_wo_star,
                     "sw_w_star": r.sw_w_star, "sw_w_ne": r.sw_w_ne,
                     "region": r.region.value if r.region else "",
                     "rev1": r.rev1, "rev2": r.rev2})
    for line in failed:
        print(f"solver diagnostic: {line}", file=sys.stderr)
    return _render(rows, SWEEP_HEADER, sc.fmt), 2 if failed else 0


def cmd_verify(sc: Scenario, args) -> tuple[str, int]:
    b1, b2 = _require(sc.sps, 2, "total")
    floors = ConstraintPair(*_floors(sc.sps, [b1, b2]))
    rep = cross_check(sc.params, b1, b2, floors, GridSpec(args.grid or 10_000))
    row = {"monopoly_split_gap": rep.monopoly_split_gap,
           "monopoly_grid_step": rep.monopoly_grid_step,
           "best_response_gap": rep.best_response_gap,
           "br_grid_step": rep.br_grid_step,
           "ne_max_improvement": rep.ne_max_improvement,
           "ne_epsilon": rep.ne_epsilon, "ne_certified": rep.ne_certified,
           "grid_ne_gap": rep.grid_ne_gap, "ok": rep.ok}
    return _render([row], list(row), sc.fmt), 0 if rep.ok else 2


COMMANDS = {"monopoly": cmd_monopoly, "duopoly": cmd_duopoly, "regions": cmd_regions,
            "sweep": cmd_sweep, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="JSON scenario file")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--grid", type=int, help="grid points (regions, sweep) "
                        "or oracle resolution (verify)")
    common.add_argument("--floors", help="small-cell floors f1,f2")
    common.add_argument("--totals", help="SP bandwidth totals b1,b2")
    common.add_argument("--initial", help="initial SP endowments b1,b2 (sweep)")
    common.add_argument("--b-new", type=float, dest="b_new", help="new bandwidth B")
    common.add_argument("--format", choices=("csv", "human"))
    for key in PARAM_KEYS:
        common.add_argument(f"--{key.replace('_', '-')}", type=float, dest=key)

    parser = argparse.ArgumentParser(
        prog="smallcell-market",
        description="Pricing and bandwidth equilibria under small-cell bandwidth floors.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"monopoly": "optimal split for a single SP",
             "duopoly": "constrained Nash equilibrium for two SPs",
             "regions": "equilibrium region label over a grid of floors",
             "sweep": "welfare across partitions of new small-cell bandwidth",
             "verify": "cross-check solvers against brute-force oracles"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        doc = {}
        if args.scenario:
            try:
                doc = json.loads(Path(args.scenario).read_text())
            except OSError as exc:
                raise ScenarioError(f"--scenario: cannot read {args.scenario}: {exc.strerror}")
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"--scenario: invalid JSON ({exc})")
        sc = load_scenario(doc, args)
        text, code = COMMANDS[args.command](sc, args)
    except (ScenarioError, MarketError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except SolverDiagnostic as exc:
        print(f"solver diagnostic: {exc}", file=sys.stderr)
        return 2

    if sc.out:
        with open(sc.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
