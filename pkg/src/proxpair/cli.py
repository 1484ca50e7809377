"""File-driven front end: JSON problem specs in, JSON reports out.

Commands are ``analyze``, ``structure``, ``solve``, ``falsify`` (each runs
the spec's tasks of that kind) and ``fixtures`` (writes the canonical
problem files).  Reports are deterministic given the spec and seeds: two
runs differ only in the wall-time field.  Exit codes: 0 when every task
certified, 1 on input errors, 2 when some certificate failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from ._opt import SolverBudgetExceeded
from .bodies import BodyPair, body_from_dict, body_to_dict
from .metrics import analyze_pair, property_uc_falsify, proximal_core, semisharp_check
from .norms import NormSpec
from .solver import CertificateFailure, CyclicityError, CyclicMapSpec, solve_bpp
from .structure import (
    DegenerateStructureError,
    EmptyCenterSetError,
    NestedHullError,
    estimate_structure,
    nested_hull_demo,
)
from .fixtures import canonical_problems

__all__ = ["ProblemSpec", "SpecError", "load_spec", "spec_to_dict", "run", "emit_fixtures", "main"]

TASK_OPS = ("analyze", "structure", "solve", "falsify")


class SpecError(ValueError):
    """Problem-spec validation failure, carrying the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class ProblemSpec:
    norm: NormSpec
    bodies: dict
    pairs: list
    maps: dict
    tasks: list
    notes: Optional[str] = None

    def pair(self, name_a: str, name_b: str) -> BodyPair:
        return BodyPair(self.bodies[name_a], self.bodies[name_b], self.norm)


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SpecError(path, message)


def parse_spec(data: dict) -> ProblemSpec:
    _require(isinstance(data, dict), "$", "spec must be a JSON object")
    for key in ("norm", "bodies", "pairs", "tasks"):
        _require(key in data, key, "missing required field")
    try:
        spec_norm = NormSpec.from_dict(data["norm"])
    except (KeyError, TypeError, ValueError) as e:
        raise SpecError("norm", str(e)) from e
    bodies = {}
    _require(isinstance(data["bodies"], dict), "bodies", "must be an object")
    for name, bd in data["bodies"].items():
        try:
            body = body_from_dict(bd)
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"bodies.{name}", str(e)) from e
        from .bodies import body_dim

        _require(
            body_dim(body) == spec_norm.dim,
            f"bodies.{name}",
            f"dimension {body_dim(body)} does not match norm dimension {spec_norm.dim}",
        )
        bodies[name] = body
    pairs = []
    _require(isinstance(data["pairs"], list), "pairs", "must be a list")
    for i, entry in enumerate(data["pairs"]):
        _require(
            isinstance(entry, list) and len(entry) == 2,
            f"pairs[{i}]", "must be a [nameA, nameB] pair",
        )
        for nm in entry:
            _require(nm in bodies, f"pairs[{i}]", f"unknown body {nm!r}")
        pairs.append((entry[0], entry[1]))
    maps = {}
    for name, md in data.get("maps", {}).items():
        try:
            maps[name] = CyclicMapSpec.from_dict(md)
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"maps.{name}", str(e)) from e
    tasks = []
    for i, task in enumerate(data["tasks"]):
        _require(isinstance(task, dict), f"tasks[{i}]", "must be an object")
        op = task.get("op")
        _require(op in TASK_OPS, f"tasks[{i}].op", f"unknown task {op!r}")
        _require("seed" in task, f"tasks[{i}].seed", "seeds are mandatory in specs")
        pr = task.get("pair")
        _require(
            isinstance(pr, list) and len(pr) == 2 and tuple(pr) in set(map(tuple, pairs)),
            f"tasks[{i}].pair", "must reference a declared pair",
        )
        if op == "solve":
            _require(task.get("map") in maps, f"tasks[{i}].map", "must reference a declared map")
        tasks.append(dict(task))
    return ProblemSpec(
        norm=spec_norm, bodies=bodies, pairs=pairs, maps=maps, tasks=tasks,
        notes=data.get("notes"),
    )


def spec_to_dict(spec: ProblemSpec) -> dict:
    out = {
        "norm": spec.norm.to_dict(),
        "bodies": {name: body_to_dict(b) for name, b in spec.bodies.items()},
        "pairs": [[a, b] for a, b in spec.pairs],
        "maps": {name: m.to_dict() for name, m in spec.maps.items()},
        "tasks": [dict(t) for t in spec.tasks],
    }
    if spec.notes is not None:
        out["notes"] = spec.notes
    return out


def load_spec(path: str) -> ProblemSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SpecError(path, f"cannot read spec: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(path, f"invalid JSON at line {e.lineno}: {e.msg}") from e
    return parse_spec(data)


# ---------------------------------------------------------------------------
# Task execution
# ---------------------------------------------------------------------------

def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _task_analyze(spec: ProblemSpec, task: dict) -> dict:
    pair = spec.pair(*task["pair"])
    tol = float(task.get("tol", 1e-7))
    metrics, core = analyze_pair(
        pair, tol=tol, seed=int(task["seed"]), budget=int(task.get("budget", 64))
    )
    certified = metrics.ordering_ok and (core.certified_exact or core.detected)
    return {"certified": bool(certified), "metrics": metrics.to_dict(), "tol": tol}


def _task_structure(spec: ProblemSpec, task: dict) -> dict:
    pair = spec.pair(*task["pair"])
    tol = float(task.get("tol", 1e-7))
    seed = int(task["seed"])
    count = int(task.get("count", 400))
    core = proximal_core(pair, tol=tol, seed=seed, budget=int(task.get("budget", 64)))
    est = estimate_structure(pair, core, count, seed, tol=tol)
    out = {"certified": True, "estimate": est.to_dict(), "tol": tol}
    if "levels" in task:
        levels = int(task["levels"])
        c = float(task.get("c", 0.95))
        trace = nested_hull_demo(pair, core, levels, c, seed, tol=tol)
        out["nested_hulls"] = trace.to_dict()
        # Gap contraction is this artifact's guarantee; the center-existence
        # probe reports applicability of the contraction hypothesis.
        out["certified"] = bool(trace.gap_contraction_ok)
    return out


def _task_solve(spec: ProblemSpec, task: dict) -> dict:
    pair = spec.pair(*task["pair"])
    T = spec.maps[task["map"]]
    tol = float(task.get("tol", 1e-6))
    res = solve_bpp(
        pair, T, tol=tol,
        max_iter=int(task.get("max_iter", 400)), seed=int(task["seed"]),
    )
    return {
        "certified": res.trace.outcome == "converged",
        "x": [float(v) for v in res.x],
        "y": [float(v) for v in res.y],
        "gap_to_d": res.gap_to_d,
        "tol": tol,
        "trace": res.trace.to_dict(),
    }


def _task_falsify(spec: ProblemSpec, task: dict) -> dict:
    pair = spec.pair(*task["pair"])
    tol = float(task.get("tol", 1e-7))
    seed = int(task["seed"])
    budget = int(task.get("budget", 32))
    semi = semisharp_check(pair, tol=tol, budget=budget, seed=seed)
    uc = property_uc_falsify(pair, tol=tol, budget=budget, seed=seed)
    return {
        "certified": True,
        "tol": tol,
        "semisharp": semi.to_dict(),
        "uc_counterexample": None if uc is None else uc.to_dict(),
    }


_RUNNERS = {
    "analyze": _task_analyze,
    "structure": _task_structure,
    "solve": _task_solve,
    "falsify": _task_falsify,
}


def _threads_cap() -> Optional[int]:
    raw = os.environ.get("PROXPAIR_THREADS")
    if raw is None:
        return None
    try:
        val = int(raw)
    except ValueError as e:
        raise SpecError("PROXPAIR_THREADS", f"must be a positive integer, got {raw!r}") from e
    if val < 1:
        raise SpecError("PROXPAIR_THREADS", "must be >= 1")
    return val


def run(spec_path: str, output_path: Optional[str] = None, overrides: Optional[dict] = None,
        task_filter: Optional[str] = None) -> int:
    """Execute a problem spec's tasks in order and write the report.

    ``task_filter`` restricts execution to one task kind (the CLI command).
    Returns 0 when all executed tasks certified, 1 on input errors, 2 when
    any certificate failed.
    """
    started = time.monotonic()
    try:
        cap = _threads_cap()
        spec = load_spec(spec_path)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    overrides = dict(overrides or {})
    task_records = []
    seeds = []
    for i, task in enumerate(spec.tasks):
        if task_filter is not None and task["op"] != task_filter:
            continue
        merged = dict(task)
        op = task["op"]
        applicable = {"tol", "seed", "budget"}
        if op == "structure":
            applicable |= {"levels", "count"}
        if op == "solve":
            applicable.add("max_iter")
        for key in applicable:
            if overrides.get(key) is not None:
                merged[key] = overrides[key]
        seeds.append(int(merged["seed"]))
        record = {"index": i, "op": task["op"], "pair": list(task["pair"])}
        try:
            record.update(_RUNNERS[task["op"]](spec, merged))
        except (
            CertificateFailure,
            CyclicityError,
            SolverBudgetExceeded,
            NestedHullError,
            EmptyCenterSetError,
            DegenerateStructureError,
        ) as e:
            record.update({"certified": False, "error": f"{type(e).__name__}: {e}"})
        task_records.append(record)
    all_ok = all(r.get("certified", False) for r in task_records)
    report = {
        "tool": {"name": "proxpair", "version": __version__},
        "spec_name": os.path.basename(spec_path),
        "threads_cap": cap,
        "seed_echo": seeds,
        "tasks": _jsonify(task_records),
        "all_certified": bool(all_ok),
        "wall_time_s": round(time.monotonic() - started, 6),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all_ok else 2


def emit_fixtures(directory: str) -> list:
    """Write the canonical fixture set; reruns are byte-identical.

    Files are produced by parsing the canonical problems and re-serializing
    them, so every fixture is already in canonical form and round-trips
    exactly through the loader.
    """
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, data in sorted(canonical_problems().items()):
        spec = parse_spec(data)
        out = spec_to_dict(spec)
        path = os.path.join(directory, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxpair",
        description="Certified metric computations for convex pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--spec", required=True, help="problem spec JSON path")
        p.add_argument("--out", default=None, help="report output path (default stdout)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--levels", type=int, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=None)

    for cmd in TASK_OPS:
        add_common(sub.add_parser(cmd, help=f"run the spec's {cmd} tasks"))
    fx = sub.add_parser("fixtures", help="write the canonical fixture files")
    fx.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "fixtures":
        try:
            written = emit_fixtures(args.out)
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        for path in written:
            print(path)
        return 0
    overrides = {
        "tol": args.tol,
        "seed": args.seed,
        "budget": args.budget,
        "levels": args.levels,
        "max_iter": args.max_iter,
    }
    return run(args.spec, args.out, overrides=overrides, task_filter=args.command)


if __name__ == "__main__":
    sys.exit(main())
