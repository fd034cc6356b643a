"""Experiment runner: parse a JSON system spec, dispatch the requested
computation, enforce caps and seeds, emit a machine-readable report.

Exit status: 0 on success, 1 when an assertion failed or a cap aborted the
run, 2 on spec parse or validation errors.  Outputs are written atomically;
identical config and seed give byte-identical reports apart from the timing
block.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np

from . import __version__
from ._parallel import pmap
from .groups import FolnerDescriptor, GroupSpec, WindowCapExceeded, box
from .metrics import WeightScheme
from .subshifts import PatternCapExceeded, spec_from_json
from .entropy import entropy_series, entropy_estimate, weighted_entropy_series
from .carpet import CarpetSpec, SandwichViolation, carpet_dimension_report
from .selfsimilar import (NetTooCoarse, ProbeViolation, SelfSimilarSpec,
                          selfsimilar_cover_probe, selfsimilar_upper_bound)
from .homogeneous import (HomogeneousSpec, homogeneous_covering_probe,
                          homogeneous_gxn_entropy, homogeneous_slope_series)
from .kspace import (DemoHypothesisFailure, KSpaceSpec,
                     kg_covering_experiment, kg_mass_distribution_demo,
                     trend_slopes)


class SpecError(ValueError):
    pass


def _fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value).limit_denominator(10**15)


def _weights(doc, rank: int, default_rho: Fraction) -> WeightScheme:
    rho = default_rho
    if doc and "rho" in doc:
        rho = _fraction(doc["rho"])
    return WeightScheme(rank, rho)


def parse_system(doc: dict):
    """Build the concrete system object named by the spec document."""
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")
    system = doc.get("system", "subshift")
    try:
        if system == "subshift":
            return spec_from_json(doc)
        if system == "carpet":
            omega = spec_from_json(doc["omega"])
            weights = _weights(doc.get("weights"), omega.rank, Fraction(1, 4))
            return CarpetSpec(a=int(doc["a"]), b=int(doc["b"]), omega=omega,
                              weights=weights)
        if system == "selfsimilar":
            omega = spec_from_json(doc["omega"])
            weights = _weights(doc.get("weights"), 1, Fraction(1, 4))
            return SelfSimilarSpec(omega=omega,
                                   values=tuple(_fraction(v)
                                                for v in doc["values"]),
                                   c=_fraction(doc["c"]), weights=weights)
        if system == "homogeneous":
            digits = spec_from_json(doc["digits"])
            weights = _weights(doc.get("weights"), digits.rank - 1,
                               Fraction(1, 2**20))
            return HomogeneousSpec(base=int(doc["base"]), digit_spec=digits,
                                   weights=weights)
        if system == "kspace":
            rank = int(doc.get("rank", 1))
            weights = _weights(doc.get("weights"), rank, Fraction(1, 10**9))
            return KSpaceSpec(rank=rank, kind=doc.get("kind", "kset"),
                              weights=weights)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from exc
    raise SpecError(f"unknown system type {system!r}")


def validate(doc: dict) -> list[str]:
    """Schema and invariant pre-checks, no computation."""
    diagnostics = []
    if not isinstance(doc, dict):
        return ["spec document must be a JSON object"]
    system = doc.get("system", "subshift")
    if system == "carpet":
        a, b = doc.get("a"), doc.get("b")
        if not (isinstance(a, int) and isinstance(b, int) and a >= b >= 2):
            diagnostics.append("carpet bases need integers a >= b >= 2")
    if system == "selfsimilar":
        try:
            c = _fraction(doc.get("c", 1))
        except (TypeError, ValueError):
            c = Fraction(1)
        if not (0 < c < 1):
            diagnostics.append("contraction requires 0 < c < 1")
        if "values" not in doc or "omega" not in doc:
            diagnostics.append("selfsimilar specs need 'values' and 'omega'")
    if system == "homogeneous":
        if not (isinstance(doc.get("base"), int) and doc["base"] >= 2):
            diagnostics.append("homogeneous base must be an integer >= 2")
    if system == "kspace" and doc.get("kind", "kset") not in ("kset", "unit"):
        diagnostics.append("kspace kind must be 'kset' or 'unit'")
    if "weights" in doc and doc["weights"]:
        try:
            rho = _fraction(doc["weights"].get("rho", "1/4"))
            if not (0 < rho < 1):
                diagnostics.append("weight decay rho must be in (0, 1)")
        except (TypeError, ValueError, AttributeError):
            diagnostics.append("weights.rho is not a number")
    if not diagnostics:
        try:
            parse_system(doc)
        except SpecError as exc:
            diagnostics.append(str(exc))
    return diagnostics


# ---------------------------------------------------------------------------
# command implementations

def _num(value, provenance: str) -> dict:
    return {"value": value, "provenance": provenance}


def parse_caps(text: str) -> dict:
    caps = {"cells": 10**6, "patterns": 10**6, "cloud": 200_000}
    if text:
        for part in text.split(","):
            key, _, val = part.partition("=")
            if key.strip() not in caps or not val.isdigit() or int(val) <= 0:
                raise SpecError(f"bad caps entry {part!r}")
            caps[key.strip()] = int(val)
    return caps


def _cmd_entropy(system, args) -> dict:
    caps = parse_caps(args.caps)
    folner = FolnerDescriptor(args.folner, tuple(
        range(1 if args.folner == "boxes" else 0, args.m_max + 1)))
    if args.w is not None and args.w != "auto":
        series = weighted_entropy_series(system, folner, float(args.w),
                                         caps["patterns"])
        rows = [(r.index, r.size, r.log_z, r.per_site) for r in series.rows]
        return {"series": rows, "csv": series.to_csv(),
                "per_site": _num(series.value, "estimate"), "w": float(args.w)}
    series = entropy_series(system, folner, caps["cells"])
    est = entropy_estimate(series)
    rows = [(r.index, r.size, r.log_count, r.per_site) for r in series.rows]
    out = {"series": rows, "csv": series.to_csv(),
           "per_site": _num(est.value, "estimate")}
    if est.certified_upper is not None:
        out["certified_upper"] = _num(est.certified_upper, "certified-bound")
    return out


def _cmd_carpet_dims(system: CarpetSpec, args) -> dict:
    w = None if args.w in (None, "auto") else float(args.w)
    caps = parse_caps(args.caps)
    report = carpet_dimension_report(system, m_max=args.m_max,
                                     l_max=args.l_max,
                                     folner_family=args.folner,
                                     w_override=w, seed=args.seed,
                                     cap=caps["cloud"])
    report["mdim_M"] = _num(report["mdim_M"], "estimate")
    report["mdim_H"] = _num(report["mdim_H"], "estimate")
    return report


def _cmd_selfsimilar_bound(system: SelfSimilarSpec, args) -> dict:
    out = selfsimilar_upper_bound(system)
    return {"bound": _num(out["bound"], out["entropy_provenance"]),
            "entropy": _num(out["entropy"], out["entropy_provenance"])}


def _parse_eps_grid(text: str):
    grid = [Fraction(part) for part in text.split(",")]
    if any(not 0 < e < 1 for e in grid):
        raise SpecError("eps grid values must lie in (0, 1)")
    if any(a <= b for a, b in zip(grid, grid[1:])):
        raise SpecError("eps grid must be strictly decreasing")
    return grid


def _cmd_selfsimilar_probe(system: SelfSimilarSpec, args) -> dict:
    grid = (_parse_eps_grid(args.eps_grid) if args.eps_grid
            else [system.c ** j for j in range(2, 9)])
    windows = [box(n, GroupSpec(1)) for n in
               (args.window_sizes or (512,))]
    report = selfsimilar_cover_probe(system, grid, windows)
    report["slopes"] = {str(k): _num(v, "certified-bound")
                        for k, v in report["slopes"].items()}
    for row in report["rows"]:
        row["net_count"] = str(row["net_count"])
    return report


def _cmd_homog_entropy(system: HomogeneousSpec, args) -> dict:
    folner = FolnerDescriptor(args.folner, tuple(
        range(1, args.m_max + 1)))
    depths = args.depths or [4, 8, 12]
    out = homogeneous_gxn_entropy(system, folner, depths)
    rows = [(r.n, r.depth, r.size, r.log_count, r.per_site)
            for r in out["series"].rows]
    return {"series": rows,
            "entropy": _num(out["entropy"], "estimate"),
            "prediction": _num(out["prediction"], "estimate")}


def _cmd_homog_probe(system: HomogeneousSpec, args) -> dict:
    grid = (_parse_eps_grid(args.eps_grid) if args.eps_grid
            else [Fraction(1, system.base ** 3)])
    folner = FolnerDescriptor(args.folner, (1,))
    rows = homogeneous_covering_probe(system, folner, grid)
    slopes = homogeneous_slope_series(system, grid)
    return {"rows": [row.__dict__ for row in rows],
            "slopes": slopes,
            "implication": _num(all(r.implication_ok for r in rows), "exact")}


def _cmd_kg_experiment(system: KSpaceSpec, args) -> dict:
    grid = (_parse_eps_grid(args.eps_grid) if args.eps_grid
            else [Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000),
                  Fraction(1, 10000)])
    folner = FolnerDescriptor(args.folner, tuple(
        range(1, args.m_max + 1)))
    rows = kg_covering_experiment(system, folner, grid)
    return {"rows": [{"n": r.n_index, "eps": r.eps, "window": r.window,
                      "gamma": r.gamma, "zeta": r.zeta,
                      "lower": str(r.lower), "upper": str(r.upper),
                      "formula_lower": str(r.formula_lower),
                      "formula_upper": str(r.formula_upper),
                      "slope_lower": r.slope_lower,
                      "slope_upper": r.slope_upper,
                      "bracket_ok": r.bracket_ok} for r in rows],
            "trend_slopes": trend_slopes(rows[:len(grid)])}


def _cmd_kg_mass_demo(system: KSpaceSpec, args) -> dict:
    folner = FolnerDescriptor(args.folner, (1,))
    ks = [int(k) for k in (args.k_list or "2,4,6").split(",")]
    eps = Fraction(args.eps) if args.eps else Fraction(1, 10)
    reports = pmap(lambda k: kg_mass_distribution_demo(
        system, k, folner, 1, eps, seed=args.seed), ks)
    return {"reports": [{"k": r.k, "bound": _num(r.bound, "certified-bound"),
                         "points_checked": r.points_checked,
                         "worst_margin": r.worst_margin} for r in reports],
            "monotone": all(a.bound >= b.bound
                            for a, b in zip(reports, reports[1:]))}


COMMANDS = {
    "entropy": (_cmd_entropy, "subshift"),
    "carpet-dims": (_cmd_carpet_dims, "carpet"),
    "selfsimilar-bound": (_cmd_selfsimilar_bound, "selfsimilar"),
    "selfsimilar-probe": (_cmd_selfsimilar_probe, "selfsimilar"),
    "homog-entropy": (_cmd_homog_entropy, "homogeneous"),
    "homog-probe": (_cmd_homog_probe, "homogeneous"),
    "kg-experiment": (_cmd_kg_experiment, "kspace"),
    "kg-mass-demo": (_cmd_kg_mass_demo, "kspace"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meandim",
        description="entropy and mean-dimension experiments over Z^d")
    parser.add_argument("command", choices=list(COMMANDS) + ["validate"])
    parser.add_argument("--spec", required=True, help="JSON system spec path")
    parser.add_argument("--m-max", type=int, default=4)
    parser.add_argument("--l-max", type=int, default=4)
    parser.add_argument("--depths", type=int, nargs="*")
    parser.add_argument("--eps-grid", help="comma separated, decreasing")
    parser.add_argument("--folner", choices=("balls", "boxes"),
                        default="balls")
    parser.add_argument("--w", help="weighted-entropy exponent or 'auto'")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--window-sizes", type=int, nargs="*")
    parser.add_argument("--k-list", help="comma separated sharpness values")
    parser.add_argument("--eps", help="single scale for the mass demo")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--caps", help="cells=N,patterns=N,cloud=N",
                        default="")
    return parser


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".meandim-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _report_text(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        with open(args.spec) as handle:
            doc = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        diagnostics = validate(doc)
        report = {"command": "validate", "diagnostics": diagnostics,
                  "ok": not diagnostics}
        print(_report_text(report), end="")
        return 0 if not diagnostics else 2

    handler, expected = COMMANDS[args.command]
    if doc.get("system", "subshift") != expected:
        print(f"spec error: {args.command} expects a {expected!r} spec",
              file=sys.stderr)
        return 2
    try:
        system = parse_system(doc)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2

    status = 0
    try:
        results = handler(system, args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except (ProbeViolation, SandwichViolation, DemoHypothesisFailure,
            AssertionError) as exc:
        results = {"assertion_failed": str(exc)}
        status = 1
    except (WindowCapExceeded, PatternCapExceeded, NetTooCoarse,
            RuntimeError) as exc:
        results = {"cap_abort": str(exc)}
        status = 1

    report = {
        "command": args.command,
        "config": {"spec": doc, "m_max": args.m_max, "l_max": args.l_max,
                   "folner": args.folner, "w": args.w, "seed": args.seed,
                   "eps_grid": args.eps_grid, "depths": args.depths,
                   "window_sizes": args.window_sizes},
        "results": results,
        "status": "ok" if status == 0 else "failed",
        "versions": {"meandim": __version__,
                     "python": platform.python_version(),
                     "numpy": np.__version__},
        "timing": {"seconds": round(time.monotonic() - started, 6)},
    }
    text = _report_text(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(os.path.join(args.out, "report.json"), text)
        if isinstance(results, dict) and "csv" in results:
            _atomic_write(os.path.join(args.out, "series.csv"),
                          results["csv"])
        rows = results.get("rows") if isinstance(results, dict) else None
        if rows and all(isinstance(r, dict) for r in rows):
            lines = "\n".join(json.dumps(r, sort_keys=True, default=str)
                              for r in rows)
            _atomic_write(os.path.join(args.out, "series.jsonl"), lines + "\n")
            keys = sorted({k for r in rows for k in r
                           if not isinstance(r[k], (dict, list))})
            csv_lines = [",".join(keys)]
            csv_lines += [",".join(str(r.get(k, "")) for k in keys)
                          for r in rows]
            _atomic_write(os.path.join(args.out, "summary.csv"),
                          "\n".join(csv_lines) + "\n")
    print(text, end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
