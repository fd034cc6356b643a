"""Entropy series over Folner windows.

Per-site log pattern counts (topological entropy), fiber-weighted sums
(weighted topological entropy) and digit-window counts for the product
G x N action.  Counts stay exact big integers; logarithms are taken at
reporting time only, natural base throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .groups import FolnerDescriptor, GroupSpec, product_window
from .subshifts import (FiberTable, SubshiftSpec, count_patterns,
                        fiber_table)

NEG_INF = float("-inf")


def log_big(n: int) -> float:
    """Natural log of a nonnegative big integer; 0 maps to -inf."""
    if n < 0:
        raise ValueError("counts are nonnegative")
    if n == 0:
        return NEG_INF
    return math.log(n)


@dataclass(frozen=True)
class EntropyRow:
    index: int
    size: int
    log_count: float
    per_site: float


@dataclass(frozen=True)
class EntropySeries:
    family: str
    rows: tuple
    name: str = ""
    boundary: str = "free"

    @property
    def empty_system(self) -> bool:
        return any(r.log_count == NEG_INF for r in self.rows)

    @property
    def value(self) -> float:
        return self.rows[-1].per_site

    def to_csv(self) -> str:
        lines = ["m,window_size,log_count,per_site"]
        for r in self.rows:
            lines.append(f"{r.index},{r.size},{r.log_count:.12f},{r.per_site:.12f}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WeightedEntropyRow:
    index: int
    size: int
    log_z: float
    per_site: float


@dataclass(frozen=True)
class WeightedEntropySeries:
    family: str
    w: float
    rows: tuple
    name: str = ""

    @property
    def value(self) -> float:
        return self.rows[-1].per_site

    def to_csv(self) -> str:
        lines = ["m,window_size,log_z,per_site"]
        for r in self.rows:
            lines.append(f"{r.index},{r.size},{r.log_z:.12f},{r.per_site:.12f}")
        return "\n".join(lines) + "\n"


def entropy_series(spec: SubshiftSpec, folner: FolnerDescriptor,
                   cap: int = 10**6) -> EntropySeries:
    """Per-site log pattern counts over the requested Folner windows."""
    group = spec.group
    rows = []
    for m in folner.indices:
        window = folner.window(m, group, cap)
        count = count_patterns(spec, window)
        lc = log_big(count)
        rows.append(EntropyRow(index=m, size=len(window), log_count=lc,
                               per_site=lc / len(window)))
    return EntropySeries(family=folner.family, rows=tuple(rows), name=spec.name)


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    certified_upper: float | None
    empty_system: bool = False

    @property
    def best(self) -> float:
        return self.certified_upper if self.certified_upper is not None else self.value


def entropy_estimate(series: EntropySeries) -> EntropyEstimate:
    """Last per-site value; over boxes also the min per-site row, which the
    tiling subadditivity of free-boundary counts certifies as an upper bound
    on the limit (and Ornstein-Weiss makes the limit family independent)."""
    if not series.rows:
        raise ValueError("series is empty")
    if series.empty_system:
        return EntropyEstimate(value=NEG_INF, certified_upper=None,
                               empty_system=True)
    value = series.rows[-1].per_site
    certified = None
    if series.family == "boxes" and series.boundary == "free":
        certified = min(r.per_site for r in series.rows)
    return EntropyEstimate(value=value, certified_upper=certified)


def log_z_from_fibers(table: FiberTable, w: float) -> float:
    """log Z = log sum_v t(v)^w by log-sum-exp; exact big-int path at w in {0,1}.

    t(v) can exceed 1e300, so the terms enter as w * log t(v), never as raw
    powers.
    """
    counts = list(table.entries.values())
    if not counts:
        return NEG_INF
    if w == 1:
        return log_big(sum(counts))
    if w == 0:
        return log_big(len(counts))
    terms = [w * log_big(t) for t in counts]
    m = max(terms)
    return m + math.log(math.fsum(math.exp(t - m) for t in terms))


def weighted_entropy_series(spec: SubshiftSpec, folner: FolnerDescriptor,
                            w: float, cap: int = 10**6) -> WeightedEntropySeries:
    """Per-site log Z_m where Z_m sums fiber counts t(v)^w over a window."""
    if not 0 <= w <= 1:
        raise ValueError("exponent w must lie in [0, 1]")
    if not spec.alphabet.is_paired:
        raise ValueError("weighted entropy needs a paired alphabet")
    group = spec.group
    rows = []
    for m in folner.indices:
        window = folner.window(m, group, cap)
        table = fiber_table(spec, window, cap)
        lz = log_z_from_fibers(table, w)
        rows.append(WeightedEntropyRow(index=m, size=len(window), log_z=lz,
                                       per_site=lz / len(window)))
    return WeightedEntropySeries(family=folner.family, w=w, rows=tuple(rows),
                                 name=spec.name)


def weighted_degeneration_check(spec: SubshiftSpec, folner: FolnerDescriptor,
                                cap: int = 10**6, digits: int = 12) -> dict:
    """w=1 rows must equal log|Omega| and w=0 rows log|Omega'|, bit for bit
    after rounding to the given digits."""
    group = spec.group
    s1 = weighted_entropy_series(spec, folner, 1.0, cap)
    s0 = weighted_entropy_series(spec, folner, 0.0, cap)
    ok = True
    detail = []
    for m, r1, r0 in zip(folner.indices, s1.rows, s0.rows):
        window = folner.window(m, group, cap)
        total = count_patterns(spec, window)
        table = fiber_table(spec, window, cap)
        want1 = round(log_big(total), digits)
        want0 = round(log_big(len(table.entries)), digits)
        got1 = round(r1.log_z, digits)
        got0 = round(r0.log_z, digits)
        detail.append({"m": m, "w1": (got1, want1), "w0": (got0, want0)})
        ok = ok and got1 == want1 and got0 == want0
    return {"ok": ok, "rows": detail}


@dataclass(frozen=True)
class GxnEntropyRow:
    n: int
    depth: int
    size: int
    log_count: float
    per_site: float


@dataclass(frozen=True)
class GxnEntropySeries:
    family: str
    rows: tuple
    name: str = ""

    @property
    def value(self) -> float:
        return self.rows[-1].per_site


def gxn_entropy_series(digit_spec: SubshiftSpec, folner: FolnerDescriptor,
                       depths: Sequence[int], cap: int = 10**6) -> GxnEntropySeries:
    """Counts on product windows F_n x {0..N-1} normalized by N * |F_n|.

    The digit subshift lives on Z^d x N, encoded as a rank d+1 spec whose last
    axis is the depth direction.
    """
    if digit_spec.rank < 2:
        raise ValueError("digit specs live on Z^d x N, rank >= 2")
    base_group = GroupSpec(digit_spec.rank - 1)
    rows = []
    for n in folner.indices:
        fwin = folner.window(n, base_group, cap)
        for depth in depths:
            window = product_window(fwin, depth, cap)
            count = count_patterns(digit_spec, window)
            lc = log_big(count)
            rows.append(GxnEntropyRow(n=n, depth=depth, size=len(window),
                                      log_count=lc,
                                      per_site=lc / (depth * len(fwin))))
    return GxnEntropySeries(family=folner.family, rows=tuple(rows),
                            name=digit_spec.name)


def family_independence_gap(spec: SubshiftSpec, ball_index: int, box_index: int,
                            cap: int = 10**6) -> float:
    """|ball per-site - box per-site| at the given indices; Ornstein-Weiss
    predicts this shrinks, and a large gap flags a boundary-semantics bug."""
    sb = entropy_series(spec, FolnerDescriptor("balls", (ball_index,)), cap)
    sx = entropy_series(spec, FolnerDescriptor("boxes", (box_index,)), cap)
    return abs(sb.value - sx.value)


def projection_gap_report(spec: SubshiftSpec, folner: FolnerDescriptor,
                          cap: int = 10**6) -> list[dict]:
    """Free-boundary versus exact projection counts for 1-d NN rules."""
    from .subshifts import projection_count_interval
    group = spec.group
    out = []
    for m in folner.indices:
        window = folner.window(m, group, cap)
        free = count_patterns(spec, window)
        try:
            proj = projection_count_interval(spec, window)
        except ValueError:
            proj = None
        out.append({"m": m, "free_boundary": free, "projection": proj,
                    "gap": None if proj is None else free - proj})
    return out
