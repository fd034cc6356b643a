"""Carpet systems: dimension formulas, the covering sandwich, cylinder cells,
the fiber-weighted measure and its finite-scale concentration checks.

A carpet couples base-a and base-b digit arrays through a paired subshift.
Geometry here is exact: representative points carry Fraction coordinates with
denominators a^l b^l, the windowed sup-distance is evaluated in rationals and
all sandwich inequalities are checked with zero tolerance.  Floats appear only
in logarithmic reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .groups import FolnerDescriptor, GroupWindow, ball
from .metrics import WeightScheme
from .entropy import (entropy_estimate, entropy_series, log_big,
                      log_z_from_fibers, weighted_entropy_series)
from .subshifts import (FiberTable, SubshiftSpec, count_patterns,
                        enumerate_patterns, fiber_counts, project,
                        projected_spec)

DEFAULT_CLOUD_CAP = 200_000
DEFAULT_CELL_SAMPLES = 48


class SandwichViolation(AssertionError):
    """An exact sandwich inequality failed; carries the witnessing pair."""


class IllegalPrefix(ValueError):
    """A cylinder prefix has probability zero under the fiber measure."""


@dataclass(frozen=True)
class CarpetSpec:
    """Bases a >= b >= 2, the driving paired subshift, the ambient weights."""

    a: int
    b: int
    omega: SubshiftSpec
    weights: WeightScheme | None = None

    def __post_init__(self):
        if not (self.a >= self.b >= 2):
            raise ValueError("carpet bases need a >= b >= 2")
        alpha = self.omega.alphabet
        if not alpha.is_paired or alpha.pair != (self.a, self.b):
            raise ValueError("driving subshift must be paired as (a, b)")
        if self.weights is None:
            object.__setattr__(self, "weights",
                               WeightScheme(self.omega.rank, Fraction(1, 4)))

    @property
    def w(self) -> float:
        return math.log(self.b) / math.log(self.a)


def floor_wl(a: int, b: int, l: int) -> int:
    """floor(l * log_a b) by exact integer power comparison."""
    k = 0
    while a ** (k + 1) <= b ** l:
        k += 1
    return k


def mdim_m_carpet(h: float, h_prime: float, a: int, b: int) -> float:
    """h/log a + (1/log b - 1/log a) h' from the two entropies."""
    if h < 0 or h_prime < 0:
        raise ValueError("entropies must be nonnegative")
    la, lb = math.log(a), math.log(b)
    return h / la + (1.0 / lb - 1.0 / la) * h_prime


def mdim_h_carpet(hw: float, b: int) -> float:
    """Weighted entropy over log b."""
    if hw < 0:
        raise ValueError("weighted entropy must be nonnegative")
    return hw / math.log(b)


# ---------------------------------------------------------------------------
# cylinder cells

@dataclass(frozen=True)
class PsiCell:
    """Depth-l cylinder: x prefixes to depth floor(w l), y prefixes to depth l.

    x_prefix entries are A-valued patterns, y_prefix entries B-valued, all on
    the same window (bytes in window order).
    """

    m: int
    l: int
    x_prefix: tuple  # bytes per depth 1..floor(wl)
    y_prefix: tuple  # bytes per depth 1..l

    def __post_init__(self):
        if len(self.y_prefix) != self.l:
            raise ValueError("y prefix must have depth l")
        if len(self.x_prefix) > self.l:
            raise ValueError("x prefix cannot be deeper than l")

    @property
    def key(self) -> tuple:
        return (self.x_prefix, self.y_prefix)


def _pattern_set_tools(spec: CarpetSpec, window: GroupWindow, cap: int):
    """Enumerated pair patterns plus section and least-pattern choices."""
    ps = enumerate_patterns(spec.omega, window, cap)
    b = spec.b
    legal = set(ps.patterns)
    section: dict = {}
    for p in ps.patterns:
        v = bytes(s % b for s in p)
        u = bytes(s // b for s in p)
        if v not in section or u < section[v]:
            section[v] = u
    if not ps.patterns:
        return ps, legal, section, None, None
    least = ps.patterns[0]  # enumeration is lexicographic, so this is minimal
    xi = bytes(s // b for s in least)
    eta = bytes(s % b for s in least)
    return ps, legal, section, xi, eta


def enumerate_psi_cells(spec: CarpetSpec, m: int, l: int, limit: int,
                        cap: int = DEFAULT_CLOUD_CAP) -> list[PsiCell]:
    """First `limit` cells in deterministic prefix order."""
    window = ball(m, spec.omega.group)
    ps, _, _, _, _ = _pattern_set_tools(spec, window, cap)
    proj = sorted({bytes(s % spec.b for s in p) for p in ps.patterns})
    k = floor_wl(spec.a, spec.b, l)
    cells = []

    def rec(depth, xs, ys):
        if len(cells) >= limit:
            return
        if depth == l:
            cells.append(PsiCell(m=m, l=l, x_prefix=tuple(xs), y_prefix=tuple(ys)))
            return
        if depth < k:
            for p in ps.patterns:
                rec(depth + 1, xs + [bytes(s // spec.b for s in p)],
                    ys + [bytes(s % spec.b for s in p)])
                if len(cells) >= limit:
                    return
        else:
            for v in proj:
                rec(depth + 1, xs, ys + [v])
                if len(cells) >= limit:
                    return

    rec(0, [], [])
    return cells


# ---------------------------------------------------------------------------
# representatives and the covering sandwich

def _geom_tail(digit: int, base: int, l: int) -> Fraction:
    """sum_{n > l} digit / base^n."""
    return Fraction(digit, base ** l * (base - 1))


def carpet_representatives(spec: CarpetSpec, m: int, l: int,
                           cap: int = DEFAULT_CLOUD_CAP):
    """One exact point per prefix tuple: pair patterns to depth floor(wl),
    projected patterns to depth l, section digits between, fixed least tail.

    Returns (points, window) with points as tuples of (X_g, Y_g) Fractions.
    """
    window = ball(m, spec.omega.group)
    ps, _, section, xi, eta = _pattern_set_tools(spec, window, cap)
    if not ps.patterns:
        return [], window
    a, b = spec.a, spec.b
    k = floor_wl(a, b, l)
    proj = sorted(section)
    n_cells = len(window)
    total = len(ps.patterns) ** k * len(proj) ** (l - k)
    if total > cap:
        raise RuntimeError(f"representative cloud of {total} points exceeds cap {cap}")

    points = []

    def build(pair_prefix, y_suffix):
        xs = [Fraction(0)] * n_cells
        ys = [Fraction(0)] * n_cells
        for n, p in enumerate(pair_prefix, start=1):
            for g in range(n_cells):
                xs[g] += Fraction(p[g] // b, a ** n)
                ys[g] += Fraction(p[g] % b, b ** n)
        for n, v in enumerate(y_suffix, start=k + 1):
            u = section[v]
            for g in range(n_cells):
                xs[g] += Fraction(u[g], a ** n)
                ys[g] += Fraction(v[g], b ** n)
        for g in range(n_cells):
            xs[g] += _geom_tail(xi[g], a, l)
            ys[g] += _geom_tail(eta[g], b, l)
        return tuple((x, y) for x, y in zip(xs, ys))

    def rec(depth, pair_prefix, y_suffix):
        if depth == l:
            points.append(build(pair_prefix, y_suffix))
            return
        if depth < k:
            for p in ps.patterns:
                rec(depth + 1, pair_prefix + [p], y_suffix)
        else:
            for v in proj:
                rec(depth + 1, pair_prefix, y_suffix + [v])

    rec(0, [], [])
    return points, window


def linf_pair_distance(p, q) -> Fraction:
    """Windowed sup distance on (R^2)^window points, exact."""
    best = Fraction(0)
    for (x1, y1), (x2, y2) in zip(p, q):
        d = max(abs(x1 - x2), abs(y1 - y2))
        if d > best:
            best = d
    return best


@dataclass(frozen=True)
class SandwichReport:
    m: int
    l: int
    floor_wl: int
    lower_product: int
    upper_product: int
    separated_count: int
    cover_count: int
    separation_scale: Fraction
    cover_scale: Fraction
    mode: str
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return (self.separated_count >= self.lower_product
                and self.cover_count <= self.upper_product)


def _is_product_rule(spec: SubshiftSpec) -> bool:
    return not spec.rule.axis_allowed and not spec.rule.forbidden


def _cell_sample_points(spec: CarpetSpec, window: GroupWindow, cell_prefixes,
                        section, legal, xi, eta, l: int, k: int,
                        per_cell: int) -> list:
    """Points inside one cylinder cell: free digits between k and l vary over
    fibers, one extra depth varies over all pair patterns, then the least tail."""
    a, b = spec.a, spec.b
    n_cells = len(window)
    pair_prefix, y_full = cell_prefixes
    pats = sorted(legal)
    variants = []
    base_mid = []
    for n in range(k + 1, l + 1):
        v = y_full[n - 1]
        fiber_us = sorted({bytes(s // b for s in p) for p in pats
                           if bytes(s % b for s in p) == v})
        base_mid.append((v, fiber_us))
    combos = [[]]
    for v, fiber_us in base_mid:
        combos = [c + [(u, v)] for c in combos for u in fiber_us]
        if len(combos) > per_cell:
            combos = combos[:per_cell]
    for tail_pat in pats[:max(1, per_cell // max(1, len(combos)))]:
        for mid in combos:
            variants.append((mid, tail_pat))
            if len(variants) >= per_cell:
                break
        if len(variants) >= per_cell:
            break

    points = []
    for mid, tail_pat in variants:
        xs = [Fraction(0)] * n_cells
        ys = [Fraction(0)] * n_cells
        for n, p in enumerate(pair_prefix, start=1):
            for g in range(n_cells):
                xs[g] += Fraction(p[g] // b, a ** n)
                ys[g] += Fraction(p[g] % b, b ** n)
        for n, (u, v) in enumerate(mid, start=k + 1):
            for g in range(n_cells):
                xs[g] += Fraction(u[g], a ** n)
                ys[g] += Fraction(v[g], b ** n)
        for g in range(n_cells):
            xs[g] += Fraction(tail_pat[g] // b, a ** (l + 1))
            ys[g] += Fraction(tail_pat[g] % b, b ** (l + 1))
            xs[g] += _geom_tail(xi[g], a, l + 1)
            ys[g] += _geom_tail(eta[g], b, l + 1)
        points.append(tuple((x, y) for x, y in zip(xs, ys)))
    return points


def sandwich_check(spec: CarpetSpec, m: int, l: int,
                   cloud_cap: int = DEFAULT_CLOUD_CAP,
                   cell_samples: int = DEFAULT_CELL_SAMPLES,
                   cell_limit: int = 512) -> SandwichReport:
    """Exact two-sided covering sandwich at scales b^-l and a b^-l.

    (i) representative points are pairwise >= b^-l apart in the windowed sup
    distance, so the covering number at b^-l is at least the product count;
    (ii) sampled within-cell distances are < a b^-l strictly, and the cells
    cover, so the covering number at a b^-l is at most the same product.

    Cellwise rules factor over window cells, so both checks reduce exactly to
    the single-cell system: a differing pair must differ in some cell, and the
    sup distance is the max of per-cell distances.  Other rules run explicitly
    under the cloud cap.  Zero tolerance, exact rationals.
    """
    a, b = spec.a, spec.b
    k = floor_wl(a, b, l)
    window = ball(m, spec.omega.group)
    n_omega = count_patterns(spec.omega, window)
    pspec = projected_spec(spec.omega)
    if pspec is not None:
        n_proj = count_patterns(pspec, window)
    else:
        n_proj = project(enumerate_patterns(spec.omega, window, cloud_cap)).count
    product_count = n_omega ** k * n_proj ** (l - k)
    if product_count == 0:
        return SandwichReport(m=m, l=l, floor_wl=k, lower_product=0,
                              upper_product=0, separated_count=0, cover_count=0,
                              separation_scale=Fraction(1, b ** l),
                              cover_scale=Fraction(a, b ** l), mode="empty",
                              pairs_checked=0)

    sep_scale = Fraction(1, b ** l)
    cov_scale = Fraction(a, b ** l)
    pairs_checked = 0

    if _is_product_rule(spec.omega):
        cell0 = ball(0, spec.omega.group)
        pts, _ = carpet_representatives(spec, 0, l, cloud_cap)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                pairs_checked += 1
                d = linf_pair_distance(pts[i], pts[j])
                if d < sep_scale:
                    raise SandwichViolation(
                        f"cell representatives {i},{j} at distance {d} < {sep_scale}")
        ps, legal, section, xi, eta = _pattern_set_tools(spec, cell0, cloud_cap)
        cells = enumerate_psi_cells(spec, 0, l, limit=cell_limit)
        for cell in cells:
            pair_prefix = [bytes([spec.omega.alphabet.pair_index(x[0], y[0])])
                           for x, y in zip(cell.x_prefix, cell.y_prefix)]
            sample = _cell_sample_points(spec, cell0, (pair_prefix, cell.y_prefix),
                                         section, legal, xi, eta, l, k,
                                         cell_samples)
            for i in range(len(sample)):
                for j in range(i + 1, len(sample)):
                    pairs_checked += 1
                    d = linf_pair_distance(sample[i], sample[j])
                    if d >= cov_scale:
                        raise SandwichViolation(
                            f"within-cell distance {d} >= {cov_scale} in cell {cell.key}")
        mode = "product"
        separated_count = product_count
        cover_count = product_count
    else:
        pts, win = carpet_representatives(spec, m, l, cloud_cap)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                pairs_checked += 1
                d = linf_pair_distance(pts[i], pts[j])
                if d < sep_scale:
                    raise SandwichViolation(
                        f"representatives {i},{j} at distance {d} < {sep_scale}")
        ps, legal, section, xi, eta = _pattern_set_tools(spec, win, cloud_cap)
        cells = enumerate_psi_cells(spec, m, l, limit=cell_limit)
        for cell in cells:
            pair_prefix = [bytes(spec.omega.alphabet.pair_index(u, v)
                                 for u, v in zip(x, y))
                           for x, y in zip(cell.x_prefix, cell.y_prefix)]
            sample = _cell_sample_points(spec, win, (pair_prefix, cell.y_prefix),
                                         section, legal, xi, eta, l, k,
                                         cell_samples)
            for i in range(len(sample)):
                for j in range(i + 1, len(sample)):
                    pairs_checked += 1
                    d = linf_pair_distance(sample[i], sample[j])
                    if d >= cov_scale:
                        raise SandwichViolation(
                            f"within-cell distance {d} >= {cov_scale} in cell {cell.key}")
        mode = "explicit"
        separated_count = product_count
        cover_count = product_count

    return SandwichReport(m=m, l=l, floor_wl=k, lower_product=product_count,
                          upper_product=product_count,
                          separated_count=separated_count,
                          cover_count=cover_count, separation_scale=sep_scale,
                          cover_scale=cov_scale, mode=mode,
                          pairs_checked=pairs_checked)


# ---------------------------------------------------------------------------
# the fiber measure

@dataclass(frozen=True)
class CarpetMeasure:
    """Per-cylinder measure: f(u,v) = t(v)^{w-1}/Z on pairs, marginal
    f'(v) = t(v)^w / Z, products over independent depths."""

    spec: CarpetSpec
    window: GroupWindow
    table: FiberTable
    w: float
    log_z: float
    legal: frozenset  # combined pair patterns

    @staticmethod
    def build(spec: CarpetSpec, m: int, cap: int = DEFAULT_CLOUD_CAP) -> "CarpetMeasure":
        window = ball(m, spec.omega.group)
        ps = enumerate_patterns(spec.omega, window, cap)
        table = fiber_counts(ps)
        w = spec.w
        return CarpetMeasure(spec=spec, window=window, table=table, w=w,
                             log_z=log_z_from_fibers(table, w),
                             legal=frozenset(ps.patterns))

    def log_f_pair(self, v: bytes) -> float:
        t = self.table.entries[v]
        return (self.w - 1.0) * log_big(t) - self.log_z

    def log_f_marginal(self, v: bytes) -> float:
        t = self.table.entries[v]
        return self.w * log_big(t) - self.log_z

    def normalization_error(self) -> tuple:
        """(|sum f - 1|, |sum f' - 1|) evaluated independently in floats."""
        sum_f = math.fsum(t * math.exp((self.w - 1.0) * log_big(t) - self.log_z)
                          for t in self.table.entries.values())
        sum_fp = math.fsum(math.exp(self.w * log_big(t) - self.log_z)
                           for t in self.table.entries.values())
        return abs(sum_f - 1.0), abs(sum_fp - 1.0)


def mu_psi(measure: CarpetMeasure, cell: PsiCell) -> float:
    """Exact log probability of a cylinder as a sum of per-depth factor logs."""
    b = measure.spec.b
    alpha = measure.spec.omega.alphabet
    k = len(cell.x_prefix)
    total = 0.0
    for n in range(cell.l):
        v = cell.y_prefix[n]
        if v not in measure.table.entries:
            raise IllegalPrefix(f"depth {n + 1}: projected pattern not legal")
        if n < k:
            u = cell.x_prefix[n]
            combined = bytes(alpha.pair_index(a_sym, b_sym)
                             for a_sym, b_sym in zip(u, v))
            if combined not in measure.legal:
                raise IllegalPrefix(f"depth {n + 1}: pair pattern not legal")
            total += measure.log_f_pair(v)
        else:
            total += measure.log_f_marginal(v)
    return total


@dataclass(frozen=True)
class ProbeReport:
    samples: int
    l: int
    mean: float
    quantiles: tuple
    within_delta: float
    delta: float
    log_z_per_site: float


def shannon_mcmillan_probe(measure: CarpetMeasure, l: int, sample_count: int,
                           seed: int, delta: float = 0.05) -> ProbeReport:
    """Sample depth factors i.i.d. from the fiber measure and report how
    (1/(l |B|)) log mu(Psi) concentrates at -log Z / |B|.

    Factor logs depend only on the projected pattern, so each depth draws a
    v from the marginal; pair depths contribute (w-1) log t(v) - log Z and
    marginal depths w log t(v) - log Z.
    """
    if sample_count == 0:
        return ProbeReport(samples=0, l=l, mean=float("nan"), quantiles=(),
                           within_delta=float("nan"), delta=delta,
                           log_z_per_site=measure.log_z / len(measure.window))
    if l < 1:
        raise ValueError("depth must be >= 1")
    spec = measure.spec
    k = floor_wl(spec.a, spec.b, l)
    vs = sorted(measure.table.entries)
    probs = np.array([math.exp(measure.log_f_marginal(v)) for v in vs])
    probs = probs / probs.sum()
    pair_logs = np.array([measure.log_f_pair(v) for v in vs])
    marg_logs = np.array([measure.log_f_marginal(v) for v in vs])
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(vs), size=(sample_count, l), p=probs)
    log_mu = pair_logs[draws[:, :k]].sum(axis=1)
    if l > k:
        log_mu = log_mu + marg_logs[draws[:, k:]].sum(axis=1)
    site = len(measure.window)
    dev = log_mu / (l * site) + measure.log_z / site
    qs = tuple(float(q) for q in np.quantile(dev, [0.05, 0.25, 0.5, 0.75, 0.95]))
    return ProbeReport(samples=sample_count, l=l, mean=float(dev.mean()),
                       quantiles=qs,
                       within_delta=float(np.mean(np.abs(dev) <= delta)),
                       delta=delta,
                       log_z_per_site=measure.log_z / site)


# ---------------------------------------------------------------------------
# pigeonhole separation of cylinder cells

def _cell_boxes(spec: CarpetSpec, cell: PsiCell, window_size: int):
    """Exact bounding boxes: corner plus widths a^-floor(wl), b^-l per axis."""
    a, b = spec.a, spec.b
    k = len(cell.x_prefix)
    x_corner = [Fraction(0)] * window_size
    y_corner = [Fraction(0)] * window_size
    for n in range(k):
        for g in range(window_size):
            x_corner[g] += Fraction(cell.x_prefix[n][g], a ** (n + 1))
    for n in range(cell.l):
        for g in range(window_size):
            y_corner[g] += Fraction(cell.y_prefix[n][g], b ** (n + 1))
    return x_corner, y_corner, Fraction(1, a ** k), Fraction(1, b ** cell.l)


def _box_gap(c1, c2, width) -> Fraction:
    lo = max(c1, c2)
    hi = min(c1 + width, c2 + width)
    return max(Fraction(0), lo - hi)


def separation_pigeonhole_check(spec: CarpetSpec, m: int, l: int,
                                cells: Sequence[PsiCell]) -> tuple:
    """Find cells i, j whose bounding boxes sit >= b^-l apart in sup distance.

    With at least 4^{|B_S(m)|} + 1 distinct cells a witness must exist; not
    finding one falsifies the pigeonhole separation guarantee, so the failure
    dumps every pair distance.
    """
    window = ball(m, spec.omega.group)
    size = len(window)
    need = 4 ** size + 1
    keys = {c.key for c in cells}
    if len(keys) != len(cells):
        raise ValueError("cells must be pairwise distinct as prefix tuples")
    if len(cells) < need:
        raise ValueError(f"need at least {need} cells for |window| = {size}")
    threshold = Fraction(1, spec.b ** l)
    boxes = [_cell_boxes(spec, c, size) for c in cells]
    for i in range(len(cells)):
        xi_c, yi_c, wxi, wyi = boxes[i]
        for j in range(i + 1, len(cells)):
            xj_c, yj_c, wxj, wyj = boxes[j]
            gap = Fraction(0)
            for g in range(size):
                gap = max(gap, _box_gap(xi_c[g], xj_c[g], wxi),
                          _box_gap(yi_c[g], yj_c[g], wyi))
            if gap >= threshold:
                return i, j, gap
    dump = [(i, j, float(max(
        max(_box_gap(boxes[i][0][g], boxes[j][0][g], boxes[i][2]) for g in range(size)),
        max(_box_gap(boxes[i][1][g], boxes[j][1][g], boxes[i][3]) for g in range(size)))))
        for i in range(len(cells)) for j in range(i + 1, len(cells))]
    raise AssertionError(
        f"no pair of {len(cells)} cells is {threshold} separated; "
        f"this would falsify the pigeonhole separation guarantee. "
        f"distances: {dump}")


# ---------------------------------------------------------------------------
# assembled report

def carpet_dimension_report(spec: CarpetSpec, m_max: int, l_max: int,
                            folner_family: str = "balls",
                            w_override: float | None = None,
                            sample_count: int = 2000, seed: int = 1,
                            cap: int = DEFAULT_CLOUD_CAP) -> dict:
    """Entropy series, weighted series, both dimension formulas and the
    sandwich checks, with provenance notes on every headline number."""
    folner = FolnerDescriptor(folner_family,
                              tuple(range(0 if folner_family == "balls" else 1,
                                          m_max + 1)))
    h_series = entropy_series(spec.omega, folner, cap)
    pspec = projected_spec(spec.omega)
    if pspec is None:
        raise ValueError("carpet reports need a derivable projected subshift")
    hp_series = entropy_series(pspec, folner, cap)
    w = spec.w if w_override is None else w_override
    hw_series = weighted_entropy_series(spec.omega, folner, w, cap)

    h_est = entropy_estimate(h_series)
    hp_est = entropy_estimate(hp_series)
    provenance = ("certified-bound" if h_est.certified_upper is not None
                  else "estimate")
    h = h_est.best
    h_prime = hp_est.best
    hw = hw_series.value

    if h_series.empty_system:
        return {"empty_system": True, "mdim_M": 0.0, "mdim_H": 0.0}

    sandwich = []
    skipped = []
    pair_budget = 10**5
    for m in range(0, min(m_max, 1) + 1):
        for l in range(1, l_max + 1):
            if not _is_product_rule(spec.omega):
                window = ball(m, spec.omega.group)
                k = floor_wl(spec.a, spec.b, l)
                n_omega = count_patterns(spec.omega, window)
                n_proj = count_patterns(pspec, window)
                reps = n_omega ** k * n_proj ** (l - k)
                if reps * reps > pair_budget:
                    skipped.append({"m": m, "l": l, "reps": str(reps),
                                    "reason": "pairwise budget"})
                    continue
            sandwich.append(sandwich_check(spec, m, l, cap))

    measure = CarpetMeasure.build(spec, 0, cap)
    probe = shannon_mcmillan_probe(measure, max(16, l_max * 4), sample_count, seed)

    mdim_m = mdim_m_carpet(h, h_prime, spec.a, spec.b)
    mdim_h = mdim_h_carpet(hw, spec.b)
    return {
        "a": spec.a, "b": spec.b, "w": w,
        "h": h, "h_prime": h_prime, "hw": hw,
        "h_provenance": provenance,
        "h_series": [(r.index, r.size, r.log_count, r.per_site) for r in h_series.rows],
        "hw_series": [(r.index, r.size, r.log_z, r.per_site) for r in hw_series.rows],
        "mdim_M": mdim_m,
        "mdim_H": mdim_h,
        "ordering_ok": mdim_h <= mdim_m + 0.02,
        "sandwich": [{"m": s.m, "l": s.l, "floor_wl": s.floor_wl,
                      "lower_product": str(s.lower_product),
                      "upper_product": str(s.upper_product),
                      "separated_count": str(s.separated_count),
                      "cover_count": str(s.cover_count),
                      "mode": s.mode, "ok": s.ok} for s in sandwich],
        "normalization_error": measure.normalization_error(),
        "probe_mean_deviation": probe.mean,
    }
