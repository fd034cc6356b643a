"""Homogeneous torus systems: shift plus coordinatewise multiplication by b.

Systems are specified by digit subshifts on Z^d x N (rank d+1 specs whose
last axis is the digit depth), which makes invariance under both actions
automatic.  The probe checks the covering comparison between the plain
dynamical metric at scale eps and the product-action metric at scale
1/(2 c b), exactly, on truncated digit clouds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .groups import (FolnerDescriptor, GroupSpec, GroupWindow, ball,
                     minkowski_sum, product_window)
from .metrics import WeightScheme, circle_cover_count, tail_support
from .entropy import gxn_entropy_series
from .subshifts import SubshiftSpec, enumerate_patterns


class ProbeViolation(AssertionError):
    pass


@dataclass(frozen=True)
class HomogeneousSpec:
    """Base b >= 2, the digit subshift on Z^d x N, ambient weights on Z^d."""

    base: int
    digit_spec: SubshiftSpec
    weights: WeightScheme | None = None

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.digit_spec.rank < 2:
            raise ValueError("digit subshift lives on Z^d x N")
        if self.digit_spec.alphabet.size != self.base:
            raise ValueError("digit alphabet must be {0..b-1}")
        if self.weights is None:
            object.__setattr__(self, "weights",
                               WeightScheme(self.digit_spec.rank - 1,
                                            Fraction(1, 2**20)))

    @property
    def group_rank(self) -> int:
        return self.digit_spec.rank - 1


def homogeneous_gxn_entropy(spec: HomogeneousSpec, folner: FolnerDescriptor,
                            depths: Sequence[int]) -> dict:
    """Digit-window entropy series; the dimension prediction divides by log b."""
    series = gxn_entropy_series(spec.digit_spec, folner, depths)
    value = series.value
    return {"series": series, "entropy": value,
            "prediction": value / math.log(spec.base)}


# ---------------------------------------------------------------------------
# truncated digit clouds

@dataclass(frozen=True)
class DigitCloud:
    """Torus configurations from digit patterns, depth-truncated, tails pinned.

    Coordinates are exact rationals digits / b^depth; within the cloud every
    unstored coordinate agrees across points, so pairwise metric evaluations
    over the stored window are exact full-sum distances.
    """

    window: GroupWindow  # rank d window carrying the varying coordinates
    depth: int
    base: int
    points: tuple  # tuple of per-cell Fraction tuples


def digit_cloud(spec: HomogeneousSpec, window: GroupWindow, depth: int,
                cap: int = 100_000) -> DigitCloud:
    pw = product_window(window, depth)
    ps = enumerate_patterns(spec.digit_spec, pw, cap)
    b = spec.base
    ncells = len(window)
    pts = []
    for p in ps.patterns:
        vals = []
        for g in range(ncells):
            acc = Fraction(0)
            for k in range(depth):
                acc += Fraction(p[g * depth + k], b ** (k + 1))
            vals.append(acc)
        pts.append(tuple(vals))
    return DigitCloud(window=window, depth=depth, base=spec.base,
                      points=tuple(pts))


def _torus_dist(x: Fraction, y: Fraction) -> Fraction:
    d = abs(x - y) % 1
    return min(d, 1 - d)


def _left_distance(cloud: DigitCloud, weights: WeightScheme, orbit, x, y) -> Fraction:
    """d^sigma_F within the cloud: pinned coordinates contribute zero."""
    best = Fraction(0)
    cells = cloud.window.elements
    for h in orbit:
        s = Fraction(0)
        for g, xv, yv in zip(cells, x, y):
            if xv != yv:
                s += weights.weight(tuple(c - hc for c, hc in zip(g, h))) \
                     * _torus_dist(xv, yv)
        if s > best:
            best = s
    return best


def _right_distance(cloud: DigitCloud, weights: WeightScheme, orbit, depth_n,
                    x, y) -> Fraction:
    """d^{sigma,T}_{orbit x {0..N-1}} within the cloud, exact rationals."""
    b = cloud.base
    best = Fraction(0)
    cells = cloud.window.elements
    for h in orbit:
        for j in range(depth_n):
            s = Fraction(0)
            mult = b ** j
            for g, xv, yv in zip(cells, x, y):
                if xv != yv:
                    s += weights.weight(tuple(c - hc for c, hc in zip(g, h))) \
                         * _torus_dist((xv * mult) % 1, (yv * mult) % 1)
            if s > best:
                best = s
    return best


def _greedy_cover_count(points, dist, scale) -> int:
    n = len(points)
    remaining = set(range(n))
    count = 0
    half = scale / 2
    while remaining:
        count += 1
        center = min(remaining)
        covered = {j for j in remaining if dist(points[center], points[j]) <= half}
        remaining -= covered
    return count


def _greedy_sep_count(points, dist, scale) -> int:
    chosen = []
    for i in range(len(points)):
        if all(dist(points[i], points[j]) >= scale for j in chosen):
            chosen.append(i)
    return len(chosen)


@dataclass(frozen=True)
class HomogeneousProbeRow:
    n_index: int
    eps: float
    depth_n: int
    cloud_size: int
    implication_ok: bool
    pairs_checked: int
    left_lower: int
    left_upper: int
    right_lower: int
    right_upper: int


def homogeneous_covering_probe(spec: HomogeneousSpec,
                               folner: FolnerDescriptor,
                               eps_list: Sequence,
                               extra_depth: int = 1,
                               cap: int = 4000) -> list[HomogeneousProbeRow]:
    """Exact pairwise verification of the covering comparison.

    With N chosen by b^-N <= eps < b^-N+1 and S the eps/2 tail support, every
    pair at product-metric distance below 1/(2 c b) over SF_n x {0..N-1} must
    sit within eps in the plain dynamical metric over F_n.  Any violating pair
    aborts with a witness; greedy covering counts on both sides are reported
    and their certified bounds must nest.
    """
    group = GroupSpec(spec.group_rank)
    weights = spec.weights
    c_total = weights.total_upper()
    rows = []
    for n in folner.indices:
        fwin = folner.window(n, group)
        for eps in eps_list:
            eps = Fraction(eps)
            depth_n = 1
            while Fraction(1, spec.base ** depth_n) > eps:
                depth_n += 1
            support = tail_support(weights, eps, group)
            orbit_right = minkowski_sum(support, fwin)
            threshold = Fraction(1, 2 * c_total * spec.base)
            cloud = digit_cloud(spec, minkowski_sum(orbit_right, ball(0, group)),
                                depth_n + extra_depth, cap)
            pts = cloud.points
            pairs = 0
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    pairs += 1
                    d_right = _right_distance(cloud, weights,
                                              orbit_right.elements, depth_n,
                                              pts[i], pts[j])
                    if d_right < threshold:
                        d_left = _left_distance(cloud, weights, fwin.elements,
                                                pts[i], pts[j])
                        if not d_left < eps:
                            raise ProbeViolation(
                                f"pair {i},{j}: right distance {float(d_right):.6g} "
                                f"< {float(threshold):.6g} but left distance "
                                f"{float(d_left):.6g} >= eps {float(eps):.6g}")
            dl = lambda x, y: _left_distance(cloud, weights, fwin.elements, x, y)
            dr = lambda x, y: _right_distance(cloud, weights,
                                              orbit_right.elements, depth_n, x, y)
            left_low = _greedy_sep_count(pts, dl, eps)
            left_up = _greedy_cover_count(pts, dl, eps)
            right_low = _greedy_sep_count(pts, dr, threshold)
            right_up = _greedy_cover_count(pts, dr, threshold)
            if left_low > right_up:
                raise ProbeViolation(
                    f"certified counts crossed: left lower {left_low} > "
                    f"right upper {right_up}")
            rows.append(HomogeneousProbeRow(
                n_index=n, eps=float(eps), depth_n=depth_n,
                cloud_size=len(pts), implication_ok=True, pairs_checked=pairs,
                left_lower=left_low, left_upper=left_up,
                right_lower=right_low, right_upper=right_up))
    return rows


def homogeneous_slope_series(spec: HomogeneousSpec, eps_list: Sequence,
                             n_index: int = 1,
                             folner_family: str = "boxes") -> list[dict]:
    """Per-site slope of exact per-coordinate circle covers of the digit grid.

    For each coordinate of F_n the achievable values at depth N form a finite
    subset of the circle; the product of exact arc-cover counts bounds the
    covering number, and its slope tracks the G x N entropy prediction.
    """
    group = GroupSpec(spec.group_rank)
    folner = FolnerDescriptor(folner_family, (n_index,))
    fwin = folner.window(n_index, group)
    tail_slack = spec.weights.tail_upper(1)  # pinned coords beyond the window
    rows = []
    for eps in eps_list:
        eps = Fraction(eps)
        depth_n = 1
        while Fraction(1, spec.base ** depth_n) > eps:
            depth_n += 1
        depth = depth_n + 1
        pw = product_window(fwin, depth)
        ps = enumerate_patterns(spec.digit_spec, pw, 200_000)
        b = spec.base
        count = 1
        for g in range(len(fwin)):
            values = {sum(Fraction(p[g * depth + k], b ** (k + 1))
                          for k in range(depth)) for p in ps.patterns}
            budget = eps / spec.weights.total_upper() - tail_slack
            count *= circle_cover_count(sorted(values), budget)
        slope = math.log(count) / (len(fwin) * math.log(1 / float(eps)))
        rows.append({"eps": float(eps), "depth": depth_n, "count": count,
                     "slope": slope})
    return rows
