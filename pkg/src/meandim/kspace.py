"""The appendix systems: full shifts on K = {0} u {1/n} and on [0,1].

K-power covering numbers are computed per coordinate with exact 1-d sweeps
over rational truncations and combined by product.  Two closed-form brackets
accompany every count: the packing lower bound (gamma+1)^{|F_n|} from the
explicit grid of separated configurations and the covering upper bound
(2 zeta)^{|S F_n|} from interval covers of K, and the computed counts must
land between them exactly.  The mass distribution demo evaluates the
square-law measure on digit boxes and verifies the collapse hypothesis point
by point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .groups import FolnerDescriptor, GroupSpec, minkowski_sum
from .metrics import (WeightScheme, line_cover_count, line_separated_count,
                      tail_support)

NU_ZERO_MASS = 0.5
NU_SQUARE_COEFF = 3.0 / math.pi ** 2  # normalizes a sum 1/n^2 to 1/2
_PARTIAL_LIMIT = 2_000_000


class DemoHypothesisFailure(AssertionError):
    """A sampled point violates the mass-distribution hypothesis."""


@dataclass(frozen=True)
class KSpaceSpec:
    """Full shift on K^{Z^d} (kind 'kset') or on [0,1]^{Z^d} (kind 'unit')."""

    rank: int
    kind: str = "kset"
    weights: WeightScheme | None = None

    def __post_init__(self):
        if self.kind not in ("kset", "unit"):
            raise ValueError("kind must be 'kset' or 'unit'")
        if self.weights is None:
            object.__setattr__(self, "weights",
                               WeightScheme(self.rank, Fraction(1, 10**9)))


def gamma_bracket(eps: Fraction) -> int:
    """Integer gamma with 1/(gamma+1) <= 2 sqrt(eps) < 1/gamma, exactly."""
    eps = Fraction(eps)
    if not (0 < eps < Fraction(1, 4)):
        raise ValueError("gamma bracket needs 0 < eps < 1/4")
    g = 1
    # gamma < 1/(2 sqrt(eps)) <= gamma+1, compared via squares
    while (g + 1) * (g + 1) * 4 * eps < 1:
        g += 1
    return g


def zeta_bracket(eps: Fraction, c: Fraction) -> int:
    """Integer zeta with 1/(zeta(zeta+1)) <= eps/(4c) < 1/(zeta(zeta-1))."""
    ratio = 4 * Fraction(c) / Fraction(eps)  # zeta(zeta-1) < ratio <= zeta(zeta+1)
    z = 1
    while z * (z + 1) < ratio:
        z += 1
    return z


def k_truncation(delta: Fraction) -> list[Fraction]:
    """K down to points below delta/2, so a sweep group can absorb the rest."""
    n_tr = int(2 / delta) + 2
    return [Fraction(0)] + [Fraction(1, n) for n in range(n_tr, 0, -1)]


def unit_grid(delta: Fraction) -> list[Fraction]:
    """Grid on [0,1] slightly coarser than delta/3 for exact sweep covers."""
    steps = int(3 / delta) + 1
    return [Fraction(j, steps) for j in range(steps + 1)]


@dataclass(frozen=True)
class KExperimentRow:
    n_index: int
    eps: float
    window: int
    support_window: int
    gamma: int
    zeta: int
    lower: int
    upper: int
    formula_lower: int
    formula_upper: int
    slope_lower: float
    slope_upper: float

    @property
    def bracket_ok(self) -> bool:
        return self.formula_lower <= self.lower <= self.upper <= self.formula_upper


def kg_covering_experiment(spec: KSpaceSpec, folner: FolnerDescriptor,
                           eps_grid: Sequence) -> list[KExperimentRow]:
    """Certified covering bounds of truncated K-power (or cube) clouds.

    Lower: per-coordinate maximal eps-separated sets multiply across the
    window (a differing coordinate already forces the dynamical distance past
    eps).  Upper: per-coordinate minimal covers at budget eps/(2c) minus the
    tail allowance multiply into a product cover whose sets stay under eps in
    diameter.  Both per-coordinate counts are exact 1-d sweeps in rationals,
    and both must land inside the closed-form bracket.
    """
    group = GroupSpec(spec.rank)
    weights = spec.weights
    c_total = weights.total_upper()
    rows = []
    for n in folner.indices:
        fwin = folner.window(n, group)
        for eps in eps_grid:
            eps = Fraction(eps)
            support = tail_support(weights, eps, group)
            swin = minkowski_sum(support, fwin)
            tail_allow = weights.tail_upper(support.index + 1)
            # product sets of per-coordinate span < budget have dynamical
            # diameter under c * budget + tail < eps
            budget = (eps - 2 * tail_allow) / c_total
            if budget <= 0:
                raise ValueError("weights decay too slowly for this eps")
            if spec.kind == "kset":
                values = k_truncation(budget)
                gamma = gamma_bracket(eps)
                zeta = zeta_bracket(eps, c_total)
                formula_lower = (gamma + 1) ** len(fwin)
                formula_upper = (2 * zeta) ** len(swin)
            else:
                values = unit_grid(budget)
                gamma = 0
                zeta = 0
                formula_lower = 1
                formula_upper = (1 + int(6 * c_total / eps)) ** len(swin)
            sep = line_separated_count(values, eps)
            cov = line_cover_count(values, budget)
            lower = sep ** len(fwin)
            upper = cov ** len(swin)
            slope_lo = math.log(lower) / (len(fwin) * math.log(1 / float(eps)))
            slope_up = math.log(upper) / (len(fwin) * math.log(1 / float(eps)))
            row = KExperimentRow(n_index=n, eps=float(eps), window=len(fwin),
                                 support_window=len(swin), gamma=gamma,
                                 zeta=zeta, lower=lower, upper=upper,
                                 formula_lower=formula_lower,
                                 formula_upper=formula_upper,
                                 slope_lower=slope_lo, slope_upper=slope_up)
            if spec.kind == "kset" and not row.bracket_ok:
                raise AssertionError(f"closed-form bracket violated: {row}")
            if spec.kind == "unit" and upper > formula_upper:
                raise AssertionError(f"cube upper bound violated: {row}")
            rows.append(row)
    return rows


def trend_slopes(rows: Sequence[KExperimentRow]) -> list[float]:
    """Two-point slopes of log counts between consecutive eps values."""
    out = []
    for a, b in zip(rows, rows[1:]):
        num = math.log(b.lower) - math.log(a.lower)
        den = (math.log(1 / b.eps) - math.log(1 / a.eps)) * a.window
        out.append(num / den)
    return out


# ---------------------------------------------------------------------------
# the square-law measure on K

def _inverse_square_tail(n: int) -> float:
    """sum_{j >= n} 1/j^2 by Euler-Maclaurin, accurate past 1e-12 for n >= 8."""
    if n <= 8:
        return sum(1.0 / j ** 2 for j in range(n, 4000)) + _inverse_square_tail(4000)
    return 1.0 / n + 1.0 / (2 * n ** 2) + 1.0 / (6 * n ** 3) - 1.0 / (30 * n ** 5)


def nu_point_mass(n_code: int) -> float:
    """nu({0}) = 1/2 and nu({1/n}) = a / n^2 with a = 3/pi^2."""
    if n_code == 0:
        return NU_ZERO_MASS
    return NU_SQUARE_COEFF / n_code ** 2


def nu_normalization_error(terms: int = 10**6) -> float:
    """|nu(K) - 1| evaluated at a finite truncation plus integral tail."""
    partial = NU_ZERO_MASS + NU_SQUARE_COEFF * (
        sum(1.0 / j ** 2 for j in range(1, terms)) + _inverse_square_tail(terms))
    return abs(partial - 1.0)


def nu_interval_mass_log(x_code: int, log_r: float) -> float:
    """log nu([x - r, x] cap K) for x in K coded by n (0 means the point 0).

    r enters in log scale so astronomically small radii stay meaningful; when
    r is below the gap to the next K point the mass is the atom at x.
    """
    if x_code == 0:
        return math.log(NU_ZERO_MASS)
    n = x_code
    gap = 1.0 / (n * (n + 1.0))
    if log_r < math.log(gap):
        return math.log(NU_SQUARE_COEFF) - 2 * math.log(n)
    x = 1.0 / n
    r = math.exp(log_r)
    lo = x - r
    if lo <= 0:
        mass = NU_SQUARE_COEFF * _inverse_square_tail(n) + NU_ZERO_MASS
        return math.log(mass)
    j_max = int(1.0 / lo)
    if j_max - n > _PARTIAL_LIMIT:
        mass = NU_SQUARE_COEFF * (_inverse_square_tail(n)
                                  - _inverse_square_tail(j_max + 1))
        return math.log(mass)
    mass = NU_SQUARE_COEFF * sum(1.0 / j ** 2 for j in range(n, j_max + 1))
    return math.log(mass)


@dataclass(frozen=True)
class MassDemoReport:
    k: int
    eps: float
    delta: float
    window: int
    support_window: int
    bound: float
    points_checked: int
    worst_margin: float


def _sample_k_codes(rng, size: int, max_n: int) -> list[int]:
    """nu-distributed K codes: 0 with mass 1/2, 1/n with a/n^2 (renormalized
    truncation for sampling only; masses in checks are the true nu)."""
    codes = []
    weights = [NU_SQUARE_COEFF / n ** 2 for n in range(1, max_n + 1)]
    total = sum(weights)
    for _ in range(size):
        if rng.random() < NU_ZERO_MASS:
            codes.append(0)
            continue
        t = rng.random() * total
        acc = 0.0
        pick = max_n
        for n, w in enumerate(weights, start=1):
            acc += w
            if t <= acc:
                pick = n
                break
        codes.append(pick)
    return codes


def kg_mass_distribution_demo(spec: KSpaceSpec, k: int,
                              folner: FolnerDescriptor, n_index: int,
                              eps: Fraction, seed: int = 0,
                              sample_count: int = 64,
                              max_code: int = 4096) -> MassDemoReport:
    """Verify the mass-distribution hypothesis on sampled K-power points.

    For each point the support window splits into magnitude bands by powers
    delta^{k^m}; the thinnest band fixes the box radius r, the box mass under
    the product square-law measure is evaluated exactly per coordinate, and
    mu(box) >= diam^{(6/k) |SF_n|} must hold with diam <= (1+c) r.  The
    returned dimension bound is (12/k) |SF_n|, shrinking to zero in k.
    """
    if k < 1:
        raise ValueError("sharpness parameter k must be >= 1")
    eps = Fraction(eps)
    if not eps < Fraction(1, 6):
        raise ValueError("demo needs eps < 1/6")
    group = GroupSpec(spec.rank)
    fwin = folner.window(n_index, group)
    support = tail_support(spec.weights, eps, group)
    swin = minkowski_sum(support, fwin)
    c_total = float(spec.weights.total_upper())
    a = NU_SQUARE_COEFF
    delta = 0.5 * min(float(eps) / 12.0,
                      a ** k / (1.0 + c_total) ** 3,
                      (0.5 ** (k / 3.0 + 1.0)) / (1.0 + c_total))
    log_delta = math.log(delta)

    rng = np.random.default_rng(seed)
    pts = []
    size = len(swin)
    pts.append([0] * size)                      # all coordinates at 0
    pts.append([1] * size)                      # all coordinates at 1
    pts.append([(i % 3) + 1 for i in range(size)])
    for _ in range(sample_count):
        pts.append(_sample_k_codes(rng, size, max_code))

    exponent = (6.0 / k) * size
    worst = math.inf
    for codes in pts:
        logs = [math.log(1.0 / c) if c else -math.inf for c in codes]
        bands = []
        for lx in logs:
            if -lx > log_delta:          # x > delta
                bands.append(0)
                continue
            m = 1
            while m <= k and not (-lx > (k ** m) * log_delta):
                m += 1
            bands.append(m if m <= k else k + 1)
        sizes = [sum(1 for b in bands if b == m) for m in range(k + 1)]
        k0 = min(range(k + 1), key=lambda m: (sizes[m], m))
        if sizes[k0] * (k + 1) > size:
            raise AssertionError("pigeonhole bound |I_k0| <= |SF|/(k+1) failed")
        log_r = (k ** k0) * log_delta
        log_diam = math.log(1.0 + c_total) + log_r
        if not log_diam < math.log(float(eps) / 6.0):
            raise DemoHypothesisFailure("box diameter is not below eps/6")
        log_mass = sum(nu_interval_mass_log(c, log_r) for c in codes)
        margin = log_mass - exponent * log_diam
        if margin < 0:
            raise DemoHypothesisFailure(
                f"mu(A) < diam^s at point {codes}: log mu = {log_mass:.3f}, "
                f"s log diam = {exponent * log_diam:.3f}")
        worst = min(worst, margin)
    return MassDemoReport(k=k, eps=float(eps), delta=delta, window=len(fwin),
                          support_window=size, bound=(12.0 / k) * size,
                          points_checked=len(pts), worst_margin=worst)
