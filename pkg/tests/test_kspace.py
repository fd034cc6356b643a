import math
from fractions import Fraction

import pytest

from meandim.groups import FolnerDescriptor
from meandim.kspace import (KSpaceSpec, gamma_bracket,
                            k_truncation, kg_covering_experiment,
                            kg_mass_distribution_demo, nu_interval_mass_log,
                            nu_normalization_error, nu_point_mass,
                            trend_slopes, zeta_bracket)

KSET = KSpaceSpec(rank=1)
CUBE = KSpaceSpec(rank=1, kind="unit")
BOXES = FolnerDescriptor("boxes", (1, 2))
EPS_GRID = [Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000),
            Fraction(1, 10000)]


def test_gamma_bracket_defining_inequalities():
    for eps in (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)):
        g = gamma_bracket(eps)
        # 1/(g+1) <= 2 sqrt(eps) < 1/g, squared to stay in rationals
        assert Fraction(1, (g + 1) ** 2) <= 4 * eps < Fraction(1, g * g)


def test_zeta_bracket_defining_inequalities():
    c = Fraction(5, 3)
    for eps in (Fraction(1, 10), Fraction(1, 100)):
        z = zeta_bracket(eps, c)
        ratio = 4 * c / eps
        assert z * (z - 1) < ratio <= z * (z + 1)


def test_k_truncation_reaches_below_half_delta():
    vals = k_truncation(Fraction(1, 50))
    assert vals[0] == 0
    assert vals[1] < Fraction(1, 100)
    assert vals[-1] == 1


def test_kg_experiment_brackets_and_slopes():
    rows = kg_covering_experiment(KSET, BOXES, EPS_GRID)
    for row in rows:
        assert row.bracket_ok
        assert row.lower <= row.upper
    fine = {r.eps: r for r in rows if r.n_index == 1}
    # slope window of the acceptance criterion
    for eps in (1e-2, 1e-3):
        assert 0.35 <= fine[eps].slope_lower <= 0.70
        assert 0.35 <= fine[eps].slope_upper <= 0.70
    slopes = [fine[float(e)].slope_lower for e in EPS_GRID]
    assert all(a > b for a, b in zip(slopes, slopes[1:]))
    assert slopes[-1] > 0.5  # decreasing toward one half from above


def test_kg_experiment_window_two_matches_product():
    rows = kg_covering_experiment(KSET, BOXES, [Fraction(1, 100)])
    one = [r for r in rows if r.n_index == 1][0]
    two = [r for r in rows if r.n_index == 2][0]
    assert two.lower == one.lower ** 2
    assert two.formula_lower == (one.gamma + 1) ** 2


def test_kg_trend_slopes_near_half():
    rows = kg_covering_experiment(KSET, FolnerDescriptor("boxes", (1,)),
                                  EPS_GRID)
    trend = trend_slopes(rows)
    assert all(0.4 <= t <= 0.6 for t in trend)


def test_cube_experiment():
    rows = kg_covering_experiment(CUBE, FolnerDescriptor("boxes", (1,)),
                                  [Fraction(1, 100), Fraction(1, 1000)])
    for row in rows:
        assert row.upper <= row.formula_upper
    at_milli = rows[-1]
    assert 0.85 <= at_milli.slope_lower <= 1.0
    trend = trend_slopes(rows)
    assert 0.85 <= trend[0] <= 1.0


def test_nu_measure_values():
    assert nu_point_mass(0) == 0.5
    assert nu_point_mass(1) == pytest.approx(3 / math.pi ** 2)
    assert nu_normalization_error() < 1e-9


def test_nu_interval_masses():
    # radius below the gap keeps only the atom
    assert nu_interval_mass_log(3, math.log(1e-9)) == pytest.approx(
        math.log(nu_point_mass(3)))
    # radius past the point 0 collects the zero atom and the whole tail
    got = nu_interval_mass_log(2, math.log(1.0))
    expect = math.log(0.5 + (3 / math.pi ** 2) * sum(1 / j ** 2
                                                     for j in range(2, 50000)))
    assert got == pytest.approx(expect, abs=1e-4)


def test_mass_demo_bounds_and_monotonicity():
    reports = [kg_mass_distribution_demo(KSET, k, FolnerDescriptor("boxes", (1,)),
                                         1, Fraction(1, 10), seed=3)
               for k in (2, 4, 6)]
    bounds = [r.bound for r in reports]
    assert bounds == sorted(bounds, reverse=True)
    for r, k in zip(reports, (2, 4, 6)):
        assert r.bound == pytest.approx((12.0 / k) * r.support_window)
        assert r.worst_margin >= 0.0


def test_mass_demo_all_zero_point_uses_zero_atom():
    # nu({0}) = 1/2 per coordinate carries the all-zero point
    report = kg_mass_distribution_demo(KSET, 4, FolnerDescriptor("boxes", (1,)),
                                       1, Fraction(1, 12), seed=0,
                                       sample_count=0)
    assert report.points_checked == 3
    assert report.worst_margin >= 0.0


def test_mass_demo_input_validation():
    with pytest.raises(ValueError):
        kg_mass_distribution_demo(KSET, 0, FolnerDescriptor("boxes", (1,)), 1,
                                  Fraction(1, 10))
    with pytest.raises(ValueError):
        kg_mass_distribution_demo(KSET, 2, FolnerDescriptor("boxes", (1,)), 1,
                                  Fraction(1, 2))
