import math
from fractions import Fraction

import pytest

from meandim.groups import GroupSpec, ball
from meandim.subshifts import (cellwise_pair_shift, full_shift, golden_mean,
                               mcmullen_shift, pair_shift_with_b_rule)
from meandim.carpet import (CarpetMeasure, CarpetSpec, IllegalPrefix, PsiCell,
                            carpet_dimension_report, carpet_representatives,
                            enumerate_psi_cells, floor_wl, linf_pair_distance,
                            mdim_h_carpet, mdim_m_carpet, mu_psi,
                            sandwich_check, separation_pigeonhole_check,
                            shannon_mcmillan_probe)

MCMULLEN = CarpetSpec(a=4, b=2, omega=mcmullen_shift())
FULL22 = CarpetSpec(a=2, b=2, omega=full_shift((2, 2)))
FULL32 = CarpetSpec(a=3, b=2, omega=full_shift((3, 2)))


def test_spec_validation():
    with pytest.raises(ValueError):
        CarpetSpec(a=2, b=3, omega=full_shift((2, 3)))
    with pytest.raises(ValueError):
        CarpetSpec(a=3, b=2, omega=full_shift(6))


def test_floor_wl_exact():
    assert floor_wl(4, 2, 4) == 2
    assert floor_wl(2, 2, 7) == 7
    assert floor_wl(3, 2, 5) == 3  # 3^3 = 27 <= 32 < 81
    # never off by one against the float value away from integer boundaries
    for a, b, l in [(5, 2, 9), (9, 3, 7), (8, 2, 11)]:
        k = floor_wl(a, b, l)
        assert a ** k <= b ** l < a ** (k + 1)


def test_mdim_m_closed_forms():
    assert mdim_m_carpet(math.log(6), math.log(2), 3, 2) == pytest.approx(2.0)
    # fiber-trivial collapse: h' = h gives h / log b
    h = 0.7310
    assert mdim_m_carpet(h, h, 4, 2) == pytest.approx(h / math.log(2))
    assert mdim_m_carpet(math.log(3), math.log(2), 4, 2) == pytest.approx(
        math.log(3) / math.log(4) + 0.5)


def test_mdim_h_closed_forms():
    assert mdim_h_carpet(2 * math.log(2), 2) == pytest.approx(2.0)
    assert mdim_h_carpet(math.log(1 + math.sqrt(2)), 2) == pytest.approx(
        math.log2(1 + math.sqrt(2)))
    # formulas coincide at a = b
    h = 0.493
    assert mdim_h_carpet(h, 2) == pytest.approx(mdim_m_carpet(h, h, 2, 2))


def test_formula_identity_at_w_one_on_grid():
    for h in (0.0, 0.2, 0.7, 1.3):
        assert mdim_m_carpet(h, h, 2, 2) == pytest.approx(mdim_h_carpet(h, 2))


def test_representatives_counts():
    pts, _ = carpet_representatives(FULL22, 0, 1)
    assert len(pts) == 4
    values = {(p[0][0], p[0][1]) for p in pts}
    assert values == {(Fraction(0), Fraction(0)), (Fraction(0), Fraction(1, 2)),
                      (Fraction(1, 2), Fraction(0)),
                      (Fraction(1, 2), Fraction(1, 2))}
    pts2, _ = carpet_representatives(MCMULLEN, 0, 2)
    assert len(pts2) == 6
    pts3, _ = carpet_representatives(MCMULLEN, 0, 0)
    assert len(pts3) == 1


def test_representatives_pairwise_separation_explicit():
    # exhaustive exact distances at window m = 0
    for spec, l in ((FULL22, 3), (MCMULLEN, 4)):
        pts, _ = carpet_representatives(spec, 0, l)
        scale = Fraction(1, spec.b ** l)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                assert linf_pair_distance(pts[i], pts[j]) >= scale


def test_sandwich_full_and_mcmullen():
    for spec in (FULL22, MCMULLEN):
        for m in (0, 1):
            for l in (1, 2, 3, 4):
                rep = sandwich_check(spec, m, l)
                assert rep.ok
                assert rep.separated_count >= rep.lower_product
                assert rep.cover_count <= rep.upper_product


def test_sandwich_equality_on_full_shift():
    rep = sandwich_check(FULL22, 0, 3)
    assert rep.separated_count == rep.lower_product == 4 ** 3


def test_sandwich_explicit_mode_agrees_with_product_mode():
    lifted = CarpetSpec(a=2, b=2, omega=pair_shift_with_b_rule(2, golden_mean()))
    rep = sandwich_check(lifted, 0, 2)
    assert rep.mode == "explicit"
    assert rep.ok


def test_sandwich_empty_system():
    dead = CarpetSpec(a=2, b=2,
                      omega=cellwise_pair_shift(2, 2, []))
    rep = sandwich_check(dead, 0, 2)
    assert rep.lower_product == 0
    assert rep.cover_count == 0


def test_measure_normalization():
    for spec, m in ((MCMULLEN, 0), (MCMULLEN, 1), (FULL32, 0), (FULL22, 1)):
        measure = CarpetMeasure.build(spec, m)
        err_f, err_fp = measure.normalization_error()
        assert err_f < 1e-12
        assert err_fp < 1e-12


def test_mu_psi_examples():
    measure = CarpetMeasure.build(MCMULLEN, 0)
    cell = PsiCell(m=0, l=1, x_prefix=(), y_prefix=(bytes([0]),))
    expect = math.log(math.sqrt(2) / (1 + math.sqrt(2)))
    assert mu_psi(measure, cell) == pytest.approx(expect, abs=1e-12)
    whole = PsiCell(m=0, l=0, x_prefix=(), y_prefix=())
    assert mu_psi(measure, whole) == 0.0


def test_mu_psi_uniform_at_w_one():
    measure = CarpetMeasure.build(FULL22, 0)
    for l in (1, 2, 3):
        cells = enumerate_psi_cells(FULL22, 0, l, limit=6)
        for cell in cells:
            assert mu_psi(measure, cell) == pytest.approx(-l * math.log(4))


def test_mu_psi_additivity():
    # at a depth step where floor(w l) stays put, exactly one marginal factor
    # joins; at a jump step the last y factor upgrades to a pair factor too
    measure = CarpetMeasure.build(MCMULLEN, 0)
    for cell in enumerate_psi_cells(MCMULLEN, 0, 3, limit=4):
        parent = PsiCell(m=0, l=2, x_prefix=cell.x_prefix[:floor_wl(4, 2, 2)],
                         y_prefix=cell.y_prefix[:2])
        last = measure.log_f_marginal(cell.y_prefix[2])
        assert mu_psi(measure, cell) == pytest.approx(
            mu_psi(measure, parent) + last, abs=1e-12)
    for cell in enumerate_psi_cells(MCMULLEN, 0, 4, limit=4):
        parent = PsiCell(m=0, l=3, x_prefix=cell.x_prefix[:floor_wl(4, 2, 3)],
                         y_prefix=cell.y_prefix[:3])
        jump = (measure.log_f_pair(cell.y_prefix[1])
                - measure.log_f_marginal(cell.y_prefix[1]))
        last = measure.log_f_marginal(cell.y_prefix[3])
        assert mu_psi(measure, cell) == pytest.approx(
            mu_psi(measure, parent) + last + jump, abs=1e-12)


def test_mu_psi_illegal_prefix():
    measure = CarpetMeasure.build(MCMULLEN, 0)
    bad = PsiCell(m=0, l=1, x_prefix=(bytes([3]),), y_prefix=(bytes([1]),))
    with pytest.raises(IllegalPrefix):
        mu_psi(measure, bad)


def test_shannon_mcmillan_uniform_case_is_exact():
    measure = CarpetMeasure.build(FULL22, 0)
    rep = shannon_mcmillan_probe(measure, l=32, sample_count=200, seed=5)
    assert rep.mean == pytest.approx(0.0, abs=1e-12)
    assert rep.within_delta == 1.0


def test_shannon_mcmillan_mcmullen_concentrates():
    measure = CarpetMeasure.build(MCMULLEN, 0)
    rep = shannon_mcmillan_probe(measure, l=256, sample_count=10_000, seed=11)
    assert abs(rep.mean) < 0.05
    assert rep.within_delta > 0.9


def test_shannon_mcmillan_empty_report():
    measure = CarpetMeasure.build(MCMULLEN, 0)
    rep = shannon_mcmillan_probe(measure, l=4, sample_count=0, seed=1)
    assert rep.samples == 0


def test_pigeonhole_witness_small():
    cells = enumerate_psi_cells(FULL22, 0, 2, limit=5)
    i, j, gap = separation_pigeonhole_check(FULL22, 0, 2, cells)
    assert gap >= Fraction(1, 4)
    assert i != j


def test_pigeonhole_witness_all_cells():
    cells = enumerate_psi_cells(FULL22, 0, 3, limit=64)
    i, j, gap = separation_pigeonhole_check(FULL22, 0, 3, cells)
    assert gap >= Fraction(1, 8)


def test_pigeonhole_grid_spacing_case():
    # identical y prefixes, x prefixes differing early: gap at least a^-wl
    cells = enumerate_psi_cells(MCMULLEN, 0, 2, limit=100)
    same_y = [c for c in cells if c.y_prefix == cells[0].y_prefix]
    assert len(same_y) >= 2
    a, b = 4, 2
    spec = MCMULLEN
    from meandim.carpet import _cell_boxes, _box_gap
    x1, y1, wx, wy = _cell_boxes(spec, same_y[0], 1)
    x2, y2, _, _ = _cell_boxes(spec, same_y[1], 1)
    assert _box_gap(x1[0], x2[0], wx) >= Fraction(1, b ** 2) or \
        _box_gap(x1[0], x2[0], wx) == 0


def test_pigeonhole_requirements():
    cells = enumerate_psi_cells(FULL22, 0, 2, limit=3)
    with pytest.raises(ValueError):
        separation_pigeonhole_check(FULL22, 0, 2, cells)


def test_pigeonhole_mcmullen_m1():
    size = len(ball(1, GroupSpec(1)))
    need = 4 ** size + 1
    cells = enumerate_psi_cells(MCMULLEN, 1, 3, limit=need)
    assert len(cells) == need
    i, j, gap = separation_pigeonhole_check(MCMULLEN, 1, 3, cells)
    assert gap >= Fraction(1, 8)


def test_dimension_report_mcmullen():
    report = carpet_dimension_report(MCMULLEN, m_max=2, l_max=3)
    assert report["mdim_H"] == pytest.approx(math.log2(1 + math.sqrt(2)),
                                             abs=1e-9)
    assert report["mdim_M"] == pytest.approx(
        math.log(3) / math.log(4) + 0.5, abs=1e-9)
    assert report["mdim_H"] < report["mdim_M"]
    assert report["ordering_ok"]
    assert all(s["ok"] for s in report["sandwich"])


def test_dimension_report_full_carpet():
    report = carpet_dimension_report(FULL32, m_max=1, l_max=2)
    assert report["mdim_M"] == pytest.approx(2.0, abs=1e-9)
    assert report["mdim_H"] == pytest.approx(2.0, abs=1e-9)
    assert report["ordering_ok"]


def test_dimension_report_golden_b_carpet():
    lifted = CarpetSpec(a=2, b=2, omega=pair_shift_with_b_rule(2, golden_mean()))
    report = carpet_dimension_report(lifted, m_max=3, l_max=2,
                                     folner_family="boxes")
    # w = 1 collapses both formulas onto h / log 2
    assert report["mdim_H"] == pytest.approx(report["mdim_M"], abs=1e-9)
    assert report["ordering_ok"]


def test_dimension_report_empty_system():
    dead = CarpetSpec(a=2, b=2, omega=cellwise_pair_shift(2, 2, []))
    report = carpet_dimension_report(dead, m_max=1, l_max=1)
    assert report["empty_system"]
    assert report["mdim_M"] == 0.0 and report["mdim_H"] == 0.0


def test_ambient_weighted_metric_brackets_windowed_linf():
    # the ambient summable-weight metric on carpet points sits between the
    # identity-coordinate distance and total-mass times the windowed sup
    # distance, with the tail interval honest on both ends
    from meandim.metrics import ProductMetric
    pts, window = carpet_representatives(MCMULLEN, 1, 2)
    metric = ProductMetric(MCMULLEN.weights, window, "pair")
    total = MCMULLEN.weights.total_upper()
    for p, q in [(pts[0], pts[1]), (pts[0], pts[-1]), (pts[2], pts[3])]:
        lo, hi = metric.interval(p, q)
        sup = linf_pair_distance(p, q)
        center = max(abs(p[0][0] - q[0][0]), abs(p[0][1] - q[0][1]))
        assert lo >= center  # identity coordinate alone already contributes
        assert lo <= total * sup
        assert hi >= lo
        assert hi - lo <= MCMULLEN.weights.tail_upper(2)


def test_metric_rejects_mismatched_windows():
    from meandim.metrics import ProductMetric
    pts, window = carpet_representatives(MCMULLEN, 0, 1)
    metric = ProductMetric(MCMULLEN.weights, window, "pair")
    with pytest.raises(ValueError):
        metric.interval(pts[0], pts[0] + pts[0])


def test_sandwich_product_reduction_matches_explicit_enumeration():
    # the cellwise reduction asserts that the global minimum pairwise sup
    # distance equals the single-cell minimum; verify it directly on the
    # fully enumerated representative cloud at window size 3
    for spec, l in ((MCMULLEN, 2), (FULL22, 1)):
        pts, _ = carpet_representatives(spec, 1, l)
        scale = Fraction(1, spec.b ** l)
        global_min = min(linf_pair_distance(pts[i], pts[j])
                         for i in range(len(pts))
                         for j in range(i + 1, len(pts)))
        cell_pts, _ = carpet_representatives(spec, 0, l)
        cell_min = min(linf_pair_distance(cell_pts[i], cell_pts[j])
                       for i in range(len(cell_pts))
                       for j in range(i + 1, len(cell_pts)))
        assert global_min == cell_min
        assert global_min >= scale
        rep = sandwich_check(spec, 1, l)
        assert rep.separated_count == len(pts)
