"""Extremal families, surgery, quotient polynomials, thresholds."""

import pytest

from qfactor.extremal import (
    build_g1,
    build_g2,
    build_g3,
    build_g4,
    build_gstar,
    f_poly,
    g1_cells,
    g3_cells,
    g4_containment,
    gstar_cells,
    phi_b2,
    phi_bstar,
    quotient_b2,
    quotient_bstar,
    surgery_plan,
    threshold_q,
)
from qfactor.graphs import is_connected, min_degree
from qfactor.spectra import char_poly, is_equitable, perron_q, signless_laplacian


# ---------------------------------------------------------------------------
# builders


def test_gstar_8_2_shape():
    g = build_gstar(8, 2)
    assert g.n == 8
    assert g.edge_count == 23
    assert sorted(g.degrees()) == [2, 6, 6, 6, 6, 6, 7, 7]
    assert min_degree(g) == 2
    assert is_connected(g)
    assert g.rows == build_g2(8, 2).rows  # same construction when s = delta


def test_gstar_parameter_validation():
    with pytest.raises(ValueError):
        build_gstar(9, 2)  # odd order
    with pytest.raises(ValueError):
        build_gstar(8, 1)  # degree parameter below 2
    with pytest.raises(ValueError):
        build_gstar(4, 3)  # big clique would be empty


def test_gstar_cells_are_equitable():
    for n, delta in [(8, 2), (12, 2), (14, 3), (20, 4)]:
        g = build_gstar(n, delta)
        cells = gstar_cells(n, delta)
        assert sorted(v for cell in cells for v in cell) == list(range(n))
        assert is_equitable(signless_laplacian(g), cells)


def test_g1_layout():
    g = build_g1(2, (3, 3))  # K_2 join (K_3 u K_3)
    assert g.n == 8
    assert g.edge_count == 1 + 3 + 3 + 2 * 6
    cells = g1_cells(2, (3, 3))
    assert cells[0] == list(range(2))
    assert is_equitable(signless_laplacian(g), cells)
    with pytest.raises(ValueError):
        build_g1(0, (3, 3))
    with pytest.raises(ValueError):
        build_g1(2, (0, 3))
    with pytest.raises(ValueError):
        build_g1(2, ())


def test_g3_case3_shape():
    g = build_g3(14, 3, 2)
    assert g.n == 14
    # m = n - s - (delta+1-s)(s-1) = 14 - 2 - 2 = 10
    assert g.edge_count == 71
    cells = g3_cells(14, 3, 2)
    assert [len(c) for c in cells] == [2, 2, 10]
    assert is_equitable(signless_laplacian(g), cells)
    with pytest.raises(ValueError):
        build_g3(14, 3, 3)  # s must stay below delta
    with pytest.raises(ValueError):
        build_g3(14, 3, 1)


# ---------------------------------------------------------------------------
# surgery


def test_surgery_plan_smallest_case():
    plan = surgery_plan(14, 3, 2)
    assert plan.removed == ((2, 3),)
    assert plan.added_e1 == ((2, 4), (3, 4))
    assert plan.added_e2 == ()
    assert plan.added == ((2, 4), (3, 4))


def test_surgery_counts_match_closed_forms():
    for delta in (3, 4, 5):
        for s in range(2, delta):
            for n in range(7 * delta - 7 + (7 * delta - 7) % 2, 7 * delta + 14, 2):
                plan = surgery_plan(n, delta, s)
                m = n - s - (delta + 1 - s) * (s - 1)
                t = delta + 1 - s
                expected_removed = t * (t - 1) // 2 + (s - 2) * (delta - s)
                expected_added = (s - 1) * t * (delta - s) + (m - delta + s) * (s - 2) * (delta - s)
                assert len(plan.removed) == expected_removed, (n, delta, s)
                assert len(plan.added) == expected_added, (n, delta, s)
                assert not set(plan.removed) & set(plan.added)


def test_g4_degrees_and_edge_budget():
    for n, delta, s in [(14, 3, 2), (22, 4, 2), (22, 4, 3), (28, 5, 3)]:
        g3 = build_g3(n, delta, s)
        g4 = build_g4(n, delta, s)
        plan = surgery_plan(n, delta, s)
        assert g4.edge_count == g3.edge_count - len(plan.removed) + len(plan.added)
        assert min_degree(g4) == delta
        assert is_connected(g4)


def test_g4_embeds_in_gstar():
    for n, delta, s in [(14, 3, 2), (22, 4, 2), (22, 4, 3), (28, 5, 4)]:
        report = g4_containment(n, delta, s)
        assert report.embedded
        mapping = report.mapping
        g4 = build_g4(n, delta, s)
        gstar = build_gstar(n, delta)
        assert sorted(mapping) == list(range(n))
        for u, v in g4.edges():
            assert gstar.has_edge(mapping[u], mapping[v]), (n, delta, s, u, v)


# ---------------------------------------------------------------------------
# quotients and polynomials


def test_quotient_b2_frozen_entries():
    b = quotient_b2(8, 2)
    assert b.int_rows() == [[8, 5, 1], [2, 10, 0], [2, 0, 2]]
    assert quotient_bstar(8, 2).int_rows() == b.int_rows()


def test_quotient_matches_graph_quotient():
    from qfactor.spectra import quotient_matrix

    for n, delta in [(8, 2), (14, 3), (20, 4)]:
        g = build_gstar(n, delta)
        direct = quotient_matrix(signless_laplacian(g), gstar_cells(n, delta))
        assert quotient_bstar(n, delta).int_rows() == direct.int_rows()


def test_phi_b2_frozen_coefficients():
    assert phi_b2(8, 2).coeffs == (-120, 104, -20, 1)
    assert phi_bstar(8, 2).coeffs == (-120, 104, -20, 1)


def test_phi_equals_char_poly_of_quotient():
    for n in range(8, 30, 2):
        for s in range(2, n // 2 + 1):
            assert phi_b2(n, s).coeffs == char_poly(quotient_b2(n, s)).coeffs, (n, s)


def test_difference_identity_exact():
    for n, s, delta in [(14, 2, 3), (22, 3, 4), (16, 5, 2), (30, 4, 4)]:
        lhs = phi_b2(n, s) - phi_bstar(n, delta)
        rhs = f_poly(n, s, delta).scaled(s - delta)
        assert (lhs - rhs).is_zero(), (n, s, delta)


def test_f_poly_shape():
    f = f_poly(14, 2, 3)
    assert f.degree == 2
    assert f.coeffs[2] == 1  # monic quadratic
    # its value at 2n-2delta is a plain integer
    assert isinstance(f(2 * 14 - 2 * 3), int)


# ---------------------------------------------------------------------------
# threshold


def test_threshold_frozen_values():
    assert threshold_q(8, 2) == pytest.approx(12.385164807134505, abs=1e-9)
    assert threshold_q(14, 3) == pytest.approx(22.667346179666595, abs=1e-9)


def test_threshold_matches_direct_perron():
    for n, delta in [(8, 2), (10, 2), (14, 3), (16, 3), (22, 4)]:
        direct = perron_q(build_gstar(n, delta)).value
        assert threshold_q(n, delta) == pytest.approx(direct, abs=1e-8)


def test_threshold_deterministic():
    assert threshold_q(12, 2) == threshold_q(12, 2)
    assert threshold_q(16, 3) == threshold_q(16, 3)
