import json
import math

import numpy as np
import pytest

from slsdesign import (DomainError, analytic_class_masses, analytic_measure, check_optimal,
                       enumerate_binary, information, psi_values, thresholds, xi_root)
from slsdesign.analytic import (closed_form_inverse, l_function, oracle_psi_closed_form,
                                psi_gap_ev2, psi_gap_odd_A, t0, t1, t2, q2_a_optimum_gaps,
                                trace_inverse_ev2, trace_inverse_odd, u_t)

from reference_values import T2_EVEN, XI


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9])
def test_u_t_bracket_values(t):
    assert u_t(0.5, t) == pytest.approx((2 - t * t) / 8, abs=1e-15)
    assert u_t(2 ** -0.5, t) == pytest.approx(-(1 - t) ** 2 / 2, abs=1e-15)


def test_xi_root_table():
    for t, xi in XI.items():
        assert xi_root(t) == pytest.approx(xi, abs=5e-5)
    assert xi_root(0.0) == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_xi_root_bracket_sweep():
    for t in np.arange(0, 1, 0.01):
        xi = xi_root(float(t))
        assert 0.5 < xi < 0.7072
        assert abs(u_t(xi, float(t))) <= 1e-11


def test_xi_root_domain():
    with pytest.raises(DomainError):
        xi_root(1.0)


def test_thresholds_exact_and_rounded():
    assert t1(4) == 5 / 6 and t1(6) == 0.875
    assert t0(3) == 0.75 and t0(5) == 5 / 6 and t0(7) == 0.875
    for q, v in T2_EVEN.items():
        assert t2(q) == pytest.approx(v, abs=5e-4)
    ts = thresholds(6)
    assert (ts.t1, ts.t2, ts.t0) == (t1(6), t2(6), None)
    assert thresholds(5).t0 == 5 / 6
    assert json.loads(thresholds(2, 0.5).to_json())["xi_t"] == pytest.approx(XI[0.5], abs=5e-5)
    with pytest.raises(DomainError):
        thresholds(1)


def test_analytic_class_masses():
    assert np.allclose(analytic_class_masses("pD_q2", 2), 1 / 3)
    pa = analytic_class_masses("pA_q2", 2, 0.5)
    assert pa[0] == pytest.approx(1 - xi_root(0.5)) and pa[1] == pytest.approx(2 * xi_root(0.5) - 1)
    assert np.allclose(analytic_class_masses("ev1", 4), [0, 0.1, 0.1, 0])
    assert np.allclose(analytic_class_masses("ev2", 6), [0, 0, 0.05, 0, 0, 0])
    assert np.allclose(analytic_class_masses("odd", 5), [0, 0, 0.1, 0, 0])


def test_analytic_measures_are_probability_measures():
    for kind, q in [("ev1", 8), ("ev2", 8), ("odd", 7), ("pA_q2", 2)]:
        m = analytic_measure(kind, q, t=0.3)
        assert m.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert analytic_measure("ev1", 4).support_size() == 10


@pytest.mark.parametrize("kind,q", [("ev1", 5), ("ev2", 2), ("odd", 4), ("pD_q2", 3), ("nope", 4)])
def test_analytic_domain_errors(kind, q):
    with pytest.raises(DomainError):
        analytic_class_masses(kind, q)


def test_pA_needs_t():
    with pytest.raises(DomainError):
        analytic_class_masses("pA_q2", 2)


def test_closed_form_inverse_examples():
    C4, P4 = np.eye(4) - 0.25, np.full((4, 4), 0.25)
    assert np.allclose(closed_form_inverse("ev2", 4, 0.0), 3 * C4 + P4, atol=1e-14)
    C3, P3 = np.eye(3) - 1 / 3, np.full((3, 3), 1 / 3)
    assert np.allclose(closed_form_inverse("odd", 3, 0.0), 3 * (C3 + 0.25 * P3), atol=1e-14)


@pytest.mark.parametrize("kind,qs", [("ev1", (4, 6, 8, 10)), ("ev2", (4, 6, 8, 10)),
                                     ("odd", (3, 5, 7, 9))])
@pytest.mark.parametrize("t", [0.0, 0.3, 0.6, 0.9])
def test_closed_form_inverse_matches_numeric(kind, qs, t, binary_spaces):
    for q in qs:
        H = information(analytic_measure(kind, q, space=binary_spaces(q)), t).H
        assert np.max(np.abs(closed_form_inverse(kind, q, t) @ H - np.eye(q))) <= 1e-10


def test_trace_inverses():
    for q in (4, 6, 8):
        assert trace_inverse_ev2(q, 0.4) == pytest.approx(np.trace(closed_form_inverse("ev2", q, 0.4)))
    for q in (3, 5, 7):
        assert trace_inverse_odd(q, 0.4) == pytest.approx(np.trace(closed_form_inverse("odd", q, 0.4)))


def test_oracle_trivial_examples():
    assert oracle_psi_closed_form("odd_D", 5, 3, 0.5) == 5.0
    assert oracle_psi_closed_form("ev1_D", 4, 2, 0.5) == 4.0
    with pytest.raises(DomainError):
        oracle_psi_closed_form("ev1_D", 4, 5, 0.5)
    with pytest.raises(DomainError):
        oracle_psi_closed_form("odd_A", 4, 1, 0.5)


_ORACLE_CASES = [("ev1_D", "ev1", "D", (4, 6, 8)), ("ev2_A", "ev2", "A", (4, 6, 8)),
                 ("odd_D", "odd", "D", (3, 5, 7)), ("odd_A", "odd", "A", (3, 5, 7))]


@pytest.mark.parametrize("oracle,kind,crit,qs", _ORACLE_CASES)
@pytest.mark.parametrize("t", [0.0, 0.2, 0.5, 0.9])
def test_oracle_matches_generic_psi(oracle, kind, crit, qs, t, binary_spaces):
    for q in qs:
        space = binary_spaces(q)
        m = analytic_measure(kind, q, space=space)
        psi = psi_values(m, information(m, t), crit).psi
        for j in range(1, q + 1):
            vals = psi[space.class_of == j]
            assert np.ptp(vals) <= 1e-10
            assert vals[0] == pytest.approx(oracle_psi_closed_form(oracle, q, j, t), abs=1e-10)


@pytest.mark.parametrize("t", [0.1, 0.5, 0.8])
def test_trace_difference_identities(t):
    for q in (4, 6, 8):
        tr = trace_inverse_ev2(q, t)
        for j in range(1, q + 1):
            assert tr - oracle_psi_closed_form("ev2_A", q, j, t) == pytest.approx(
                psi_gap_ev2(q, j, t), abs=1e-9)
    for q in (3, 5, 7):
        tr = trace_inverse_odd(q, t)
        for j in range(1, q + 1):
            assert tr - oracle_psi_closed_form("odd_A", q, j, t) == pytest.approx(
                psi_gap_odd_A(q, j, t), abs=1e-9)


def test_l_function():
    for q in (4, 6, 8):
        assert l_function(q, q // 2, 0.3) == 0.0
    assert l_function(4, 3, t2(4)) == pytest.approx(0.0, abs=1e-9)
    assert l_function(4, 3, 0.5) < 0
    with pytest.raises(DomainError):
        l_function(5, 2, 0.3)


def _grid(threshold):
    return sorted({round(v, 3) for v in np.arange(0.0, 0.99, 0.05)} | {threshold - 1e-3, threshold + 1e-3})


def test_equivalence_verdicts_follow_thresholds(binary_spaces):
    for q in (4, 6, 8, 10):
        space = binary_spaces(q)
        ev1, ev2 = analytic_measure("ev1", q, space=space), analytic_measure("ev2", q, space=space)
        for t in _grid(t1(q)):
            assert check_optimal(ev1, t, "D")[0] == (t <= t1(q) + 1e-9), (q, t)
        for t in _grid(t2(q)):
            assert check_optimal(ev2, t, "A")[0] == (t <= t2(q) + 1e-9), (q, t)
    for q in (3, 5, 7, 9):
        odd = analytic_measure("odd", q, space=binary_spaces(q))
        for t in _grid(t0(q)):
            for crit in ("D", "A"):
                assert check_optimal(odd, t, crit)[0] == (t <= t0(q) + 1e-9), (q, t, crit)


@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 0.75, 0.9, 0.99])
def test_q2_A_optimum_certificate(t):
    g12, g3 = q2_a_optimum_gaps(t)
    assert abs(g12) <= 1e-9 and abs(g3) <= 1e-9
    m = analytic_measure("pA_q2", 2, t)
    r = psi_values(m, information(m, t), "A")
    assert np.max(np.abs(r.bound - r.psi)) <= 1e-9
