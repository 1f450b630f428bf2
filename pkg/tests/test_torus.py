import math
from fractions import Fraction

import numpy as np
import pytest

from algdyn.groupring import GroupRingElement, GroupRingMatrix, parse_element
from algdyn.torus import (
    INVERTIBLE,
    NOT_INVERTIBLE,
    UNKNOWN,
    MemoryCapError,
    NotInvertibleError,
    certify_invertible,
    certify_matrix_invertible,
    evaluate,
    evaluate_exact_is_zero,
    l1_inverse,
    lipschitz_bound,
    matrix_l1_inverse,
)
from conftest import random_element

E = GroupRingElement


# -- evaluation ---------------------------------------------------------------


def test_evaluate_trivials(f_symmetric, f_harmonic):
    assert evaluate(f_symmetric, 0.0) == pytest.approx(1.0)
    assert evaluate(f_symmetric, 0.5) == pytest.approx(5.0)
    assert evaluate(f_harmonic, (0.0, 0.0)) == pytest.approx(0.0)


def test_evaluate_conjugate_symmetry_random():
    rng = np.random.default_rng(5)
    for _ in range(40):
        d = int(rng.integers(1, 3))
        f = random_element(rng, d)
        theta = tuple(rng.random(d))
        lhs = evaluate(f.star(), theta)
        rhs = evaluate(f, theta).conjugate()
        assert lhs == pytest.approx(rhs, abs=1e-10)


def test_lipschitz_examples(f_symmetric):
    assert lipschitz_bound(parse_element("u1 - 2")) == pytest.approx(2 * math.pi, rel=1e-8)
    assert lipschitz_bound(f_symmetric) == pytest.approx(4 * math.pi, rel=1e-8)
    assert lipschitz_bound(E.constant(1, 5)) == 0.0


def test_lipschitz_is_valid_bound():
    rng = np.random.default_rng(23)
    for _ in range(20):
        f = random_element(rng, 1, radius=3)
        lip = lipschitz_bound(f)
        t0, t1 = rng.random(2)
        num = abs(evaluate(f, t0) - evaluate(f, t1))
        dist = abs(t0 - t1)
        dist = min(dist, 1 - dist)
        if dist > 1e-9:
            assert num <= lip * dist + 1e-9


# -- exact rational-point evaluation ------------------------------------------


def test_exact_zero_harmonic(f_harmonic):
    assert evaluate_exact_is_zero(f_harmonic, (Fraction(0), Fraction(0)))
    assert not evaluate_exact_is_zero(f_harmonic, (Fraction(1, 2), Fraction(0)))


def test_exact_zero_cyclotomic():
    # 1 + u + u^2 vanishes exactly at theta = 1/3
    f = parse_element("1 + u1 + u1^2")
    assert evaluate_exact_is_zero(f, (Fraction(1, 3),))
    assert not evaluate_exact_is_zero(f, (Fraction(1, 4),))
    # u^2 + 1 vanishes at 1/4
    g = parse_element("1 + u1^2")
    assert evaluate_exact_is_zero(g, (Fraction(1, 4),))


# -- certification ------------------------------------------------------------


def test_certify_symmetric(f_symmetric):
    cert = certify_invertible(f_symmetric, 2048)
    assert cert.verdict == INVERTIBLE
    assert cert.grid_min == pytest.approx(1.0, abs=1e-6)
    assert cert.margin > 0


def test_certify_harmonic(f_harmonic):
    cert = certify_invertible(f_harmonic)
    assert cert.verdict == NOT_INVERTIBLE
    assert cert.witness == (Fraction(0), Fraction(0))


def test_certify_geometric(f_geometric):
    cert = certify_invertible(f_geometric)
    assert cert.verdict == INVERTIBLE
    assert cert.grid_min >= 1.0 - 1e-9


def test_certify_cyclotomic_zero():
    cert = certify_invertible(parse_element("1 + u1 + u1^2"))
    assert cert.verdict == NOT_INVERTIBLE
    assert cert.witness in ((Fraction(1, 3),), (Fraction(2, 3),))


def test_certify_unknown_regime():
    # 2 + 3u + 2u^2 has both roots on the unit circle at irrational angles
    # (modulus^2 = (9+7)/16 = 1), so no exact rational witness exists and the
    # sound verdict is Unknown at any grid size.
    g = parse_element("2 + 3*u1 + 2*u1^2")
    cert = certify_invertible(g, 4096)
    assert cert.verdict == UNKNOWN
    assert "increase" in cert.note


def test_certify_zero_element():
    cert = certify_invertible(E.zero(1))
    assert cert.verdict == NOT_INVERTIBLE


def test_certify_requires_sane_grid(f_symmetric):
    with pytest.raises(ValueError):
        certify_invertible(f_symmetric, 1)


def test_certify_memory_cap(monkeypatch, f_harmonic):
    monkeypatch.setenv("ALGDYN_MEM_CAP_MB", "1")
    f = parse_element("7 - u1 - u1^-1 - u2 - u2^-1")  # no exact zero
    with pytest.raises(MemoryCapError):
        certify_invertible(f, 2048)


def test_certify_matrix_fixtures():
    I2 = GroupRingMatrix.identity(2, 1)
    assert certify_matrix_invertible(I2).verdict == INVERTIBLE

    A = GroupRingMatrix.from_obj([["3 - u1", "1"], ["0", "3 - u1^-1"]])
    assert certify_matrix_invertible(A).verdict == INVERTIBLE

    B = GroupRingMatrix.from_obj([["u1 - 1"]])
    cert = certify_matrix_invertible(B)
    assert cert.verdict == NOT_INVERTIBLE
    assert cert.witness == (Fraction(0),)


def test_certificate_json(f_symmetric):
    obj = certify_invertible(f_symmetric).to_obj()
    assert obj["verdict"] == INVERTIBLE
    assert obj["margin"] > 0


# -- l1 inverse ---------------------------------------------------------------


def test_inverse_geometric(f_geometric):
    g = l1_inverse(f_geometric, 1e-10, 40)
    assert g.converged
    # closed form: 1/(u-2) = -sum_{n>=0} u^n / 2^(n+1)
    for n in range(6):
        assert float(g.coefficient(n)) == pytest.approx(-(2.0 ** -(n + 1)), abs=1e-12)
    assert float(g.coefficient(-1)) == pytest.approx(0.0, abs=1e-12)


def test_inverse_symmetric_closed_form(f_symmetric):
    g = l1_inverse(f_symmetric, 1e-10, 40)
    assert g.converged
    assert float(g.residual) <= 1e-10
    r = (3 - math.sqrt(5)) / 2
    for n in range(-5, 6):
        expected = r ** abs(n) / math.sqrt(5)
        assert float(g.coefficient(n)) == pytest.approx(expected, abs=1e-11)


def test_inverse_identity():
    g = l1_inverse(E.one(1), 1e-12, 4)
    assert g.terms == {(0,): Fraction(1)}
    assert g.residual == 0


def test_inverse_residual_recomputed_bit_for_bit(f_symmetric):
    g = l1_inverse(f_symmetric, 1e-10, 30)
    # independent reconvolution of the returned coefficients
    prod = {}
    for e, c in g.terms.items():
        for ef, cf in f_symmetric.terms.items():
            k = (e[0] + ef[0],)
            prod[k] = prod.get(k, Fraction(0)) + c * cf
    prod[(0,)] = prod.get((0,), Fraction(0)) - 1
    res = sum((abs(c) for c in prod.values()), Fraction(0))
    assert res == g.residual


def test_inverse_requires_invertible(f_harmonic):
    with pytest.raises(NotInvertibleError):
        l1_inverse(f_harmonic, 1e-8, 10)


def test_inverse_reports_best_on_unreachable_tol(f_symmetric):
    g = l1_inverse(f_symmetric, 1e-30, 6)
    assert not g.converged
    assert g.residual > 0
    assert float(g.residual) < 1e-2  # truncation floor of the radius-6 ball


def test_inverse_tail_bound_formula(f_symmetric):
    g = l1_inverse(f_symmetric, 1e-10, 40)
    r = g.residual
    expected = float(r * g.l1_norm() / (1 - r))
    assert g.tail_bound == pytest.approx(expected, rel=1e-12)


def test_certified_invertible_implies_inverse_succeeds():
    # soundness: a certified-invertible element is actually invertible, so
    # the truncated inverse's residual decreases under radius refinement
    # (slow geometric decay when the spectrum hugs the unit circle).
    rng = np.random.default_rng(31)
    found = 0
    while found < 5:
        f = random_element(rng, 1, radius=2, max_coef=3)
        if f.is_zero():
            continue
        cert = certify_invertible(f)
        if cert.verdict != INVERTIBLE:
            continue
        found += 1
        g = l1_inverse(f, 1e-6, 60, cert=cert)
        assert float(g.residual) < 1.0
        if not g.converged:
            g2 = l1_inverse(f, 1e-6, 120, cert=cert)
            assert g2.residual < g.residual


# -- matrix inverse -----------------------------------------------------------


def test_matrix_inverse_identity():
    I2 = GroupRingMatrix.identity(2, 1)
    inv = matrix_l1_inverse(I2, 1e-12, 8)
    assert inv.residual == 0
    assert inv.entries[0][0].terms == {(0,): Fraction(1)}
    assert inv.entries[0][1].terms == {}


def test_matrix_inverse_diagonal(f_geometric, f_symmetric):
    A = GroupRingMatrix([[f_geometric, E.zero(1)], [E.zero(1), f_symmetric]])
    inv = matrix_l1_inverse(A, 1e-9, 40)
    assert inv.converged
    g00 = l1_inverse(f_geometric, 1e-10, 40)
    g11 = l1_inverse(f_symmetric, 1e-10, 40)
    for n in range(-3, 4):
        assert float(inv.entries[0][0].coefficient(n)) == pytest.approx(
            float(g00.coefficient(n)), abs=1e-8
        )
        assert float(inv.entries[1][1].coefficient(n)) == pytest.approx(
            float(g11.coefficient(n)), abs=1e-8
        )
    assert float(inv.entries[0][1].l1_norm()) <= 1e-9


def test_matrix_inverse_upper_triangular():
    A = GroupRingMatrix.from_obj([["2", "u1"], ["0", "2"]])
    inv = matrix_l1_inverse(A, 1e-10, 20)
    assert inv.converged
    assert float(inv.entries[0][0].coefficient(0)) == pytest.approx(0.5, abs=1e-12)
    assert float(inv.entries[0][1].coefficient(1)) == pytest.approx(-0.25, abs=1e-12)
    assert float(inv.entries[1][1].coefficient(0)) == pytest.approx(0.5, abs=1e-12)
    assert float(inv.entries[1][0].l1_norm()) <= 1e-12


def test_matrix_inverse_residual_identity(f_symmetric):
    A = GroupRingMatrix.from_obj([["3 - u1", "1"], ["0", "3 - u1^-1"]])
    inv = matrix_l1_inverse(A, 1e-8, 40)
    assert inv.converged
    assert float(inv.residual) <= 1e-8


def test_inverse_two_dimensional():
    f = parse_element("5 - u1 - u1^-1 - u2 - u2^-1")
    cert = certify_invertible(f)
    assert cert.verdict == INVERTIBLE
    g = l1_inverse(f, 1e-6, 16, cert=cert)
    assert g.converged
    assert float(g.coefficient((0, 0))) == pytest.approx(
        abs(evaluate_mean_inverse(f)), rel=1e-4
    )
    # symmetry of the kernel in the two axes
    assert g.coefficient((1, 0)) == pytest.approx(g.coefficient((0, 1)), abs=1e-10)


def evaluate_mean_inverse(f):
    # independent route: g(0,0) is the mean of 1/f^ over the torus
    import numpy as np

    m = 128
    t = np.arange(m) / m
    th1, th2 = np.meshgrid(t, t, indexing="ij")
    vals = np.zeros_like(th1, dtype=complex)
    for e, c in f.terms.items():
        vals += c * np.exp(2j * np.pi * (e[0] * th1 + e[1] * th2))
    return float(np.mean(1.0 / vals).real)
