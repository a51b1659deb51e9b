"""Polynomial algebra: characteristic polynomials, observer gains, the
g-family, partial-fraction residues, and decay envelopes."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from esobank.polynomials import (
    PoleSpec,
    Poly,
    PolynomialError,
    ResidueTable,
    build_g_family,
    char_poly,
    decay_polys,
    leso_gains,
    reconstruct_fraction,
    residues,
)


def test_poly_basics():
    p = Poly((1, 2, 1))
    assert p.degree == 2
    assert p(3) == 16
    assert p.derivative().coeffs == (2, 2)
    assert (p * Poly((0,))).is_zero
    assert Poly((1, 0, 0)).coeffs == (1,)
    zero = Poly((0, 0))
    assert zero.is_zero and zero.degree == -1


def test_char_poly_double_pole_at_one():
    char = char_poly(PoleSpec(((1, 2),)))
    assert char.delta.coeffs == (1, 2, 1)
    assert char.gain_row == (1, 2)


def test_char_poly_critical_damping_at_150():
    char = char_poly(PoleSpec(((150, 2),)))
    assert char.delta.coeffs == (22500, 300, 1)
    assert char.gain_row == (22500, 300)


def test_char_poly_distinct_poles():
    char = char_poly(PoleSpec(((1, 1), (2, 1))))
    assert char.delta.coeffs == (2, 3, 1)
    assert char.gain_row == (2, 3)


def test_pole_spec_rejects_bad_input():
    with pytest.raises(PolynomialError):
        PoleSpec(((0.0, 1),))
    with pytest.raises(PolynomialError):
        PoleSpec(((-3.0, 1),))
    with pytest.raises(PolynomialError):
        PoleSpec(((2.0, 0),))
    with pytest.raises(PolynomialError):
        PoleSpec(((2.0, 1), (2.0, 1)))  # duplicates must use multiplicity
    with pytest.raises(PolynomialError):
        PoleSpec(((10.0, 1), (10.0 * (1 + 1e-12), 1)))  # near-coincident


def test_leso_gains_examples():
    assert leso_gains(3, 1) == (3, 3, 1)
    assert leso_gains(4, 2) == (8, 24, 32, 16)
    omega = 1500
    assert leso_gains(3, omega) == (3 * omega, 3 * omega**2, omega**3)
    assert leso_gains(4, omega) == (
        4 * omega, 6 * omega**2, 4 * omega**3, omega**4
    )


def test_leso_gains_match_binomial_expansion_exactly():
    for order in range(2, 9):
        for omega in (1, 10, 1500):
            expansion = Poly((omega, 1)) ** order
            # expansion coeffs ascending: beta_i is the coefficient of
            # s^(order-i), i.e. the ascending list reversed, leading 1 dropped
            expected = tuple(reversed(expansion.coeffs[:-1]))
            assert leso_gains(order, omega) == expected


def test_leso_gains_rejects_bad_input():
    with pytest.raises(PolynomialError):
        leso_gains(1, 100.0)
    with pytest.raises(PolynomialError):
        leso_gains(3, 0.0)
    with pytest.raises(PolynomialError):
        leso_gains(3, -5.0)


def test_g_family_symbolic_structure():
    k1, k2 = 7.0, 11.0
    beta = (13.0, 17.0, 19.0)
    g0, g1, g2 = build_g_family((k1, k2), beta, 2)
    assert g0.coeffs == (1,)
    assert g1.coeffs == (k2, 1)
    assert g2.coeffs == (beta[1] + k2 * beta[0] + k1, beta[0] + k2, 1)


def test_g_family_bandwidth_1500_instance():
    char = char_poly(PoleSpec(((150, 2),)))
    beta = leso_gains(3, 1500)
    g = build_g_family(char.gain_row, beta, 2)
    assert g[2].coeffs == (8122500, 4800, 1)
    # cross-check the two construction routes by evaluation
    for s in (1.0, 10.0, 100.0):
        direct = s**2 + (beta[0] + 300) * s + (beta[1] + 300 * beta[0] + 22500)
        assert g[2](s) == pytest.approx(direct, rel=1e-12)


def test_g_family_shape_for_all_orders():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3, 4):
        gain_row = tuple(rng.uniform(1, 100, size=n))
        beta = leso_gains(n + 2, 30.0)
        family = build_g_family(gain_row, beta, n)
        assert len(family) == n + 1
        assert family[0].coeffs == (1,)
        for i, g in enumerate(family):
            assert g.degree == i
            assert g.is_monic


def test_g_family_rejects_dimension_mismatch():
    with pytest.raises(PolynomialError):
        build_g_family((1.0, 2.0, 3.0), leso_gains(3, 10.0), 2)
    with pytest.raises(PolynomialError):
        build_g_family((1.0, 2.0), (5.0,), 2)


def test_residues_already_in_partial_fraction_form():
    rows = residues(Poly((1,)), PoleSpec(((1, 2),)))
    assert rows[0] == pytest.approx((0.0, 1.0))


def test_residues_cover_up_example():
    # (s+3)/((s+1)(s+2)): residue 2 at -1 and -1 at -2
    rows = residues(Poly((3, 1)), PoleSpec(((1, 1), (2, 1))))
    assert rows[0][0] == pytest.approx(2.0)
    assert rows[1][0] == pytest.approx(-1.0)


def test_residues_repeated_pole_derivative_example():
    # s/(s+1)^2 = 1/(s+1) - 1/(s+1)^2
    rows = residues(Poly((0, 1)), PoleSpec(((1, 2),)))
    assert rows[0] == pytest.approx((1.0, -1.0))
    # confirm by sampling the reconstruction
    spec = PoleSpec(((1, 2),))
    for s in (0.0, 1.0):
        expected = s / (s + 1) ** 2
        assert reconstruct_fraction(rows, spec, s) == pytest.approx(expected)


def test_residues_reject_improper_fraction():
    with pytest.raises(PolynomialError):
        residues(Poly((1, 2, 3)), PoleSpec(((1, 2),)))


def test_residue_reconstruction_random_specs():
    # acceptance-grade property at module scale: well-separated random poles
    from esobank.verify import random_pole_spec, residue_reconstruction_error

    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(25):
        spec = random_pole_spec(rng)
        num = Poly(tuple(rng.uniform(-5, 5, size=spec.degree)))
        worst = max(worst, residue_reconstruction_error(spec, num, rng))
    assert worst < 1e-9, f"reconstruction error {worst:.3e}"


def test_decay_polys_standard_pairs():
    # 1/(s+1)^2 -> tau * exp(-tau)
    char = char_poly(PoleSpec(((1, 2),)))
    table = ResidueTable.for_gain_family(
        char, build_g_family(char.gain_row, leso_gains(3, 1.0), 2)
    )
    polys = decay_polys(table)
    p = polys[2][0]  # numerator g_0 = 1, single pole
    assert p.coeffs == pytest.approx((0.0, 1.0))

    # (s+3)/((s+1)(s+2)) -> 2 e^-tau - e^-2tau (constant envelopes)
    spec = PoleSpec(((1, 1), (2, 1)))
    rows = residues(Poly((3, 1)), spec)
    tau = np.linspace(0.0, 3.0, 20)
    recon = rows[0][0] * np.exp(-tau) + rows[1][0] * np.exp(-2 * tau)
    assert recon == pytest.approx(2 * np.exp(-tau) - np.exp(-2 * tau))


def test_decay_polys_all_zero_residues():
    spec = PoleSpec(((1, 1), (2, 1)))
    rows = residues(Poly((0,)), spec)
    assert all(all(c == 0 for c in row) for row in rows)


def test_inverse_transform_matches_matrix_exponential_oracle():
    """The symbolic route (residues + decay polynomials) must agree with an
    independent route: the impulse response C exp(At) B of the companion
    realization of num/delta."""
    rng = np.random.default_rng(11)
    from esobank.verify import random_pole_spec

    for _ in range(10):
        spec = random_pole_spec(rng, max_degree=5)
        n = spec.degree
        num = Poly(tuple(rng.uniform(-3, 3, size=n)))
        delta = char_poly(spec).delta
        rows = residues(num, spec)
        # symbolic inverse transform
        polys = []
        for (sj, dj), row in zip(spec.poles, rows):
            coeffs = tuple(row[q] / math.factorial(q) for q in range(dj))
            polys.append((sj, Poly(coeffs)))

        a = np.zeros((n, n))
        for i in range(n - 1):
            a[i, i + 1] = 1.0
        a[n - 1, :] = [-c for c in delta.coeffs[:-1]]
        b = np.zeros(n)
        b[n - 1] = 1.0
        c = np.zeros(n)
        c[: len(num.coeffs)] = num.coeffs

        for tau in (0.0, 0.03, 0.1, 0.5):
            symbolic = sum(
                math.exp(-sj * tau) * p(tau) for sj, p in polys
            )
            state_space = float(c @ expm(a * tau) @ b)
            assert symbolic == pytest.approx(state_space, abs=1e-9, rel=1e-7)


def test_residue_table_indexing():
    char = char_poly(PoleSpec(((150, 2),)))
    table = ResidueTable.for_gain_family(
        char, build_g_family(char.gain_row, leso_gains(3, 1500.0), 2)
    )
    assert table.n == 2
    # row 2 holds the residues of g_0/delta = 1/(s+150)^2
    assert table.c(2, 0, 2) == pytest.approx(1.0)
    assert table.c(2, 0, 1) == pytest.approx(0.0)
