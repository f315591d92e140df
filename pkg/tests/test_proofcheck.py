import math

import mpmath as mp
import numpy as np
import pytest

from singquad import (CertificateNotFoundError, HypothesisError, Integrand, PowerTerm,
                      PreconditionError, SmoothPart, get_fixture)
from singquad.integrand import ClassTag
from singquad.proofcheck import (CMIN_LOWER, L2STAR_FACTOR, Prop2Certificate, bracket_values,
                                 check_item2_identities, find_C, find_delta, integrals_IPhi,
                                 k_phi3, lbar_constant, prop2_certificate,
                                 prop2_decomposition, proof_constants, sigma_phi, sigma_phi1,
                                 sigma_phi2, sigma_phi3_residual, symmetrize)

from conftest import by_tag

I_PHI1_SQRT = 0.11438191683587326 * -1  # (4 sqrt2 - 6)/3
ITEM2_M1 = [f for f in by_tag("P1_ITEM2") if f.z0 == -1]
P2 = by_tag("P2")


def poly_m1(coeffs):
    return Integrand("poly", -1, (), SmoothPart.polynomial(coeffs))


class _Phi:
    """Stand-in exposing only ``phi``; lets Sigma_Phi be checked on non-even Phi."""

    def __init__(self, g):
        self.g = g

    def phi(self, x, order=0):
        return self.g(np.asarray(x, dtype=float))


def test_closed_form_of_worked_value():
    assert float((4 * mp.sqrt(2) - 6) / 3) == pytest.approx(I_PHI1_SQRT, rel=1e-15)


def test_symmetrize_examples():
    s = symmetrize(get_fixture("sqrt1mx_m1"))
    assert s.phi(0.0) == 2.0
    assert s.phi(1.0) == pytest.approx(math.sqrt(2))
    assert s.phi(0.5, 1) == pytest.approx(-0.5 / math.sqrt(0.5) + 0.5 / math.sqrt(1.5))
    with pytest.raises(HypothesisError):
        symmetrize(get_fixture("sqrt1mx"))
    with pytest.raises(HypothesisError):
        symmetrize(get_fixture("inv_sqrt_m1"))


def test_phi_is_even_fold():
    f = get_fixture("mixed72_m1")
    s = symmetrize(f)
    x = np.linspace(0, 1, 33)
    assert np.array_equal(s.phi(x), f(x) + f(-x))


def test_weighted_is_finite_at_one_and_matches_definition():
    s = symmetrize(get_fixture("mixed52_m1"))
    x = np.linspace(0, 0.99, 50)
    for k in (1, 2, 3):
        assert np.allclose(s.weighted(x, k), (1 - x) ** k * s.phi(x, k), rtol=1e-12, atol=1e-14)
        assert np.isfinite(s.weighted(1.0, k))


def test_integrals_of_constant_vanish():
    i1, i2 = integrals_IPhi(symmetrize(poly_m1([3.0])))
    assert (i1, i2) == (0.0, 0.0)


def test_integral_phi1_worked_value():
    i1, i2 = integrals_IPhi(symmetrize(get_fixture("sqrt1mx_m1")))
    assert i1 == pytest.approx(I_PHI1_SQRT, abs=1e-12)


@pytest.mark.parametrize("f", ITEM2_M1, ids=lambda f: f.name)
def test_second_integral_relation(f):
    s = symmetrize(f)
    i1, i2 = integrals_IPhi(s)
    assert i2 == pytest.approx(2 * i1 - float(s.phi(0.0, 1)), abs=1e-12)


def test_integrals_tolerance_guard():
    with pytest.raises(PreconditionError):
        integrals_IPhi(symmetrize(get_fixture("sqrt1mx_m1")), tol=1e-6)


@pytest.mark.parametrize("n", [1, 4, 17, 100])
def test_sigma_phi_telescopes(n):
    assert sigma_phi(_Phi(lambda x: np.full_like(x, 2.5)), n) == 0.0
    assert sigma_phi(_Phi(lambda x: x), n) == pytest.approx(0.5, rel=1e-14)


def test_sigma_phi_odd_part_cancels():
    # F(x) = x + c gives Phi = 2c, so every remainder vanishes
    s = symmetrize(poly_m1([1.5, 1.0]))
    for n in (4, 64):
        assert sigma_phi(s, n) == 0.0
        assert sigma_phi1(s, n) == 0.0
        assert sigma_phi2(s, n) == 0.0


@pytest.mark.parametrize("n", [8, 64, 512])
def test_quadratic_phi_third_remainder_vanishes(n):
    s = symmetrize(poly_m1([0.0, 0.0, 1.0]))
    assert abs(sigma_phi3_residual(s, n)) < 1e-9


@pytest.mark.parametrize("f", ITEM2_M1, ids=lambda f: f.name)
@pytest.mark.parametrize("n", [16, 255, 4096])
def test_sigma_phi1_two_paths_agree(f, n):
    s = symmetrize(f)
    i1, i2 = integrals_IPhi(s)
    assert sigma_phi1(s, n, i1) == pytest.approx(sigma_phi1(s, n, i1, path="trapezoid"),
                                                 abs=1e-13)
    assert sigma_phi2(s, n, i2) == pytest.approx(sigma_phi2(s, n, i2, path="trapezoid"),
                                                 abs=1e-13)


def test_sigma_path_rejects_unknown():
    with pytest.raises(ValueError):
        sigma_phi1(symmetrize(get_fixture("sqrt1mx_m1")), 8, path="other")


def test_sqrt_remainder_bounds():
    f = get_fixture("sqrt1mx_m1")
    s = symmetrize(f)
    grid = [2 ** j for j in range(4, 13)]
    pc = proof_constants(f, 16, grid)
    for n in grid:
        assert abs(sigma_phi1(s, n, pc.I_phi1)) <= pc.K_phi1 * (n + 1) ** -1.5 * (1 + 1e-12)
        assert abs(sigma_phi2(s, n, pc.I_phi2)) <= pc.K_phi2 * (n + 1) ** -1.5 * (1 + 1e-12)
    for n in (16, 64, 1024):
        assert abs(sigma_phi3_residual(s, n)) <= pc.K_phi3


def test_k_phi3_of_quadratic_is_zero():
    assert k_phi3(symmetrize(poly_m1([1.0, 2.0, 3.0]))) == 0.0


def test_identities_zero_function():
    rep = check_item2_identities(get_fixture("zero_m1"), 16)
    assert rep.holds
    assert all(c.lhs == 0 and c.rhs == 0 for c in rep.checks)


@pytest.mark.parametrize("f", ITEM2_M1, ids=lambda f: f.name)
@pytest.mark.parametrize("n", [8, 32, 128, 512])
def test_identity_suite(f, n):
    rep = check_item2_identities(f, n, tol=1e-9)
    assert rep.holds, rep.failed
    assert len(rep.checks) == 4


def test_identity_worked_examples():
    assert check_item2_identities(get_fixture("sqrt1mx_m1"), 32, tol=1e-10).holds
    assert check_item2_identities(get_fixture("mixed72_m1"), 128, tol=1e-9).holds


def test_identity_failure_names_identity():
    rep = check_item2_identities(get_fixture("sqrt1mx_m1"), 32, tol=1e-30)
    assert rep.failed and all(name.startswith("(") for name in rep.failed)
    assert rep.to_dict()["holds"] is False


def test_lbar_zero_and_positive():
    assert lbar_constant(get_fixture("zero_m1"), 64) == 0.0
    assert lbar_constant(get_fixture("sqrt1mx_m1"), 64) > 0


@pytest.mark.parametrize("name", ["sqrt1mx_m1", "mixed_m1", "sqrt_x2_m1"])
def test_lbar_decreases_with_N(name):
    f = get_fixture(name)
    grid = [2 ** j for j in range(8, 15)]
    assert lbar_constant(f, 256, grid) <= lbar_constant(f, 64, grid)


def test_lbar_dominates_scaled_differences():
    from singquad import scaled_difference
    f = get_fixture("sqrt1mx_m1")
    lb = lbar_constant(f, 64)
    for n in (64, 100, 1000, 2 ** 14):
        assert abs(scaled_difference(f, n, f.exact)) <= lb / math.sqrt(n)


# -- left-sum certificate ------------------------------------------------------

def test_find_delta_examples():
    f = get_fixture("inv_sqrt")
    assert find_delta(f, 1.25, 0.95) == 0.5
    g = get_fixture("p2_bump")  # (1-x)^{-1/2} + 10 (1-x)^{1/2}
    d = find_delta(g, 1.25, 0.95)
    # derivative bracket 2u^{3/2}F' = 1 - 10u >= cmin  <=>  u <= 0.005
    assert d <= 0.005 < 2 * d
    with pytest.raises(PreconditionError):
        find_delta(f, 1.25, 0.5)
    with pytest.raises(PreconditionError):
        find_delta(f, 0.9, 0.95)
    with pytest.raises(HypothesisError):
        find_delta(get_fixture("sqrt1mx"), 1.25, 0.95)


def test_find_delta_failure():
    # a large negative smooth part near x = 1 cannot be bracketed at any ladder step
    f = Integrand("bad", 0, [PowerTerm(1, -1)], SmoothPart.polynomial([0.0, -1e7]),
                  ClassTag.P2)
    with pytest.raises(CertificateNotFoundError):
        find_delta(f, 1.25, 0.95)


@pytest.mark.parametrize("name", ["inv_sqrt", "inv_sqrt_m1"])
def test_find_C_inverse_sqrt_is_zero(name):
    assert find_C(get_fixture(name), 0.5) == 0.0


def test_find_C_covers_a_dip():
    f = get_fixture("p2_dip_m1")  # F decreases then increases on [-1, 1)
    cert = prop2_certificate(f)
    assert cert.C > 0
    b = 1 - cert.delta
    x = np.linspace(-1, b, 200001)
    tv = np.sum(np.abs(np.diff(f(x))))
    for beta in np.linspace(b, 1 - 1e-6, 50):
        total = tv + (f(beta) - f(b))
        assert total <= f(beta) + cert.C + 1e-9


@pytest.mark.parametrize("f", P2, ids=lambda f: f.name)
def test_certificate_arithmetic(f):
    c = prop2_certificate(f)
    assert c.cmax == 1.25 * c.c1
    assert c.cmin == pytest.approx((CMIN_LOWER * c.c1 + c.c1) / 2, rel=1e-15)
    assert c.L2star == L2STAR_FACTOR * c.cmin
    assert c.L2 == 2 * c.cmax + c.C / math.sqrt(64)
    assert c.l2 == float(f(1 - c.delta)) + c.C
    assert c.L2star > c.c1
    assert c.C >= 0


def test_certificate_inverse_sqrt_value():
    c = prop2_certificate(get_fixture("inv_sqrt"))
    assert c.cmin == pytest.approx(0.9459, abs=1e-4)
    assert c.L2star == pytest.approx(1.0606, abs=1e-4)
    assert c.delta == 0.5
    p = prop2_certificate(get_fixture("p2_mixed_m1"))
    assert p.L2star > 2


@pytest.mark.parametrize("f", P2, ids=lambda f: f.name)
def test_bracket_holds_at_random_points(f):
    c = prop2_certificate(f)
    rng = np.random.default_rng(7)
    x = rng.uniform(1 - c.delta, 1 - 1e-9, 10_000)
    g0, g1 = bracket_values(f, x)
    for g in (g0, g1):
        assert np.all(g >= c.cmin) and np.all(g <= c.cmax)


def test_certificate_rejects_bad_parameters():
    with pytest.raises(PreconditionError):
        prop2_certificate(get_fixture("inv_sqrt"), cmin_frac=1.5)
    with pytest.raises(PreconditionError):
        prop2_certificate(get_fixture("inv_sqrt"), cmax_factor=0.9)


def test_decomposition_example():
    f = get_fixture("inv_sqrt")
    cert = prop2_certificate(f)
    dec = prop2_decomposition(f, 16, cert)
    assert dec.relative_residual <= 1e-10
    assert dec.sigma3 >= dec.sigma3_lower and dec.sigma2 >= dec.sigma2_lower
    assert dec.sigma3_terms_positive and dec.holds
    with pytest.raises(PreconditionError):
        prop2_decomposition(f, 2, cert)


@pytest.mark.parametrize("f", P2, ids=lambda f: f.name)
def test_decomposition_over_grid(f):
    cert = prop2_certificate(f)
    n_lo = max(64, math.ceil(2 / cert.delta))
    for n in [m for m in (2 ** j for j in range(6, 17)) if m >= n_lo] + [n_lo + 3]:
        dec = prop2_decomposition(f, n, cert)
        assert dec.holds, dec.to_dict()


def test_k0_floor():
    c = Prop2Certificate(1.0, 0.25, 0.0, 1.25, 0.95, 2.5, 1.06, 2.0, 64)
    assert c.k0(10) == 7
    assert c.k0(64) == 48
