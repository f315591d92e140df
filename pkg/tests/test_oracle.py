import math

import mpmath as mp
import numpy as np
import pytest

from singquad import (AccuracyError, DivergentIntegralError, HypothesisError, Integrand,
                      PowerTerm, PreconditionError, SmoothPart, get_fixture)
from singquad.integrand import ClassTag
from singquad.oracle import (Method, ReferenceValue, asymptotic_constant, brute_force_error,
                             exact_integral, integral_power, integrate_smooth)
from singquad.riemann import SumScheme

# reference constants: -zeta(-1/2), -zeta(1/2), zeta(3/2)
ZETA_M12 = 0.2078862249773546
ZETA_12 = 1.4603545088095868
ZETA_32 = 2.612375348685488
# integral_0^1 (1-x)/sqrt(1+x) dx = (8 sqrt2 - 10)/3
SMOOTH_INT = 0.4379028329949201


def test_reference_constants_against_mpmath():
    assert float(-mp.zeta(-0.5)) == pytest.approx(ZETA_M12, rel=1e-15)
    assert float(-mp.zeta(0.5)) == pytest.approx(ZETA_12, rel=1e-15)
    assert float(mp.zeta(1.5)) == pytest.approx(ZETA_32, rel=1e-15)
    assert float((8 * mp.sqrt(2) - 10) / 3) == pytest.approx(SMOOTH_INT, rel=1e-15)


def test_integral_power():
    assert integral_power(1, 0.5, 0) == pytest.approx(2 / 3, rel=1e-16)
    assert integral_power(1, 0.5, -1) == pytest.approx(4 * math.sqrt(2) / 3, rel=1e-15)
    assert integral_power(1, -0.5, 0) == 2.0
    assert integral_power(3, 1.5, 0) == pytest.approx(1.2, rel=1e-15)
    with pytest.raises(DivergentIntegralError):
        integral_power(1, -1.5, 0)


def test_integrate_smooth():
    v = integrate_smooth(lambda x: (1 - x) / np.sqrt(1 + x), 0, 1)
    assert v == pytest.approx(SMOOTH_INT, abs=1e-12)
    assert integrate_smooth(np.cos, 0, 0) == 0.0
    with pytest.raises(PreconditionError):
        integrate_smooth(np.cos, 0, 1, tol=1e-16)


def test_integrate_smooth_budget_exhausted():
    with pytest.raises(AccuracyError) as info:
        integrate_smooth(lambda x: np.sin(1 / (x + 1e-4)), 0, 1, tol=1e-14, limit=5)
    assert info.value.residual > 1e-14


@pytest.mark.parametrize("name", ["sqrt1mx", "mixed", "mixed_m1", "mixed72_m1",
                                  "inv_sqrt_m1", "p2_dip_m1", "quadratic_m1"])
def test_analytic_path_matches_split_quadrature(name):
    f = get_fixture(name)
    ref = exact_integral(f)
    assert ref.method is Method.ANALYTIC
    # independent route: power rule for the singular part, quad for the rest
    sing = sum(integral_power(t.coeff, t.num2 / 2, f.z0) for t in f.terms)
    quad = integrate_smooth(f.smooth.func, f.z0, 1.0) if not f.smooth.is_zero else 0.0
    assert ref.value == pytest.approx(sing + quad, abs=1e-12)
    assert ref.value == pytest.approx(f.exact, abs=1e-15)


def test_non_polynomial_smooth_part_goes_through_quad():
    smooth = SmoothPart(np.cos, (lambda x: -np.sin(x), lambda x: -np.cos(x)), 2)
    f = Integrand("cos", 0, [PowerTerm(1, 1)], smooth, ClassTag.P1)
    ref = exact_integral(f)
    assert ref.method is Method.ADAPTIVE_QUAD
    assert ref.value == pytest.approx(2 / 3 + math.sin(1), abs=1e-12)


def test_exact_integral_rejects_raw():
    with pytest.raises(HypothesisError):
        exact_integral(get_fixture("inv_pow32"))


def test_reference_value_validation():
    with pytest.raises(ValueError):
        ReferenceValue(1.0, Method.ANALYTIC, 1e-12)
    with pytest.raises(ValueError):
        ReferenceValue(1.0, Method.BRUTE_FORCE, 0.0)


def test_brute_force_agrees_with_fsum_sums():
    from singquad import error_R
    f = get_fixture("sqrt1mx")
    for n in (16, 1024):
        assert float(brute_force_error(f, n, SumScheme.TRAPEZOID_ENDPOINT)) == pytest.approx(
            error_R(f, n, 2 / 3), rel=1e-9)


@pytest.mark.parametrize("name", ["sqrt1mx", "sqrt1mx_m1"])
def test_trapezoid_constant(name):
    ref = asymptotic_constant(get_fixture(name), SumScheme.TRAPEZOID_ENDPOINT, 1.5)
    assert ref.value == pytest.approx(ZETA_M12, rel=1e-3)
    assert round(ref.value, 3) == round(ZETA_M12, 3)


@pytest.mark.parametrize("name", ["inv_sqrt", "inv_sqrt_m1"])
def test_left_constant_exceeds_c1(name):
    f = get_fixture(name)
    ref = asymptotic_constant(f, SumScheme.LEFT, 0.5)
    assert ref.value == pytest.approx(ZETA_12, rel=1e-3)
    assert ref.value > f.coefficient(-1)


def test_symmetric_constant():
    ref = asymptotic_constant(get_fixture("inv_pow32"), SumScheme.SYMMETRIC, -0.5)
    assert ref.value == pytest.approx(ZETA_32, rel=1e-3)


def test_asymptotic_constant_rejects_unknown_power():
    with pytest.raises(PreconditionError):
        asymptotic_constant(get_fixture("sqrt1mx"), SumScheme.TRAPEZOID_ENDPOINT, 1.0)
