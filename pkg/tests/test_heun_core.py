import json
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from assocheun.heun_core import (AssocParams, CoeffSeries, HeunParams, Hn, ParameterError,
                                 TruncationError, assoc_coeffs, assoc_eval, assoc_rates,
                                 eval_series, heun, heun_coeffs, heun_rates, map_P_alpha,
                                 map_P_alpha2, map_P_beta, map_P_beta2, map_tilde, monic_G,
                                 ode_residual, series_for, special_k0, special_k1,
                                 spectral_variable)

GOLDEN = Path(__file__).parent / "golden"
CARLITZ = dict(alpha=0.0, beta=0.5, gamma=0.5, delta=0.5, eps=0.5)


def mp_assoc_coeffs(A: AssocParams, N: int, dps: int = 40):
    """Independent high-precision run of the associated recurrence."""
    with mpmath.workdps(dps):
        P = A.base
        a, b, g, d, k2 = (mpmath.mpf(x) for x in (P.alpha, P.beta, P.gamma, P.delta, P.k2))
        c, mu, s = mpmath.mpf(A.c), mpmath.mpf(A.mu), mpmath.mpf(P.s)
        lam = lambda n: k2 * (n + c + a) * (n + c + b)
        mun = lambda n: (n + c) * (n + c + g - 1) + (mu if n == 0 else 0)
        gam = lambda n: (1 - k2) * d * (n + c)
        F = [mpmath.mpf(1)]
        prev = mpmath.mpf(0)
        for n in range(N):
            lhs = lam(n) + mun(n) + gam(n) - s - (a + c) * (b + c) * k2 + k2 * d * c
            lp = lam(n - 1) if n > 0 else 0
            F.append((lhs * F[n] - lp * prev) / ((n + 1 + c) * (n + c + g)))
            prev = F[n]
        return [float(x) for x in F]



params_strategy = st.builds(
    lambda a, g, d, e, s, k2, c, mu: heun(a, g + d + e - 1 - a, g, d, e, s, k2, c=c, mu=mu),
    a=st.floats(-1, 1.5), g=st.floats(0.2, 2.0), d=st.floats(-0.5, 1.5), e=st.floats(-0.5, 1.5),
    s=st.floats(-2, 2), k2=st.floats(0, 0.95), c=st.floats(0, 2), mu=st.floats(0, 2))


# -- parameters and rates ---------------------------------------------------

def test_fuchs_violation_names_constraint():
    with pytest.raises(ParameterError, match="Fuchs"):
        HeunParams(0.0, 0.7, 0.5, 0.5, 0.5, 0.3, 0.49)


def test_k2_range():
    with pytest.raises(ParameterError):
        HeunParams(0.0, 0.5, 0.5, 0.5, 0.5, 0.3, 1.5)


def test_rates_n0():
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.2, 0.6)
    r = heun_rates(P, 0)
    assert r.mu_n == 0 and r.gam == 0 and r.lam == pytest.approx(0.6 * 0.3 * 1.1)


def test_rates_n1_carlitz():
    r = heun_rates(HeunParams(s=0.1, k2=0.3, **CARLITZ), 1)
    assert r.lam == pytest.approx(1.5 * 0.3) and r.mu_n == pytest.approx(0.5)


def test_rates_k2_one():
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.2, 1.0)
    assert all(heun_rates(P, n).gam == 0 for n in range(10))


def test_assoc_rates_reduce():
    A = heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.2, 0.6)
    for n in range(6):
        assert assoc_rates(A, n) == heun_rates(A.base, n)


def test_assoc_rates_n0():
    A = heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.2, 0.6, c=0.7, mu=0.9)
    assert assoc_rates(A, 0).mu_n == pytest.approx(0.7 * (0.7 + 0.8 - 1) + 0.9)
    B = heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.2, 0.6, c=0.2, mu=0.9)
    assert assoc_rates(B, 0).mu_n == pytest.approx(0.9)


# -- coefficients -------------------------------------------------------------

def test_F0_F1():
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6)
    F = heun_coeffs(P, 3).coeffs
    assert F[0] == 1.0 and F[1] == pytest.approx(-0.25 / 0.8, rel=1e-15)
    P0 = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.0, 0.6)
    assert heun_coeffs(P0, 3).coeffs[1] == 0.0


def test_assoc_F1_by_hand():
    a, b, g, d, e, s, k2, c, mu = 0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6, 0.7, 0.9
    F1 = assoc_coeffs(heun(a, b, g, d, e, s, k2, c=c, mu=mu), 2).coeffs[1]
    assert F1 == pytest.approx((c * (c + g - 1) + mu + d * c - s) / ((1 + c) * (c + g)), rel=1e-14)


@given(params_strategy)
def test_coeffs_match_high_precision(A):
    N = 30
    ref = np.array(mp_assoc_coeffs(A, N))
    got = assoc_coeffs(A, N).coeffs
    assert np.allclose(got, ref, rtol=1e-9, atol=1e-12 * np.max(np.abs(ref)))


def test_assoc_reduces_to_heun():
    A = heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6)
    assert np.allclose(assoc_coeffs(A, 40).coeffs, heun_coeffs(A.base, 40).coeffs,
                       rtol=1e-13, atol=0)


def test_c_equals_one_minus_gamma_gives_tilde():
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6)
    A = AssocParams(P, c=1 - P.gamma, mu=0.0)
    got = assoc_coeffs(A, 40).coeffs
    ref = heun_coeffs(map_tilde(P), 40).coeffs
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-15)


def test_zero_divisor_rejected():
    with pytest.raises(ParameterError):
        heun_coeffs(HeunParams(0.3, -0.2, -1.0, 0.4, 1.5, 0.25, 0.6), 5)
    with pytest.raises(ParameterError):
        assoc_coeffs(heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6, c=-1.8), 5)


def test_coeff_series_readonly_and_json_roundtrip():
    S = assoc_coeffs(heun(s=0.3, k2=0.49, c=0.75, mu=0.5, **CARLITZ), 20)
    with pytest.raises(ValueError):
        S.coeffs[0] = 2.0
    T = CoeffSeries.from_json(S.to_json())
    assert np.array_equal(T.coeffs, S.coeffs) and T.params == S.params
    assert T.params_hash == S.params_hash


def test_coeff_series_golden():
    S = assoc_coeffs(heun(s=0.3, k2=0.49, c=0.75, mu=0.5, **CARLITZ), 20)
    golden = json.loads((GOLDEN / "coeffs_carlitz_c075_mu05.json").read_text())
    assert golden["N"] == S.N and golden["params"] == S.params
    assert np.allclose(S.coeffs, golden["coeffs"], rtol=1e-14, atol=0)


# -- evaluation ----------------------------------------------------------------

def test_eval_at_zero():
    assert Hn(heun(s=0.3, k2=0.49, **CARLITZ), 0.0) == 1.0


def test_constant_series():
    S = CoeffSeries(np.array([1.0, 0.0, 0.0, 0.0]), {})
    assert eval_series(S, 0.7) == 1.0


def test_small_w_leading_order():
    s = 0.3
    # gamma = 1/2 gives F_1 = -2 s
    v = Hn(heun(s=s, k2=0.49, **CARLITZ), 1e-6)
    assert abs(v - (1 - 2 * s * 1e-6)) < 1e-11


def test_truncation_error_when_too_short():
    S = heun_coeffs(HeunParams(s=0.3, k2=0.49, **CARLITZ), 4)
    with pytest.raises(TruncationError):
        eval_series(S, 0.8)


def test_r_max_enforced():
    with pytest.raises(ValueError):
        Hn(heun(s=0.3, k2=0.49, **CARLITZ), 0.95)


def test_series_value_fields():
    res = assoc_eval(heun(s=0.3, k2=0.49, c=0.5, **CARLITZ), 0.6)
    assert res.N >= 32 and res.tail <= 1e-15 * max(1, abs(res.value))


def test_array_evaluation():
    A = heun(s=0.3, k2=0.49, c=0.5, mu=0.2, **CARLITZ)
    w = np.array([0.1, 0.4, 0.8])
    vals = Hn(A, w)
    assert np.allclose(vals, [Hn(A, x) for x in w], rtol=1e-15)


# -- ODE residual --------------------------------------------------------------

@given(params_strategy, st.floats(0.05, 0.9))
def test_ode_residual_small(A, w):
    try:
        S = series_for(A, w)
    except TruncationError:
        assume(False)
    assert ode_residual(A, S, w) < 1e-8


def test_corrupted_coefficient_detected():
    A = heun(s=0.3, k2=0.49, c=0.75, mu=0.5, **CARLITZ)
    S = series_for(A, 0.3)
    F = S.coeffs.copy()
    F[2] *= 1.1
    assert ode_residual(A, CoeffSeries(F, S.params), 0.3) > 1e-3


# -- monic form and maps -------------------------------------------------------

def test_monic_G_low_order():
    A = heun(0.3, 1.1, 0.8, 0.4, 1.2, 0.25, 0.6, c=0.7, mu=0.9)
    S = assoc_coeffs(A, 5)
    G = monic_G(S, A.c, A.base.gamma)
    assert G[0] == 1.0
    assert G[1] == pytest.approx(1.7 * 1.5 * S.coeffs[1], rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_monic_G_leading_coefficient(n):
    a, b, g, d, e, k2, c, mu = 0.3, 1.1, 0.8, 0.4, 1.2, 0.6, 0.7, 0.9
    xs = np.linspace(-2, 2, n + 1)
    Gs = []
    for x in xs:
        A = heun(a, b, g, d, e, 0.0, k2, c=c, mu=mu)
        s = x - spectral_variable(A)
        A = heun(a, b, g, d, e, s, k2, c=c, mu=mu)
        Gs.append(monic_G(assoc_coeffs(A, n), c, g)[n])
    lead = np.polyfit(xs, Gs, n)[0]
    assert lead == pytest.approx((-1) ** n, rel=1e-8)


def test_map_alpha_example_and_involution():
    A = heun(0.0, 0.7, 0.5, 0.5, 0.7, 0.2, 0.4, c=0.3, mu=0.1)
    B = map_P_alpha(A)
    assert (B.base.alpha, B.base.gamma) == (0.5, 0.0)
    assert B.base.delta == pytest.approx(1.0) and B.base.eps == pytest.approx(1.2)
    assert map_P_alpha(B) == A


def test_map_alpha2_fixed_point_and_values():
    A = heun(1.0, -0.3, 0.5, 0.5, 0.7, 0.2, 0.4, c=0.3, mu=0.1)
    B = map_P_alpha2(A)
    assert B.base.s == A.base.s and B.c == A.c
    C = map_P_alpha2(heun(0.3, 0.9, 0.5, 0.5, 1.2, 0.2, 0.4, c=0.8))
    assert C.base.alpha == pytest.approx(1.7) and C.base.beta == pytest.approx(1.6)


@given(params_strategy)
def test_maps_preserve_fuchs(A):
    for m in (map_P_alpha, map_P_beta, map_P_alpha2, map_P_beta2):
        assert abs(m(A).base.fuchs_residual()) < 1e-12
    assert map_P_beta(map_P_beta(A)).base.beta == pytest.approx(A.base.beta)


def _poch_ratio(x, y, n):
    return float(mpmath.rf(x, n) / mpmath.rf(y, n))


@pytest.mark.parametrize("which", ["alpha", "beta"])
def test_first_coefficient_identity(which):
    A = heun(0.3, 0.7, 0.9, 0.5, 0.6, 0.2, 0.5, c=0.4, mu=0.1)
    a = A.base.alpha if which == "alpha" else A.base.beta
    B = map_P_alpha(A) if which == "alpha" else map_P_beta(A)
    F, Fp = assoc_coeffs(A, 20).coeffs, assoc_coeffs(B, 20).coeffs
    for n in range(21):
        r = _poch_ratio(A.c + a, A.c + A.base.gamma, n)
        assert abs(F[n] - r * Fp[n]) <= 1e-12 * max(1.0, abs(F[n]))


@pytest.mark.parametrize("which", ["alpha", "beta"])
def test_second_coefficient_identity(which):
    A = heun(0.3, 0.7, 0.9, 0.5, 0.6, 0.2, 0.5, c=0.4, mu=0.1)
    a = A.base.alpha if which == "alpha" else A.base.beta
    B = map_P_alpha2(A) if which == "alpha" else map_P_beta2(A)
    assert B.c == A.c + (a - 1.0)
    F, Fpp = assoc_coeffs(A, 20).coeffs, assoc_coeffs(B, 20).coeffs
    for n in range(21):
        r = _poch_ratio(A.c + a, A.c + 1, n)
        assert abs(F[n] - r * Fpp[n]) <= 1e-12 * max(1.0, abs(F[n]))


# -- hypergeometric special cases ----------------------------------------------

def test_k0_s0_is_one():
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, 0.0, 0.0)
    assert special_k0(P, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert Hn(P, 0.5) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("s", [-1.3, -0.2, 0.4, 2.0])
@pytest.mark.parametrize("w", [0.1, 0.5, 0.81])
def test_k0_against_mpmath(s, w):
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, s, 0.0)
    a = 0.5 * (P.gamma + P.delta - 1)
    r = mpmath.sqrt(a * a + s)
    ref = complex(mpmath.hyp2f1(a + r, a - r, P.gamma, w)).real
    assert abs(special_k0(P, w) - ref) < 1e-12
    assert abs(Hn(P, w) - ref) < 1e-10


@pytest.mark.parametrize("s", [-1.3, 0.4, 2.0])
@pytest.mark.parametrize("w", [0.1, 0.5, 0.81])
def test_k1_against_mpmath(s, w):
    P = HeunParams(0.3, 1.1, 0.8, 0.4, 1.2, s, 1.0)
    a = 0.5 * (P.gamma - P.alpha - P.beta)
    r = a + mpmath.sqrt(a * a - P.alpha * P.beta - s)
    ref = complex((1 - w) ** r * mpmath.hyp2f1(r + P.alpha, r + P.beta, P.gamma, w)).real
    assert abs(special_k1(P, w) - ref) < 1e-12
    assert abs(Hn(P, w) - ref) < 1e-10
