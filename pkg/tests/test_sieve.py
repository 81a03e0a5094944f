import math

import numpy as np
import pytest
from scipy.integrate import quad

from oracles import primes_naive
from rslab.errors import KappaUnavailable
from rslab.instances import instance_for, make_instance
from rslab.sieve import (
    DEFAULT_WEIGHT,
    SmoothWeight,
    brun_titchmarsh,
    decay_constant,
    estimate_kappa,
    g_factor,
    g_strip_bound_check,
    ideals_from_norms,
    phi_check,
    selberg_upper,
    weighted_divisor_sum,
)

PHI = DEFAULT_WEIGHT
AREA = 1.75  # golden value for the fixed bump


@pytest.fixture(scope="module")
def zeta():
    return make_instance("zeta", 10**6)


@pytest.fixture(scope="module")
def delta():
    return make_instance("holomorphic:12", 10**5)


# ---------------------------------------------------------------- weight


def test_weight_pointwise():
    y = np.linspace(-3, 3, 6001)
    v = PHI(y)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(v[np.abs(y) >= 2] == 0)
    assert np.all(v[(y >= 0) & (y <= 1)] == 1)
    lo, hi = PHI.support
    assert -2 < lo and hi < 2


def test_weight_rejects_wide_ramp():
    with pytest.raises(ValueError):
        SmoothWeight(ramp=1.0)


def test_area_golden():
    # [DERIVED] plain quadrature of Phi over its support
    direct = quad(lambda y: float(PHI(y)), -2, 2, points=[-0.75, 0, 1, 1.75], epsabs=1e-13)[0]
    assert direct == pytest.approx(AREA, abs=1e-10)
    assert phi_check(0).real == pytest.approx(AREA, abs=1e-10)
    assert 1 < AREA < 4


def test_check_against_direct_quadrature():
    # [DERIVED] full-support quadrature without the closed-form plateau
    for s in (1.0, -2.5, 0.3 + 4j, 1j):
        re = quad(lambda y: float(PHI(y)) * math.exp(s.real * y) * math.cos(s.imag * y) if isinstance(s, complex)
                  else float(PHI(y)) * math.exp(s * y), -2, 2, points=[-0.75, 0, 1, 1.75], limit=400)[0]
        im = 0.0
        if isinstance(s, complex):
            im = quad(lambda y: float(PHI(y)) * math.exp(s.real * y) * math.sin(s.imag * y), -2, 2,
                      points=[-0.75, 0, 1, 1.75], limit=400)[0]
        assert abs(phi_check(s) - complex(re, im)) <= 1e-10


def test_check_conjugate_symmetry():
    # [TRIVIAL] real Phi
    for s in (0.5 + 3j, -4 + 10j, 2 - 1j):
        assert abs(phi_check(s.conjugate()) - phi_check(s).conjugate()) <= 1e-12


def test_check_decay_k2():
    # the bump is smooth, so |s|^2 |Phi-check(s)| may only shrink along |s| = 10, 20, 40
    for direction in (1j, -1, -0.6 + 0.8j):
        c = [decay_constant(direction * t) for t in (10, 20, 40)]
        assert c[1] <= 2 * c[0] and c[2] <= 2 * c[1]


# ---------------------------------------------------------------- g


def test_g_examples(zeta):
    # [PAPER] unit ideal
    assert g_factor(zeta, []) == 1
    # [TRIVIAL] 1 - (1 - 1/2)
    assert g_factor(zeta, ideals_from_norms(zeta, [2])) == pytest.approx(0.5, abs=1e-15)
    # [DERIVED]
    assert g_factor(zeta, ideals_from_norms(zeta, [2, 3])) == pytest.approx(1 / 6, abs=1e-15)


def test_g_rejects_repeats(zeta):
    i = ideals_from_norms(zeta, [2])[0]
    with pytest.raises(ValueError):
        g_factor(zeta, [i, i])


def test_g_multiplicative(delta):
    a = ideals_from_norms(delta, [2, 5])
    b = ideals_from_norms(delta, [3, 7, 11])
    assert g_factor(delta, a + b) == pytest.approx(g_factor(delta, a) * g_factor(delta, b), abs=1e-12)
    for i in a + b:
        assert 0 <= g_factor(delta, [i]) < 1


def test_g_gaussian_split():
    rep = make_instance("dedekind:-1", 1000)
    d = ideals_from_norms(rep, [5, 5])
    assert len(set(d)) == 2
    assert g_factor(rep, d) == pytest.approx(0.2**2)


def test_strip_bound_examples(zeta, delta):
    # [TRIVIAL]
    (row,) = g_strip_bound_check(zeta, [], [0.0])
    assert row.value == 1 and row.passed
    # [DERIVED] k = 1 puts the line at 1/2: |2^(-1/2)|
    (row,) = g_strip_bound_check(zeta, ideals_from_norms(zeta, [2]), [0.0])
    assert row.value == pytest.approx(2**-0.5, rel=1e-12)
    assert row.passed
    for rep in (zeta, delta):
        rows = g_strip_bound_check(rep, ideals_from_norms(rep, [2, 3, 5, 7, 11]), [0.0, 1.0])
        assert all(r.passed for r in rows)


# ---------------------------------------------------------------- local density


def test_local_density_unit(zeta):
    # [DERIVED] direct weighted count of integers, kappa = 1
    r = weighted_divisor_sum(zeta, [], 1e5, 1)
    assert r.ratio == pytest.approx(1, abs=0.05)
    n = np.arange(1, int(1e5 * math.exp(2)) + 1)
    direct = math.fsum(PHI(np.log(n / 1e5)))
    assert r.lhs == pytest.approx(direct, rel=1e-12)


def test_local_density_halves(zeta):
    # [DERIVED] even n only
    full = weighted_divisor_sum(zeta, [], 1e5, 1)
    half = weighted_divisor_sum(zeta, ideals_from_norms(zeta, [2]), 1e5, 1)
    assert half.g == 0.5
    assert half.main == pytest.approx(full.main / 2)
    assert half.lhs == pytest.approx(full.lhs / 2, rel=1e-3)


def test_local_density_tiny_x(zeta):
    r = weighted_divisor_sum(zeta, [], 2, 1)
    assert math.isfinite(r.lhs) and abs(r.difference) <= r.budget


def test_local_density_budget_grid(zeta):
    for x in (1e3, 1e4, 1e5):
        for T in (1, 2, 4):
            for d in ([], [2], [2, 3]):
                r = weighted_divisor_sum(zeta, ideals_from_norms(zeta, d), x, T)
                assert r.budget_ratio <= 10


def test_kappa_required(delta):
    with pytest.raises(KappaUnavailable):
        weighted_divisor_sum(delta, [], 1e4, 1)


def test_kappa_estimates(delta):
    k = estimate_kappa(delta, 1e4)
    assert k.euler > 0 and k.smoothed > 0
    assert k.smoothed == pytest.approx(k.euler, rel=0.3)
    r = weighted_divisor_sum(delta, [], 1e4, 1, kappa=k.euler)
    assert r.budget_ratio <= 10


# ---------------------------------------------------------------- sieve upper bound


def test_selberg_zeta(zeta):
    # [DERIVED] direct enumeration of 10-rough integers
    r = selberg_upper(zeta, 1e5, 1, 10)
    small = primes_naive(10)
    n = np.arange(1, int(1e5 * math.exp(1.75)) + 1)
    rough = np.ones(n.size, dtype=bool)
    for p in small:
        rough &= n % p != 0
    assert r.lhs == pytest.approx(math.fsum(PHI(np.log(n[rough] / 1e5))), rel=1e-12)
    assert r.lhs >= 0 and r.passed


def test_selberg_z_beyond_window(zeta):
    # [TRIVIAL] only n = 1 survives and it lies outside the support
    r = selberg_upper(zeta, 1e3, 1, 1e3 * math.exp(2) + 1)
    assert r.lhs == 0


def test_selberg_delta(delta):
    r = selberg_upper(delta, 1e4, 1, 10)
    assert r.lhs >= 0
    assert r.lhs <= r.main + 10 * abs(r.error_budget)


def test_selberg_rejects_small_z(zeta):
    with pytest.raises(ValueError):
        selberg_upper(zeta, 1e4, 1, 1.5)


# ---------------------------------------------------------------- Brun-Titchmarsh


def test_bt_zeta_examples(zeta):
    # [DERIVED] PNT scale: x (e^0.1 - 1) / (x / 10)
    r = brun_titchmarsh(zeta, 1e5, 10)
    assert r.ratio == pytest.approx(10 * (math.exp(0.1) - 1), rel=0.05)
    big = instance_for("zeta", 1e6 * math.exp(0.01))
    assert brun_titchmarsh(big, 1e6, 100).ratio == pytest.approx(1.0, abs=0.1)


def test_bt_delta(delta):
    assert brun_titchmarsh(delta, 1e4, 10).ratio <= 5


def test_bt_doubling_stable(zeta):
    for T in (1, 10):
        a = brun_titchmarsh(zeta, 5e4, T).ratio
        b = brun_titchmarsh(zeta, 1e5, T).ratio
        assert abs(b / a - 1) <= 0.3


def test_bt_rejects_small_T(zeta):
    with pytest.raises(ValueError):
        brun_titchmarsh(zeta, 1e4, 0.5)
