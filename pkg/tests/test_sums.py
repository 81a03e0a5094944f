import dataclasses
import math

import numpy as np
import pytest

from oracles import delta_qexp_jacobi, primes_naive, psi_naive
from rslab.errors import DivergentLocalFactor, StreamTooShort
from rslab.instances import instance_for, make_instance
from rslab.sums import (
    brumley_max_product,
    composite_tail,
    grc_prime_interval,
    hypothesis_h_partial,
    mertens_check,
    psi_rs,
    short_interval,
)


@pytest.fixture(scope="module")
def zeta():
    return make_instance("zeta", 10**6)


@pytest.fixture(scope="module")
def delta():
    return make_instance("holomorphic:12", 10**5)


@pytest.fixture(scope="module")
def tau():
    return delta_qexp_jacobi(2100)


# ---------------------------------------------------------------- psi


def test_psi_10(zeta):
    # [DERIVED] 3 log 2 + 2 log 3 + log 5 + log 7
    assert psi_rs(zeta, 10) == pytest.approx(7.832015, abs=1e-6)
    assert psi_rs(zeta, 10) == pytest.approx(3 * math.log(2) + 2 * math.log(3) + math.log(35), rel=1e-15)


def test_psi_100(zeta):
    # [DERIVED] prime-power enumeration
    assert psi_rs(zeta, 100) == pytest.approx(psi_naive(100), rel=1e-14)


def test_psi_empty(zeta, delta):
    # [TRIVIAL]
    assert psi_rs(zeta, 1.5) == 0.0
    assert psi_rs(delta, 1.5) == 0.0


def test_psi_too_short():
    with pytest.raises(StreamTooShort):
        psi_rs(make_instance("zeta", 1000), 2000)


# ---------------------------------------------------------------- short intervals


def test_short_interval_zeta(zeta):
    # [DERIVED] PNT-scale tolerance
    zeta = instance_for("zeta", 1e6 + 1e4)
    r = short_interval(zeta, 1e6, 1e4)
    assert 0.9 <= r.ratio <= 1.1
    assert r.raw == pytest.approx(psi_rs(zeta, 1e6 + 1e4) - psi_rs(zeta, 1e6), rel=1e-12)


def test_short_interval_delta_order_one():
    delta = instance_for("holomorphic:12", 1.1e5)
    r = short_interval(delta, 1e5, 1e4)
    assert 0.5 <= r.ratio <= 2.0


def test_short_interval_additivity(zeta):
    # [TRIVIAL] same stream on both sides
    for x in (10.0, 1000.0, 12345.0):
        r = short_interval(zeta, x, x)
        assert r.raw == pytest.approx(psi_rs(zeta, 2 * x) - psi_rs(zeta, x), rel=1e-13)


def test_short_interval_bad_h(zeta):
    with pytest.raises(ValueError):
        short_interval(zeta, 100, 1)
    with pytest.raises(ValueError):
        short_interval(zeta, 100, 200)


def test_short_interval_with_beta1(zeta):
    r = short_interval(zeta, 1e5, 1e3, beta1=0.9)
    assert 1e5 <= r.xi <= 1e5 + 1e3
    assert r.main == pytest.approx(1e3 * (1 - r.xi ** (0.9 - 1)))


def test_grc_zeta_is_theta_sum(zeta):
    # [TRIVIAL] |lambda| = 1
    expect = math.fsum(math.log(p) for p in primes_naive(2000) if 1000 < p <= 2000)
    assert grc_prime_interval(zeta, 1000, 1000) == pytest.approx(expect, rel=1e-14)


def test_grc_delta_against_tau_oracle(delta, tau):
    # [DERIVED] tau(p) from the Jacobi-series oracle
    expect = math.fsum(
        (tau[p] / p**5.5) ** 2 * math.log(p) for p in primes_naive(2000) if 1000 < p <= 2000
    )
    assert grc_prime_interval(delta, 1000, 1000) == pytest.approx(expect, rel=1e-12)


def test_grc_empty_interval(zeta):
    # [DERIVED] no primes in 25..28
    assert grc_prime_interval(zeta, 24, 4) == 0.0


def test_grc_dominated(zeta, delta):
    for rep in (zeta, delta):
        for x, h in ((100, 50), (1000, 1000), (5e4, 3e3)):
            assert grc_prime_interval(rep, x, h) <= short_interval(rep, x, h).raw + 1e-9


# ---------------------------------------------------------------- composite tail


def test_composite_tail_zeta(zeta):
    # [DERIVED] log p over p^k in [x, 2x], k >= 2
    x = 10**4
    expect = 0.0
    for p in primes_naive(int(math.isqrt(2 * x))):
        q = p * p
        while q <= 2 * x:
            if q >= x:
                expect += math.log(p)
            q *= p
    assert composite_tail(zeta, x).tail == pytest.approx(expect, rel=1e-13)


def test_composite_tail_delta_ratio(delta):
    assert composite_tail(delta, 1e4).ratio <= 10


def test_composite_tail_single_power(zeta):
    # [DERIVED] 16 is the only prime power with exponent >= 2 in [10, 20]
    assert composite_tail(zeta, 10).tail == pytest.approx(math.log(2))
    assert composite_tail(zeta, 10.5).tail == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        composite_tail(zeta, 3)


# ---------------------------------------------------------------- Hypothesis H


def test_hyp_h_zeta(zeta):
    # [DERIVED] direct sum of (log p)^2 p^-2
    expect = math.fsum(math.log(p) ** 2 / p**2 for p in primes_naive(100))
    assert hypothesis_h_partial(zeta, 2, 100).total == pytest.approx(expect, rel=1e-14)


def test_hyp_h_delta_increments(delta):
    r = hypothesis_h_partial(delta, 2, 1e5)
    assert math.isfinite(r.total)
    assert r.decreasing()
    assert r.increments[-1] < 1e-2


def test_hyp_h_small_X(zeta):
    # [TRIVIAL]
    assert hypothesis_h_partial(zeta, 2, 1.5).total == 0.0


def test_hyp_h_monotone_in_X(delta):
    vals = [hypothesis_h_partial(delta, 3, X).total for X in (10, 100, 1000, 10**4)]
    assert vals == sorted(vals)


# ---------------------------------------------------------------- Mertens and Brumley


def test_mertens_zeta(zeta):
    # [DERIVED] direct sums
    r = mertens_check(zeta, 0.1, 1e6)
    assert r.partial < 1 / 0.1 + 0.5 * math.log(math.e) + 10
    assert r.passed
    assert mertens_check(zeta, 10, 1e6).partial < 0.2


def test_mertens_empty(zeta):
    # [TRIVIAL]
    r = mertens_check(zeta, 0.5, 1)
    assert r.partial == 0.0 and r.passed


def test_brumley_zeta(zeta):
    # [DERIVED] direct product of (1 - p^-2)^-1
    expect = math.prod(1 / (1 - p**-2.0) for p in primes_naive(100))
    r = brumley_max_product(zeta, 1.0, 100)
    assert r.value == pytest.approx(expect, rel=1e-13)
    assert r.value < math.pi**2 / 6


def test_brumley_delta(delta):
    # [DERIVED] |alpha| = 1 so each factor is (1 - p^-1.5)^-1
    expect = math.prod(1 / (1 - p**-1.5) for p in primes_naive(1000))
    assert brumley_max_product(delta, 0.5, 1000).value == pytest.approx(expect, rel=1e-12)


def test_brumley_empty(zeta):
    # [TRIVIAL] empty product
    assert brumley_max_product(zeta, 1.0, 1).value == 1.0


def test_brumley_divergent():
    rep = make_instance("zeta", 100)
    with pytest.raises(ValueError):
        brumley_max_product(rep, 0.0, 100)
    # a synthetic large parameter makes the geometric ratio exceed 1
    bad = dataclasses.replace(rep, alphas=np.full_like(rep.alphas, 3.0))
    with pytest.raises(DivergentLocalFactor):
        brumley_max_product(bad, 0.1, 100)
