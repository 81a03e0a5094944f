import json
import math

import numpy as np
import pytest

from oracles import complete_homogeneous, delta_qexp
from rslab.errors import NonRealCoefficient, RamifiedPrime, StreamTooShort, Unsupported, UnsupportedField
from rslab.instances import make_instance
from rslab.lfunc_core import (
    FieldDescriptor,
    Representation,
    RsLocal,
    SatakeLocal,
    analytic_conductor,
    bh_conductor_check,
    coeff_stream,
    exp_identity_check,
    local_standard_coeffs,
    newton_h,
    power_sums,
    ramified_rs_satake,
    rs_analytic_conductor,
    rs_local_coeffs,
    rs_satake,
    rs_vonmangoldt,
)

TAU2 = delta_qexp(2)[2]
LAM2 = TAU2 / 2**5.5


def delta_local_at_2() -> SatakeLocal:
    # [DERIVED] alpha + 1/alpha = tau(2) 2^(-11/2), |alpha| = 1, tau(2) from the eta-power oracle
    a = complex(LAM2 / 2, math.sqrt(4 - LAM2**2) / 2)
    return SatakeLocal(2, 1, False, (a, a.conjugate()))


# ---------------------------------------------------------------- field data


def test_field_descriptor_discriminants():
    # [TRIVIAL] D = |d| for d = 1 mod 4, else 4|d|
    assert FieldDescriptor.rationals().discriminant == 1
    assert FieldDescriptor.quadratic(-1).discriminant == 4
    assert FieldDescriptor.quadratic(-3).discriminant == 3
    assert FieldDescriptor.quadratic(5).discriminant == 5
    assert FieldDescriptor.quadratic(2).discriminant == 8


def test_field_places_sum_to_degree():
    for fd in (FieldDescriptor.rationals(), FieldDescriptor.quadratic(-1), FieldDescriptor.quadratic(5)):
        assert sum(fd.place_degrees) == fd.degree


def test_field_rejects_non_squarefree():
    with pytest.raises(UnsupportedField):
        FieldDescriptor.quadratic(12)


# ---------------------------------------------------------------- local algebra


def test_standard_coeffs_zeta():
    # [TRIVIAL] geometric series
    loc = SatakeLocal(2, 1, False, (1 + 0j,))
    assert local_standard_coeffs(loc, 3) == [1, 1, 1, 1]


def test_standard_coeffs_chi4_at_3():
    # [TRIVIAL] sign alternation
    loc = SatakeLocal(3, 1, False, (-1 + 0j,))
    assert np.allclose(local_standard_coeffs(loc, 3), [1, -1, 1, -1])


def test_standard_coeffs_delta_at_2():
    # [DERIVED] lambda(2) from tau(2); lambda(4) = lambda(2)^2 - 1 by the Hecke recursion
    c = local_standard_coeffs(delta_local_at_2(), 2)
    assert c[1].real == pytest.approx(-0.53033009, abs=1e-8)
    assert c[2].real == pytest.approx(LAM2**2 - 1, abs=1e-12)
    assert c[2].real == pytest.approx(-0.71875, abs=1e-12)


def test_newton_matches_brute_force_symmetric_functions():
    # [DERIVED] h_k by explicit monomial enumeration
    rng = np.random.default_rng(7)
    alphas = np.exp(2j * np.pi * rng.random(3)) * rng.uniform(0.5, 1.0, 3)
    h = newton_h(power_sums(alphas, 6))
    for k in range(7):
        assert h[k] == pytest.approx(complete_homogeneous(list(alphas), k), abs=1e-12)


def test_rs_satake_trivial_and_unit():
    # [TRIVIAL] 1 * 1 and i * conj(i)
    assert rs_satake(SatakeLocal(2, 1, False, (1 + 0j,))).rs_alphas == (1 + 0j,)
    assert rs_satake(SatakeLocal(5, 1, False, (1j,))).rs_alphas == (1 + 0j,)


def test_rs_satake_delta_sum():
    # [DERIVED] the four products sum to lambda(2)^2 = 576/2048
    rs = rs_satake(delta_local_at_2())
    assert len(rs.rs_alphas) == 4
    assert sum(rs.rs_alphas).real == pytest.approx(576 / 2048, abs=1e-14)
    assert sorted(abs(a - 1) < 1e-12 for a in rs.rs_alphas).count(True) == 2


def test_rs_satake_rejects_ramified():
    with pytest.raises(RamifiedPrime):
        rs_satake(SatakeLocal(2, 1, True, (0j,)))


def test_ramified_rs_satake():
    # [TRIVIAL] zero Satake parameter gives an empty product set
    assert ramified_rs_satake(SatakeLocal(2, 1, True, (0j,))).rs_alphas == ()
    assert ramified_rs_satake(SatakeLocal(5, 1, True, (0j,))).rs_alphas == ()
    with pytest.raises(Unsupported):
        ramified_rs_satake(SatakeLocal(2, 1, True, (0j, 0j)))


def test_rs_local_coeffs_examples():
    # [TRIVIAL] trivial n = 1
    assert rs_local_coeffs(RsLocal(2, (1 + 0j,)), 2) == [1.0, 1.0, 1.0]
    rs = rs_satake(delta_local_at_2())
    c = rs_local_coeffs(rs, 2)
    # [DERIVED] 0.28125 = (tau(2)/2^(11/2))^2 and h_2 by monomial enumeration
    assert c[1] == pytest.approx(0.28125, abs=1e-14)
    assert c[2] == pytest.approx(complete_homogeneous(list(rs.rs_alphas), 2).real, abs=1e-12)


def test_rs_local_coeffs_non_real_raises():
    with pytest.raises(NonRealCoefficient):
        rs_local_coeffs(RsLocal(2, (1j,)), 1)


def test_rs_vonmangoldt_examples():
    # [TRIVIAL] log 2
    assert rs_vonmangoldt(RsLocal(2, (1 + 0j,)), 1) == pytest.approx(0.693147, abs=1e-6)
    # [DERIVED] 0.28125 log 2
    assert rs_vonmangoldt(rs_satake(delta_local_at_2()), 1) == pytest.approx(0.1949476, abs=1e-7)
    # [TRIVIAL] empty product at a ramified prime
    for k in (1, 2, 5):
        assert rs_vonmangoldt(RsLocal(2, ()), k) == 0.0


def test_rs_vonmangoldt_k1_is_lambda_log_norm():
    rs = rs_satake(delta_local_at_2())
    assert rs_vonmangoldt(rs, 1) == pytest.approx(rs_local_coeffs(rs, 1)[1] * math.log(2), abs=1e-15)


def test_exp_identity_examples():
    # [TRIVIAL] both sides geometric
    assert exp_identity_check(RsLocal(2, (1 + 0j,)), 10) <= 1e-12
    # [DERIVED] power-series exponentiation against Newton expansion
    assert exp_identity_check(rs_satake(delta_local_at_2()), 10) <= 1e-9
    rng = np.random.default_rng(2024)
    alphas = tuple(np.exp(2j * np.pi * rng.random(3)))
    assert exp_identity_check(rs_satake(SatakeLocal(7, 1, False, alphas)), 8) <= 1e-9


# ---------------------------------------------------------------- conductors


def test_analytic_conductor_examples():
    zeta = make_instance("zeta", 1000)
    # [TRIVIAL] e, and e + 1 at t = 1
    assert analytic_conductor(zeta, 0) == pytest.approx(math.e, rel=1e-15)
    assert analytic_conductor(zeta, 1) == pytest.approx(math.e + 1, rel=1e-15)
    # [DERIVED] 4 (e + 1) for the odd character mod 4
    chi4 = make_instance("dirichlet:4:1", 1000)
    assert analytic_conductor(chi4, 0) == pytest.approx(14.873127, abs=1e-6)


def test_rs_conductor_zeta():
    # [TRIVIAL] single RS parameter 0 + 0
    assert rs_analytic_conductor(make_instance("zeta", 1000)) == pytest.approx(math.e)


def test_bh_conductor_check_examples():
    # [DERIVED] direct evaluation of both sides
    assert all(c.passed for c in bh_conductor_check(make_instance("zeta", 1000), [0, 1, 10]))
    assert all(c.passed for c in bh_conductor_check(make_instance("dirichlet:4:1", 1000), [0, 5]))
    # [TRIVIAL] vacuous
    assert bh_conductor_check(make_instance("zeta", 1000), []) == []


# ---------------------------------------------------------------- representation and streams


def test_representation_json_roundtrip():
    rep = make_instance("dirichlet:5:2", 200)
    doc = json.loads(rep.to_json())
    assert set(doc) >= {"label", "n", "field", "conductor", "arch", "satake"}
    assert set(doc["satake"][0]) == {"norm", "degree", "ramified", "alphas"}
    back = Representation.from_json(rep.to_json())
    assert back.label == rep.label
    assert np.array_equal(back.norms, rep.norms)
    assert np.allclose(back.alphas, rep.alphas)


def test_coeff_stream_zeta_values():
    cs = coeff_stream(make_instance("zeta", 1000), 100)
    # [TRIVIAL] zeta x zeta~ = zeta: lambda = 1, Lambda = classical von Mangoldt
    assert np.all(cs.lam[1:101] == 1.0)
    assert cs.vm[8] == pytest.approx(math.log(2))
    assert cs.vm[6] == 0.0
    assert cs.vm_prime[8] == 0.0


def test_coeff_stream_too_short():
    with pytest.raises(StreamTooShort):
        coeff_stream(make_instance("zeta", 1000), 5000)


def test_coeff_stream_lambda_multiplicative_delta():
    rep = make_instance("holomorphic:12", 1000)
    cs = coeff_stream(rep)
    # lambda_{pi x pi~} is multiplicative on coprime norms
    for m, n in ((2, 3), (4, 9), (5, 7), (8, 11)):
        assert cs.lam[m * n] == pytest.approx(cs.lam[m] * cs.lam[n], abs=1e-12)


def test_coeff_stream_entries_are_norm_sorted():
    cs = coeff_stream(make_instance("dirichlet:4:1", 1000), 50)
    norms = [m for m, _, _ in cs.entries()]
    assert norms == sorted(norms)
