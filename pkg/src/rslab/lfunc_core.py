"""Coefficient algebra for standard and Rankin-Selberg L-functions.

A representation is stored as flat numpy arrays over its prime ideals
(norm, residue degree, ramification flag, underlying rational prime and
the n Satake parameters).  Local Euler factors are expanded through power
sums and Newton's identities; global coefficients are assembled by norm
in :func:`coeff_stream`.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    NonRealCoefficient,
    RamifiedPrime,
    StreamTooShort,
    Unsupported,
    UnsupportedField,
)
from .parallel import block_fsum

E = math.e
REAL_TOL = 1e-6


def theta_n(n: int) -> float:
    """Exponent of the uniform bound toward Ramanujan for GL(n)."""
    return 0.5 - 1.0 / (n * n + 1)


def is_squarefree(d: int) -> bool:
    d = abs(d)
    if d == 0:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    kind: str = "rationals"
    d: int = 1

    def __post_init__(self):
        if self.kind == "rationals":
            if self.d != 1:
                raise UnsupportedField("rationals carry d=1")
        elif self.kind == "quadratic":
            if self.d in (0, 1) or not is_squarefree(self.d):
                raise UnsupportedField(f"quadratic field needs squarefree d != 0, 1; got {self.d}")
        else:
            raise UnsupportedField(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldDescriptor:
        return cls("rationals", 1)

    @classmethod
    def quadratic(cls, d: int) -> FieldDescriptor:
        return cls("quadratic", d)

    @property
    def degree(self) -> int:
        return 1 if self.kind == "rationals" else 2

    @property
    def discriminant(self) -> int:
        if self.kind == "rationals":
            return 1
        return abs(self.d) if self.d % 4 == 1 else 4 * abs(self.d)

    @property
    def places(self) -> tuple[str, ...]:
        if self.kind == "rationals":
            return ("real",)
        return ("real", "real") if self.d > 0 else ("complex",)

    @property
    def place_degrees(self) -> tuple[int, ...]:
        return tuple(1 if v == "real" else 2 for v in self.places)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "d": self.d}


@dataclass(frozen=True)
class SatakeLocal:
    norm: int
    degree: int
    ramified: bool
    alphas: tuple[complex, ...]

    def within_lrs_bound(self, tol: float = 1e-9) -> bool:
        bound = self.norm ** theta_n(len(self.alphas))
        return all(abs(a) <= bound + tol for a in self.alphas)


@dataclass(frozen=True)
class RsLocal:
    norm: int
    rs_alphas: tuple[complex, ...]


# ---------------------------------------------------------------------------
# local algebra


def power_sums(alphas: Sequence[complex], k_max: int) -> np.ndarray:
    """p_k = sum_j alpha_j^k for k = 1..k_max."""
    a = np.asarray(alphas, dtype=complex)
    if k_max <= 0:
        return np.zeros(0, dtype=complex)
    if a.size == 0:
        return np.zeros(k_max, dtype=complex)
    powers = np.cumprod(np.broadcast_to(a, (k_max, a.size)), axis=0)
    return powers.sum(axis=1)


def newton_h(p: np.ndarray) -> np.ndarray:
    """Complete homogeneous sums h_0..h_K from power sums p_1..p_K.

    Works on the last axis, so a batch of local factors can be expanded at
    once: ``k h_k = sum_{i=1..k} p_i h_{k-i}``.
    """
    p = np.asarray(p, dtype=complex)
    K = p.shape[-1]
    h = np.zeros(p.shape[:-1] + (K + 1,), dtype=complex)
    h[..., 0] = 1.0
    for k in range(1, K + 1):
        acc = np.zeros(p.shape[:-1], dtype=complex)
        for i in range(1, k + 1):
            acc = acc + p[..., i - 1] * h[..., k - i]
        h[..., k] = acc / k
    return h


def local_standard_coeffs(loc: SatakeLocal, k_max: int) -> list[complex]:
    """lambda_pi(p^k) for k = 0..k_max from the standard Euler factor."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    return [complex(v) for v in newton_h(power_sums(loc.alphas, k_max))]


def rs_satake(loc: SatakeLocal) -> RsLocal:
    if loc.ramified:
        raise RamifiedPrime(f"prime of norm {loc.norm} is ramified; use ramified_rs_satake")
    a = loc.alphas
    return RsLocal(loc.norm, tuple(x * y.conjugate() for x in a for y in a))


def ramified_rs_satake(loc: SatakeLocal) -> RsLocal:
    # Only the GL(1) convention alpha = 0 is implemented: the local factor is 1.
    if not loc.ramified:
        raise ValueError("ramified_rs_satake called at an unramified prime")
    if len(loc.alphas) != 1:
        raise Unsupported("ramified Rankin-Selberg parameters are only available for n = 1")
    if abs(loc.alphas[0]) > 0:
        raise Unsupported("ramified GL(1) data must have alpha = 0")
    return RsLocal(loc.norm, ())


def rs_local(loc: SatakeLocal) -> RsLocal:
    return ramified_rs_satake(loc) if loc.ramified else rs_satake(loc)


def _realify(values: np.ndarray) -> np.ndarray:
    worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if worst > REAL_TOL:
        raise NonRealCoefficient(f"imaginary residue {worst:.3e} exceeds {REAL_TOL}")
    return values.real.copy()


def rs_local_coeffs(rs: RsLocal, k_max: int) -> list[float]:
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    h = newton_h(power_sums(rs.rs_alphas, k_max))
    return [float(v) for v in _realify(h)]


def rs_vonmangoldt(rs: RsLocal, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    pk = power_sums(rs.rs_alphas, k)[k - 1] if rs.rs_alphas else 0j
    val = _realify(np.array([pk]))[0]
    return float(val * math.log(rs.norm))


def exp_identity_check(rs: RsLocal, k_max: int) -> float:
    """Largest coefficient mismatch in exp(sum Lambda X^k/(k log N)) = sum lambda X^k.

    The left side is exponentiated as a truncated Taylor series of
    polynomial powers, independently of the Newton recursion used for the
    right side.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    logn = math.log(rs.norm)
    series = np.zeros(k_max + 1)
    for k in range(1, k_max + 1):
        series[k] = rs_vonmangoldt(rs, k) / (k * logn)
    lhs = np.zeros(k_max + 1)
    term = np.zeros(k_max + 1)
    term[0] = 1.0
    lhs += term
    for m in range(1, k_max + 1):
        term = np.convolve(term, series)[: k_max + 1] / m
        lhs += term
    rhs = np.asarray(rs_local_coeffs(rs, k_max))
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, eq=False)
class Representation:
    """A curated automorphic representation with Satake data up to ``cutoff``.

    Per-ideal data lives in parallel arrays ordered by norm.  Instances hash
    by identity so derived streams can be memoised.
    """

    label: str
    n: int
    field: FieldDescriptor
    conductor: int
    arch: tuple[tuple[complex, ...], ...]
    norms: np.ndarray
    degrees: np.ndarray
    ramified: np.ndarray
    primes: np.ndarray
    alphas: np.ndarray
    cutoff: int
    rs_conductor: int = 1
    kappa: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def num_ideals(self) -> int:
        return int(self.norms.size)

    def local(self, i: int) -> SatakeLocal:
        return SatakeLocal(
            int(self.norms[i]),
            int(self.degrees[i]),
            bool(self.ramified[i]),
            tuple(complex(a) for a in self.alphas[i]),
        )

    @property
    def satake(self) -> dict[tuple[int, int], SatakeLocal]:
        """Satake data keyed by (rational prime, index of the ideal above it)."""
        out: dict[tuple[int, int], SatakeLocal] = {}
        seen: dict[int, int] = {}
        for i in range(self.num_ideals):
            p = int(self.primes[i])
            j = seen.get(p, 0)
            seen[p] = j + 1
            out[(p, j)] = self.local(i)
        return out

    def ideals_of_norm(self, norm: int) -> list[int]:
        lo, hi = np.searchsorted(self.norms, [norm, norm + 1])
        return list(range(int(lo), int(hi)))

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "field": self.field.to_dict(),
            "conductor": self.conductor,
            "arch": [[mu.real, mu.imag] for place in self.arch for mu in place],
            "satake": [
                {
                    "norm": int(self.norms[i]),
                    "degree": int(self.degrees[i]),
                    "ramified": bool(self.ramified[i]),
                    "alphas": [[a.real, a.imag] for a in self.alphas[i]],
                }
                for i in range(self.num_ideals)
            ],
            "rs_conductor": self.rs_conductor,
            "cutoff": self.cutoff,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> Representation:
        fd = FieldDescriptor(doc["field"]["kind"], int(doc["field"].get("d", 1)))
        n = int(doc["n"])
        flat = [complex(re, im) for re, im in doc["arch"]]
        nplaces = len(fd.places)
        if len(flat) != n * nplaces:
            raise ValueError(f"arch must list {n * nplaces} parameters")
        arch = tuple(tuple(flat[v * n : (v + 1) * n]) for v in range(nplaces))
        entries = sorted(doc["satake"], key=lambda e: e["norm"])
        norms = np.array([int(e["norm"]) for e in entries], dtype=np.int64)
        degrees = np.array([int(e["degree"]) for e in entries], dtype=np.int64)
        primes = np.array(
            [round(int(e["norm"]) ** (1.0 / int(e["degree"]))) for e in entries], dtype=np.int64
        )
        alphas = np.array(
            [[complex(re, im) for re, im in e["alphas"]] for e in entries], dtype=complex
        ).reshape(len(entries), n)
        return cls(
            label=doc["label"],
            n=n,
            field=fd,
            conductor=int(doc["conductor"]),
            arch=arch,
            norms=norms,
            degrees=degrees,
            ramified=np.array([bool(e["ramified"]) for e in entries], dtype=bool),
            primes=primes,
            alphas=alphas,
            cutoff=int(doc.get("cutoff", int(norms.max()) if norms.size else 1)),
            rs_conductor=int(doc.get("rs_conductor", 1)),
            kappa=doc.get("kappa"),
        )

    @classmethod
    def from_json(cls, text: str) -> Representation:
        return cls.from_dict(json.loads(text))


def analytic_conductor(rep: Representation, t: float = 0.0) -> float:
    fd = rep.field
    value = float(fd.discriminant) ** rep.n * rep.conductor
    for dv, mus in zip(fd.place_degrees, rep.arch):
        for mu in mus:
            value *= E + abs(1j * t + mu) ** dv
    return value


def rs_arch(rep: Representation) -> tuple[tuple[complex, ...], ...]:
    """Archimedean Rankin-Selberg parameters by the sum rule mu_j + conj(mu_j')."""
    return tuple(tuple(a + b.conjugate() for a in mus for b in mus) for mus in rep.arch)


def rs_analytic_conductor(rep: Representation, t: float = 0.0) -> float:
    fd = rep.field
    value = float(fd.discriminant) ** (rep.n * rep.n) * rep.rs_conductor
    for dv, mus in zip(fd.place_degrees, rs_arch(rep)):
        for mu in mus:
            value *= E + abs(1j * t + mu) ** dv
    return value


@dataclass
class ConductorCheck:
    t: float
    lhs: float
    rhs: float
    ratio: float
    passed: bool


def bh_conductor_check(rep: Representation, t_grid: Sequence[float]) -> list[ConductorCheck]:
    """Compare C(pi x pi~, t) with C(pi x pi~)(e + |t|)^([F:Q] n^2) on a grid."""
    base = rs_analytic_conductor(rep, 0.0)
    expo = rep.field.degree * rep.n * rep.n
    out = []
    for t in t_grid:
        lhs = rs_analytic_conductor(rep, t)
        rhs = base * (E + abs(t)) ** expo
        out.append(ConductorCheck(float(t), lhs, rhs, lhs / rhs, lhs <= rhs * (1 + 1e-12)))
    return out


# ---------------------------------------------------------------------------
# global coefficient streams


@dataclass(frozen=True)
class CoeffStream:
    """Norm-indexed Dirichlet data of L(s, pi x pi~) up to ``cutoff``.

    ``lam[m]`` and ``vm[m]`` are the sums of lambda and Lambda over the
    ideals of norm m; ``vm_prime`` keeps only the prime-ideal part of ``vm``.
    """

    cutoff: int
    lam: np.ndarray
    vm: np.ndarray
    vm_prime: np.ndarray

    def entries(self) -> Iterator[tuple[int, float, float]]:
        for m in range(1, self.cutoff + 1):
            lam, vm = float(self.lam[m]), float(self.vm[m])
            if lam != 0.0 or vm != 0.0:
                yield m, lam, vm

    def norm_sum(self, values: str, lo: float, hi: float) -> float:
        """Exactly rounded sum of ``values`` over norms in (lo, hi]."""
        return norm_sum(getattr(self, values), lo, hi)


def norm_sum(arr: np.ndarray, lo: float, hi: float) -> float:
    """Sum of arr[m] for lo < m <= hi, reproducible for any worker count."""
    a = max(int(math.floor(lo)) + 1, 0)
    b = min(int(math.floor(hi)), arr.size - 1)
    return block_fsum(arr, a, b + 1)


def rs_power_sums(rep: Representation, k_max: int, idx: np.ndarray | None = None) -> np.ndarray:
    """Power sums sum_{j,j'} alpha_{j,j'}^k (k=1..k_max) for the selected ideals."""
    if idx is None:
        idx = np.arange(rep.num_ideals)
    a = rep.alphas[idx]
    ram = rep.ramified[idx]
    if rep.n >= 2 and ram.any():
        raise Unsupported("ramified Rankin-Selberg parameters are only available for n = 1")
    out = np.zeros((idx.size, k_max))
    cur = np.ones_like(a)
    for k in range(k_max):
        cur = cur * a
        # sum_{j,j'} (a_j conj a_j')^k = |sum_j a_j^k|^2
        out[:, k] = np.abs(cur.sum(axis=1)) ** 2
    out[ram] = 0.0
    return out


def _require(rep: Representation, X: float) -> int:
    X = int(math.floor(X))
    if X > rep.cutoff:
        raise StreamTooShort(f"{rep.label}: need data to {X}, instance built to {rep.cutoff}")
    return X


def vonmangoldt_by_norm(rep: Representation, X: float) -> tuple[np.ndarray, np.ndarray]:
    """Dense (Lambda, prime-ideal part of Lambda) arrays indexed by norm 0..X."""
    X = _require(rep, X)
    vm = np.zeros(X + 1)
    vm_prime = np.zeros(X + 1)
    sel = np.flatnonzero(rep.norms <= X)
    if sel.size == 0:
        return vm, vm_prime
    norms = rep.norms[sel]
    logs = np.log(norms.astype(float))
    p1 = rs_power_sums(rep, 1, sel)[:, 0]
    np.add.at(vm_prime, norms, p1 * logs)
    vm += vm_prime
    small = sel[rep.norms[sel] ** 2 <= X]
    if small.size:
        kmax = int(math.log(X) / math.log(2)) + 1
        ps = rs_power_sums(rep, kmax, small)
        for row, i in enumerate(small):
            nrm = int(rep.norms[i])
            q, k = nrm * nrm, 2
            while q <= X:
                vm[q] += ps[row, k - 1] * math.log(nrm)
                q *= nrm
                k += 1
    return vm, vm_prime


def multiplicative_by_norm(
    rep: Representation,
    X: float,
    divisible_by: Sequence[int] = (),
    exclude_norm_upto: float = 0.0,
) -> np.ndarray:
    """Norm-aggregated coefficients of a modified L(s, pi x pi~).

    For ideals listed in ``divisible_by`` the local factor L_p is replaced by
    L_p - 1 (so only multiples of that ideal survive); ideals of norm at most
    ``exclude_norm_upto`` get the trivial factor 1 (sifting).
    """
    X = _require(rep, X)
    out = np.ones(X + 1)
    out[0] = 0.0
    if X < 2:
        return out
    sel = np.flatnonzero(rep.norms <= X)
    special = set(int(i) for i in divisible_by)
    for i in special:
        if rep.norms[i] > X:
            out[1:] = 0.0
            return out

    norms = rep.norms[sel]
    primes = rep.primes[sel]
    keep = norms > exclude_norm_upto
    p1 = rs_power_sums(rep, 1, sel)[:, 0]
    h1 = np.where(keep, p1, 0.0)

    # primes whose local polynomial has degree 1 in u = p^-s and no divisibility constraint
    sqrt_x = math.isqrt(X)
    is_large = (primes > sqrt_x) & (rep.degrees[sel] == 1)
    special_primes = {int(rep.primes[i]) for i in special}
    large_mask = is_large & ~np.isin(primes, list(special_primes))
    large_primes, inv = np.unique(primes[large_mask], return_inverse=True)
    coef = np.zeros(large_primes.size)
    np.add.at(coef, inv, h1[large_mask])
    for p, c in zip(large_primes.tolist(), coef.tolist()):
        if c != 1.0:
            out[p::p] *= c

    # remaining rational primes: full local polynomial
    rest = sel[~large_mask]
    by_prime: dict[int, list[int]] = {}
    for i in rest.tolist():
        by_prime.setdefault(int(rep.primes[i]), []).append(i)
    for p, ideals in by_prime.items():
        K = 0
        while p ** (K + 1) <= X:
            K += 1
        poly = np.zeros(K + 1)
        poly[0] = 1.0
        for i in ideals:
            f = int(rep.degrees[i])
            kk = K // f
            local = np.zeros(K + 1)
            if rep.norms[i] <= exclude_norm_upto or kk == 0:
                local[0] = 1.0
            else:
                ps = rs_power_sums(rep, kk, np.array([i]))[0]
                h = _realify(newton_h(ps.astype(complex)))
                local[0 : f * kk + 1 : f] = h
            if i in special:
                local[0] = 0.0
            poly = np.convolve(poly, local)[: K + 1]
        _apply_local(out, p, poly, X)
    return out


def _apply_local(out: np.ndarray, p: int, poly: np.ndarray, X: int) -> None:
    """Multiply out[m] by poly[v_p(m)] for every 1 <= m <= X."""
    K = poly.size - 1
    count = X // p
    factor = np.full(count, poly[1] if K >= 1 else 0.0)
    step = 1
    for k in range(2, K + 1):
        step *= p
        factor[step - 1 :: step] = poly[k]
    if poly[0] == 1.0:
        out[p::p] *= factor
        return
    kept = out[p::p].copy()
    out[1:] *= poly[0]
    out[p::p] = kept * factor


@functools.lru_cache(maxsize=8)
def _full_stream(rep: Representation) -> CoeffStream:
    X = rep.cutoff
    vm, vm_prime = vonmangoldt_by_norm(rep, X)
    lam = multiplicative_by_norm(rep, X)
    return CoeffStream(X, lam, vm, vm_prime)


def coeff_stream(rep: Representation, X: float | None = None) -> CoeffStream:
    """Coefficient stream of ``rep``, built once to the instance cutoff and memoised.

    Raises StreamTooShort when X exceeds the cutoff.
    """
    if X is not None:
        _require(rep, X)
    return _full_stream(rep)
