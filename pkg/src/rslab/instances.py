"""Curated representations and their arithmetic substrate.

Instances are built from CLI-style spec strings::

    zeta
    dirichlet:<q>:<index>     index = rank among primitive characters mod q,
                              ordered by Conrey label (1-based)
    dedekind:<d>              trivial GL(1) over Q(sqrt d); "8" means Q(sqrt 2)
    holomorphic:<k>           level-one eigenform of weight k
"""

from __future__ import annotations

import cmath
import csv
import functools
import io
import math
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import numpy as np

from .errors import BadSpec, UnsupportedField
from .lfunc_core import FieldDescriptor, Representation, theta_n
from .modular import WEIGHTS, hecke_table, primes_up_to, tau_expansion

__all__ = [
    "PrimeIdealTable",
    "enumerate_prime_ideals",
    "ideal_count",
    "prime_divisor_count_check",
    "DirichletCharacter",
    "primitive_characters",
    "make_instance",
    "instance_for",
    "parse_spec",
    "tau_expansion",
    "primes_up_to",
]

MAX_MODULUS = 100
# d = 8 names the field of discriminant 8
_DEDEKIND_ALIASES = {8: 2}


# ---------------------------------------------------------------------------
# prime ideals


@dataclass(frozen=True)
class PrimeIdealTable:
    field: FieldDescriptor
    cutoff: int
    norms: np.ndarray
    degrees: np.ndarray
    ramified: np.ndarray
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.norms.size)

    def rows(self) -> list[tuple[int, int, bool, int]]:
        return list(
            zip(
                self.norms.tolist(),
                self.degrees.tolist(),
                self.ramified.tolist(),
                self.primes.tolist(),
            )
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["norm", "degree", "ramified", "p"])
        for nrm, deg, ram, p in self.rows():
            w.writerow([nrm, deg, int(ram), p])
        return buf.getvalue()


def _min_poly(d: int) -> tuple[int, int]:
    """Coefficients (b, c) of the minimal polynomial x^2 + b x + c of the ring of integers."""
    if d % 4 == 1:
        return -1, -(d - 1) // 4
    return 0, -d


def _roots_mod_p(d: int, p: int) -> int:
    b, c = _min_poly(d)
    if p == 2:
        return sum(1 for x in range(2) if (x * x + b * x + c) % 2 == 0)
    disc = (b * b - 4 * c) % p
    if disc == 0:
        return 1
    return 2 if pow(disc, (p - 1) // 2, p) == 1 else 0


def splitting_type(field: FieldDescriptor, p: int) -> str:
    if field.kind == "rationals":
        return "split1"
    if field.discriminant % p == 0:
        return "ramified"
    return "split" if _roots_mod_p(field.d, p) == 2 else "inert"


@functools.lru_cache(maxsize=8)
def enumerate_prime_ideals(field: FieldDescriptor, X: int) -> PrimeIdealTable:
    """All prime ideals of norm <= X, sorted by norm (ties keep the two split ideals adjacent)."""
    if field.kind not in ("rationals", "quadratic"):
        raise UnsupportedField(field.kind)
    X = int(X)
    ps = primes_up_to(X)
    rows: list[tuple[int, int, bool, int]] = []
    if field.kind == "rationals":
        ones = np.ones(ps.size, dtype=np.int64)
        return _frozen_table(field, X, ps, ones, np.zeros(ps.size, bool), ps)
    else:
        for p in ps.tolist():
            kind = splitting_type(field, p)
            if kind == "ramified":
                rows.append((p, 1, True, p))
            elif kind == "split":
                rows.extend([(p, 1, False, p), (p, 1, False, p)])
            elif p * p <= X:
                rows.append((p * p, 2, False, p))
        rows.sort(key=lambda r: r[0])
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    return _frozen_table(field, X, arr[:, 0], arr[:, 1], arr[:, 2].astype(bool), arr[:, 3])


def _frozen_table(field, X, norms, degrees, ramified, primes) -> PrimeIdealTable:
    # tables are memoized and shared between instances, so their arrays are read-only
    cols = [np.array(c) for c in (norms, degrees, ramified, primes)]
    for c in cols:
        c.flags.writeable = False
    return PrimeIdealTable(field, X, *cols)


def kronecker_character(field: FieldDescriptor):
    """n -> (D_F / n) for a quadratic field; the trivial character for Q."""
    if field.kind == "rationals":
        return lambda n: 1
    D = field.discriminant if field.d > 0 else -field.discriminant
    return lambda n: int(gmpy2.kronecker(D, n))


@dataclass(frozen=True)
class IdealCountReport:
    z: float
    eps: float
    count: int
    bound: float
    passed: bool


def ideal_count(field: FieldDescriptor, z: float, eps: float) -> IdealCountReport:
    """Number of integral ideals of norm <= z against (2/eps)^[F:Q] z^(1+eps)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if field.kind not in ("rationals", "quadratic"):
        raise UnsupportedField(field.kind)
    Z = int(math.floor(z)) if z >= 1 else 0
    if field.kind == "rationals":
        count = Z
    else:
        chi = kronecker_character(field)
        # ideals of norm m are counted by sum_{d | m} chi(d)
        count = sum(chi(d) * (Z // d) for d in range(1, Z + 1))
    bound = (2.0 / eps) ** field.degree * max(z, 0.0) ** (1 + eps)
    return IdealCountReport(float(z), eps, count, bound, count <= bound)


@dataclass(frozen=True)
class PrimeDivisorReport:
    omega: int
    log_norm: float
    bound: float
    passed: bool


def prime_divisor_count_check(
    norms: Sequence[int], eps: float, field_degree: int = 1
) -> PrimeDivisorReport:
    """omega(d) <= 6 e^(2/eps) [F:Q] + eps log N(d) for d the product of the given distinct primes."""
    log_norm = math.fsum(math.log(n) for n in norms)
    bound = 6 * math.exp(2 / eps) * field_degree + eps * log_norm
    omega = len(norms)
    return PrimeDivisorReport(omega, log_norm, bound, omega <= bound)


# ---------------------------------------------------------------------------
# Dirichlet characters


def _factor(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int) -> int:
    """Least g that is a primitive root modulo p^2 (hence modulo every p^e)."""
    phi = p * (p - 1)
    fac = [q for q, _ in _factor(phi)]
    for g in range(2, p * p):
        if g % p and all(pow(g, phi // q, p * p) != 1 for q in fac):
            return g
    raise ValueError(p)


@functools.lru_cache(maxsize=None)
def _log_table(p: int, e: int) -> dict[int, tuple]:
    """Coordinates of every unit of (Z/p^e)^x with respect to the Conrey generators."""
    pe = p**e
    if p == 2:
        if e == 1:
            return {1: ()}
        table = {}
        x = 1
        for b in range(max(pe // 4, 1)):
            table[x] = (0, b)
            table[(-x) % pe] = (1, b)
            x = x * 5 % pe
        return table
    g = _primitive_root(p)
    table, x = {}, 1
    for k in range(pe - pe // p):
        table[x] = (k,)
        x = x * g % pe
    return table


def _local_log(p: int, e: int, m: int) -> tuple:
    return _log_table(p, e)[m % p**e]


def _local_value(p: int, e: int, m: int, n: int) -> complex:
    pe = p**e
    if n % p == 0:
        return 0j
    if p == 2:
        if e == 1:
            return 1 + 0j
        am, bm = _local_log(2, e, m)
        an, bn = _local_log(2, e, n)
        frac = am * an / 2 + (bm * bn / 2 ** (e - 2) if e >= 3 else 0.0)
    else:
        (km,) = _local_log(p, e, m)
        (kn,) = _local_log(p, e, n)
        frac = km * kn / (pe - pe // p)
    return cmath.exp(2j * math.pi * frac)


@dataclass(frozen=True)
class DirichletCharacter:
    """The Conrey character chi_q(label, .), stored as its value table mod q."""

    modulus: int
    label: int
    values: tuple[complex, ...]

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    @property
    def is_even(self) -> bool:
        return abs(self(-1) - 1) < 1e-9

    @property
    def is_real(self) -> bool:
        return all(abs(v.imag) < 1e-12 for v in self.values)

    def is_primitive(self) -> bool:
        q = self.modulus
        for d in range(1, q):
            if q % d:
                continue
            # chi induced from modulus d iff trivial on units congruent to 1 mod d
            if all(
                abs(self(a) - 1) < 1e-9
                for a in range(1, q, d)
                if math.gcd(a, q) == 1
            ):
                return False
        return True


@functools.lru_cache(maxsize=None)
def conrey_character(q: int, m: int) -> DirichletCharacter:
    if q < 1 or math.gcd(m, q) != 1:
        raise BadSpec(f"Conrey label {m} must be a unit mod {q}")
    fac = _factor(q)
    values = []
    for n in range(q):
        v = 1 + 0j
        if math.gcd(n, q) != 1:
            v = 0j
        else:
            for p, e in fac:
                v *= _local_value(p, e, m % p**e, n % p**e)
        # snap to exact roots of unity on the real axis
        if abs(v.imag) < 1e-13:
            v = complex(round(v.real, 12), 0.0)
        values.append(v)
    return DirichletCharacter(q, m % q if q > 1 else 1, tuple(values))


@functools.lru_cache(maxsize=None)
def primitive_characters(q: int) -> tuple[DirichletCharacter, ...]:
    labels = [m for m in range(1, q + 1) if math.gcd(m, q) == 1] if q > 1 else [1]
    chars = [conrey_character(q, m) for m in labels]
    return tuple(c for c in chars if c.is_primitive())


# ---------------------------------------------------------------------------
# quadratic-field residues


def quadratic_residue_kappa(d: int) -> float:
    """L(1, chi_D) from the finite class-number-formula sums."""
    fd = FieldDescriptor.quadratic(d)
    chi = kronecker_character(fd)
    D = fd.discriminant
    if d < 0:
        return -math.pi / D**1.5 * math.fsum(chi(a) * a for a in range(1, D))
    return -1 / math.sqrt(D) * math.fsum(chi(a) * math.log(math.sin(math.pi * a / D)) for a in range(1, D))


# closed forms from the class number formula for the curated fields
CURATED_KAPPA = {
    -1: math.pi / 4,
    -3: math.pi / (3 * math.sqrt(3)),
    5: 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5),
    2: 2 * math.log(1 + math.sqrt(2)) / math.sqrt(8),
}


CURATED_FIELDS = (-1, -3, 5, 8)


def curated_specs(max_modulus: int = 100) -> list[str]:
    """Every curated instance: zeta, primitive characters mod q <= max_modulus, four quadratic fields
    and the level-one eigenforms."""
    out = ["zeta"]
    for q in range(1, max_modulus + 1):
        out += [f"dirichlet:{q}:{i}" for i in range(1, len(primitive_characters(q)) + 1)]
    out += [f"dedekind:{d}" for d in CURATED_FIELDS]
    out += [f"holomorphic:{k}" for k in WEIGHTS]
    return out


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    args: tuple[int, ...]

    @property
    def label(self) -> str:
        return ":".join([self.family, *map(str, self.args)])


def parse_spec(spec: str) -> InstanceSpec:
    parts = spec.strip().lower().split(":")
    fam, raw = parts[0], parts[1:]
    try:
        args = tuple(int(a) for a in raw)
    except ValueError:
        raise BadSpec(f"non-integer argument in {spec!r}") from None
    if fam == "zeta" and not args:
        return InstanceSpec("zeta", ())
    if fam == "dirichlet" and len(args) == 2:
        q, idx = args
        if not 1 <= q <= MAX_MODULUS:
            raise BadSpec(f"modulus {q} outside the curated range 1..{MAX_MODULUS}")
        chars = primitive_characters(q)
        if not 1 <= idx <= len(chars):
            raise BadSpec(f"mod {q} has {len(chars)} primitive characters; index {idx} invalid")
        return InstanceSpec("dirichlet", (q, idx))
    if fam in ("dedekind", "dedekind_quadratic") and len(args) == 1:
        d = _DEDEKIND_ALIASES.get(args[0], args[0])
        try:
            FieldDescriptor.quadratic(d)
        except UnsupportedField as exc:
            raise BadSpec(str(exc)) from None
        return InstanceSpec("dedekind", (d,))
    if fam == "holomorphic" and len(args) == 1:
        if args[0] not in WEIGHTS:
            raise BadSpec(f"weight {args[0]} not in {WEIGHTS}")
        return InstanceSpec("holomorphic", args)
    raise BadSpec(
        f"cannot parse instance {spec!r}; expected zeta, dirichlet:q:i, dedekind:d or holomorphic:k"
    )


def _gl1_rep(label, field, conductor, arch, table, alphas, ramified, kappa, meta):
    return Representation(
        label=label,
        n=1,
        field=field,
        conductor=conductor,
        arch=arch,
        norms=table.norms,
        degrees=table.degrees,
        ramified=ramified,
        primes=table.primes,
        alphas=np.asarray(alphas, dtype=complex).reshape(-1, 1),
        cutoff=table.cutoff,
        rs_conductor=1,
        kappa=kappa,
        meta=meta,
    )


def _build(spec: InstanceSpec, cutoff: int) -> Representation:
    Q = FieldDescriptor.rationals()
    if spec.family == "zeta":
        t = enumerate_prime_ideals(Q, cutoff)
        return _gl1_rep(
            "zeta", Q, 1, ((0j,),), t, np.ones(len(t)), np.zeros(len(t), bool), 1.0, {}
        )
    if spec.family == "dirichlet":
        q, idx = spec.args
        chi = primitive_characters(q)[idx - 1]
        t = enumerate_prime_ideals(Q, cutoff)
        alphas = np.asarray(chi.values, dtype=complex)[t.primes % q]
        ram = (q % t.primes) == 0 if q > 1 else np.zeros(len(t), bool)
        mu = 0j if chi.is_even else 1 + 0j
        kappa = math.prod(1 - 1 / p for p, _ in _factor(q)) if q > 1 else 1.0
        meta = {"conrey_label": chi.label, "parity": "even" if chi.is_even else "odd"}
        return _gl1_rep(spec.label, Q, q, ((mu,),), t, alphas, ram, kappa, meta)
    if spec.family == "dedekind":
        (d,) = spec.args
        fd = FieldDescriptor.quadratic(d)
        t = enumerate_prime_ideals(fd, cutoff)
        arch = tuple((0j,) for _ in fd.places)
        kappa = CURATED_KAPPA.get(d) or quadratic_residue_kappa(d)
        meta = {"discriminant": fd.discriminant}
        return _gl1_rep(
            spec.label, fd, 1, arch, t, np.ones(len(t)), np.zeros(len(t), bool), kappa, meta
        )
    (k,) = spec.args
    table = hecke_table(k, cutoff)
    lam = np.clip(table.lam, -2.0, 2.0)
    alpha = (lam + 1j * np.sqrt(np.maximum(4.0 - lam * lam, 0.0))) / 2
    alphas = np.stack([alpha, alpha.conj()], axis=1)
    primes = table.primes.astype(np.int64)
    m = primes.size
    return Representation(
        label=spec.label,
        n=2,
        field=Q,
        conductor=1,
        arch=(((k - 1) / 2 + 0j, (k + 1) / 2 + 0j),),
        norms=primes,
        degrees=np.ones(m, dtype=np.int64),
        ramified=np.zeros(m, dtype=bool),
        primes=primes,
        alphas=alphas,
        cutoff=int(cutoff),
        rs_conductor=1,
        kappa=None,
        meta={"weight": k, "lambda": table.lam},
    )


@functools.lru_cache(maxsize=16)
def make_instance(spec: str, cutoff: int = 10**5) -> Representation:
    """Representation for a spec string with Satake data at every prime ideal of norm <= cutoff."""
    parsed = parse_spec(spec)
    cutoff = int(cutoff)
    if cutoff < 2:
        raise BadSpec("cutoff must be at least 2")
    return _build(parsed, cutoff)


_CUTOFF_STEPS = (10**3, 10**4, 10**5, 10**6, 2_720_000, 3 * 10**6)


def instance_for(spec: str, X: float) -> Representation:
    """Instance built to the smallest standard cutoff covering X (keeps the cache small)."""
    need = int(math.floor(X))
    for step in _CUTOFF_STEPS:
        if step >= need:
            return make_instance(spec, step)
    return make_instance(spec, need)


def lrs_ok(rep: Representation, tol: float = 1e-9) -> bool:
    """Every Satake parameter within N(p)^theta_n."""
    bound = rep.norms.astype(float) ** theta_n(rep.n)
    return bool(np.all(np.abs(rep.alphas) <= bound[:, None] + tol))
