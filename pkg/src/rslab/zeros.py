"""Zero sets, the zeta zero finder, and zero statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CountMismatch, DegenerateRegion, ExhaustedRange, IncompleteSet
from .lfunc_core import Representation, rs_analytic_conductor
from .parallel import ordered_map
from .zeta import hardy_z, zero_counting_function

MAX_HEIGHT = 500.0
SCAN_STEP = 0.01
BISECT_TOL = 1e-9
_CHUNK = 2000


@dataclass(frozen=True)
class Zero:
    beta: float
    gamma: float
    multiplicity: int = 1
    source: str = ""

    @property
    def rho(self) -> complex:
        return complex(self.beta, self.gamma)


@dataclass(frozen=True)
class ZeroSet:
    """gamma-sorted zeros, closed under conjugation.

    ``complete`` certifies that every zero with |gamma| <= T_max is present;
    ``beta1`` marks a real exceptional zero, excluded from all counts.
    """

    zeros: tuple[Zero, ...]
    T_max: float
    complete: bool = False
    beta1: float | None = None

    def __post_init__(self):
        ordered = tuple(sorted(self.zeros, key=lambda z: (z.gamma, z.beta)))
        object.__setattr__(self, "zeros", ordered)
        for z in ordered:
            if abs(z.gamma) > self.T_max + 1e-12:
                raise ValueError(f"zero at height {z.gamma} exceeds T_max={self.T_max}")
            if z.multiplicity < 1:
                raise ValueError("multiplicity must be >= 1")
        if not self.is_conjugate_closed():
            raise ValueError("zero set is not closed under conjugation")

    @classmethod
    def from_upper(
        cls,
        points: Iterable[tuple[float, float]],
        T_max: float,
        complete: bool = False,
        source: str = "",
        beta1: float | None = None,
    ) -> ZeroSet:
        """Build from zeros with gamma >= 0; conjugates are added."""
        zs = []
        for beta, gamma in points:
            zs.append(Zero(float(beta), float(gamma), 1, source))
            if gamma != 0:
                zs.append(Zero(float(beta), -float(gamma), 1, source))
        if beta1 is not None:
            zs.append(Zero(float(beta1), 0.0, 1, "exceptional"))
        return cls(tuple(zs), float(T_max), complete, beta1)

    def is_conjugate_closed(self, tol: float = 1e-12) -> bool:
        up = sorted((z.beta, z.gamma, z.multiplicity) for z in self.zeros if z.gamma > 0)
        down = sorted((z.beta, -z.gamma, z.multiplicity) for z in self.zeros if z.gamma < 0)
        if len(up) != len(down):
            return False
        return all(
            abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol and a[2] == b[2]
            for a, b in zip(up, down)
        )

    def __len__(self) -> int:
        return len(self.zeros)

    def is_exceptional(self, z: Zero) -> bool:
        return self.beta1 is not None and z.gamma == 0 and z.beta == self.beta1

    def nonexceptional(self) -> list[Zero]:
        out, skipped = [], False
        for z in self.zeros:
            if not skipped and self.is_exceptional(z):
                skipped = True
                continue
            out.append(z)
        return out

    def upto(self, T: float) -> ZeroSet:
        if T > self.T_max:
            raise ValueError(f"T={T} exceeds T_max={self.T_max}")
        keep = tuple(z for z in self.zeros if abs(z.gamma) <= T)
        return ZeroSet(keep, float(T), self.complete, self.beta1)

    def with_exceptional(self, beta1: float) -> ZeroSet:
        zs = tuple(z for z in self.zeros if not self.is_exceptional(z))
        return ZeroSet(zs + (Zero(float(beta1), 0.0, 1, "exceptional"),), self.T_max, self.complete, beta1)

    def with_zeros(self, extra: Sequence[tuple[float, float]], source: str = "synthetic") -> ZeroSet:
        """Add zeros (with conjugates); used to plant test zeros."""
        add = []
        for beta, gamma in extra:
            add.append(Zero(beta, gamma, 1, source))
            if gamma != 0:
                add.append(Zero(beta, -gamma, 1, source))
        T = max([self.T_max] + [abs(g) for _, g in extra])
        return ZeroSet(self.zeros + tuple(add), T, self.complete, self.beta1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["beta", "gamma", "multiplicity", "source"])
        for z in self.zeros:
            w.writerow([repr(z.beta), repr(z.gamma), z.multiplicity, z.source])
        return buf.getvalue()

    @classmethod
    def from_csv(
        cls, text: str, T_max: float | None = None, complete: bool = False, beta1: float | None = None
    ) -> ZeroSet:
        """Load the (beta, gamma, multiplicity, source) schema.

        Files listing only gamma >= 0 are closed under conjugation on load.
        """
        rows = list(csv.DictReader(io.StringIO(text)))
        zs = [
            Zero(float(r["beta"]), float(r["gamma"]), int(r.get("multiplicity") or 1), r.get("source") or "file")
            for r in rows
        ]
        if not any(z.gamma < 0 for z in zs):
            zs += [replace(z, gamma=-z.gamma) for z in zs if z.gamma > 0]
        height = max([abs(z.gamma) for z in zs], default=0.0)
        return cls(tuple(zs), float(T_max if T_max is not None else height), complete, beta1)


# ---------------------------------------------------------------------------
# zeta zero finder


def _scan(T_max: float, step: float) -> list[float]:
    grid = np.arange(0.0, T_max, step)
    if grid.size == 0 or grid[-1] < T_max:
        grid = np.append(grid, T_max)
    spans = [(i, min(i + _CHUNK, grid.size)) for i in range(0, grid.size, _CHUNK)]
    values = np.concatenate(ordered_map(lambda s: hardy_z(grid[s[0] : s[1]]), spans))
    exact = np.flatnonzero(values == 0.0)
    sign = np.sign(values)
    idx = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    zlo = values[idx].copy()
    if lo.size:
        while float(np.max(hi - lo)) > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            zm = hardy_z(mid)
            left = np.sign(zm) == np.sign(zlo)
            lo = np.where(left, mid, lo)
            zlo = np.where(left, zm, zlo)
            hi = np.where(left, hi, mid)
    found = (0.5 * (lo + hi)).tolist() + grid[exact].tolist()
    return sorted(g for g in found if 0 < g <= T_max)


def find_zeta_zeros(T_max: float, step: float = SCAN_STEP) -> ZeroSet:
    """Zeros of zeta with 0 < gamma <= T_max from sign changes of Hardy's Z.

    The count is certified against the argument-principle value of N(T_max);
    a mismatch triggers one rescan at step/10 before CountMismatch.
    """
    if not 0 <= T_max <= MAX_HEIGHT:
        raise ValueError(f"T_max must lie in [0, {MAX_HEIGHT}]")
    expected = round(zero_counting_function(T_max))
    gammas = _scan(T_max, step) if T_max > 0 else []
    if len(gammas) != expected:
        gammas = _scan(T_max, step / 10)
        if len(gammas) != expected:
            raise CountMismatch(f"found {len(gammas)} zeros up to {T_max}, expected {expected}")
    return ZeroSet.from_upper([(0.5, g) for g in gammas], T_max, complete=True, source="zeta-scan")


# ---------------------------------------------------------------------------
# counts and density


def _require_complete(zs: ZeroSet, T: float) -> None:
    if not zs.complete:
        raise IncompleteSet("zero set is not certified complete")
    if T > zs.T_max:
        raise ValueError(f"T={T} exceeds T_max={zs.T_max}")


def zero_count(zs: ZeroSet, sigma: float, T: float) -> int:
    """N(sigma, T): zeros other than beta1 with beta >= sigma and |gamma| <= T, with multiplicity."""
    if not zs.zeros:
        return 0
    _require_complete(zs, T)
    return sum(z.multiplicity for z in zs.nonexceptional() if z.beta >= sigma and abs(z.gamma) <= T)


@dataclass(frozen=True)
class DensityRow:
    sigma: float
    count: int
    log_bound: float
    passed: bool

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound < 700 else math.inf


def density_bound_compare(
    zs: ZeroSet, rep: Representation, T: float, sigmas: Sequence[float], A: float = 1e7
) -> list[DensityRow]:
    """N(sigma, T) against n^2 [F:Q] (C(pi x pi~) T^[F:Q])^(A n^2 (1 - sigma)), compared in log space."""
    n2, dF = rep.n**2, rep.field.degree
    logC = math.log(rs_analytic_conductor(rep)) + dF * math.log(T)
    rows = []
    for s in sigmas:
        count = zero_count(zs, s, T)
        log_bound = math.log(n2 * dF) + A * n2 * (1 - s) * logC
        ok = count == 0 or math.log(count) <= log_bound
        rows.append(DensityRow(float(s), count, log_bound, ok))
    return rows


@dataclass(frozen=True)
class CountingCheck:
    T: float
    count: int
    main: float
    diff: float


def riemann_von_mangoldt_main(T: float) -> float:
    """(T/2pi) log(T/2pi) - T/2pi + 7/8, clipped at 0."""
    if T <= 0:
        return 0.0
    u = T / (2 * math.pi)
    return max(u * math.log(u) - u + 7 / 8, 0.0)


def counting_formula_check(zs: ZeroSet, T: float) -> CountingCheck:
    if T > zs.T_max:
        raise ValueError(f"T={T} exceeds T_max={zs.T_max}")
    count = sum(z.multiplicity for z in zs.nonexceptional() if 0 < z.gamma <= T)
    main = riemann_von_mangoldt_main(T)
    return CountingCheck(float(T), count, main, abs(count - main))


# ---------------------------------------------------------------------------
# regions


def log_conductor_height(rep: Representation, gamma: float) -> float:
    """log(C(pi x pi~) (|gamma| + e)^(n^2 [F:Q]))."""
    return math.log(rs_analytic_conductor(rep)) + rep.n**2 * rep.field.degree * math.log(
        abs(gamma) + math.e
    )


def zfr_boundary(rep: Representation, gamma: float, c1: float = 0.05) -> float:
    return 1 - c1 / log_conductor_height(rep, gamma)


@dataclass(frozen=True)
class RegionViolation:
    zero: Zero
    boundary: float


def zfr_check(zs: ZeroSet, rep: Representation, c1: float = 0.05) -> list[RegionViolation]:
    """Zeros other than beta1 lying in Re(s) >= 1 - c1 / log(C (|Im s| + e)^(n^2 [F:Q]))."""
    out = []
    for z in zs.nonexceptional():
        b = zfr_boundary(rep, z.gamma, c1)
        if z.beta >= b:
            out.append(RegionViolation(z, b))
    return out


def repulsion_boundary(
    rep: Representation, gamma: float, beta1: float, c4: float = 1.0, c5: float = 0.1
) -> float:
    """1 - c5 log(c4 / ((1 - beta1) L)) / L with L = log(C (|gamma| + e)^(n^2 [F:Q])).

    Heights where the log argument is <= 1 impose no constraint (boundary 1).
    """
    L = log_conductor_height(rep, gamma)
    arg = c4 / ((1 - beta1) * L)
    if arg <= 1:
        return 1.0
    return 1 - c5 * math.log(arg) / L


def repulsion_region_check(
    zs: ZeroSet, rep: Representation, beta1: float, c4: float = 1.0, c5: float = 0.1
) -> list[RegionViolation]:
    """Zeros other than beta1 inside the region widened by an exceptional zero at beta1."""
    if not 0 < beta1 < 1:
        raise ValueError("beta1 must lie in (0, 1)")
    L0 = log_conductor_height(rep, 0.0)
    if c4 / ((1 - beta1) * L0) <= 1:
        raise DegenerateRegion(
            f"log argument c4/((1-beta1)L) = {c4 / ((1 - beta1) * L0):.4g} <= 1; region is empty"
        )
    out = []
    for z in zs.nonexceptional():
        if z.gamma == 0 and z.beta == beta1:
            continue
        b = repulsion_boundary(rep, z.gamma, beta1, c4, c5)
        if z.beta >= b:
            out.append(RegionViolation(z, b))
    return out


@dataclass(frozen=True)
class SiegelCheck:
    beta1: float
    threshold: float
    passed: bool


def siegel_bound_check(
    rep: Representation, beta1: float, c: float = 3.0, conductor: float | None = None
) -> SiegelCheck:
    """beta1 <= 1 - C(pi x pi~)^(-c)."""
    if not 0 < beta1 < 1 or c <= 0:
        raise ValueError("need 0 < beta1 < 1 and c > 0")
    C = rs_analytic_conductor(rep) if conductor is None else conductor
    threshold = 1 - C ** (-c)
    return SiegelCheck(beta1, threshold, beta1 <= threshold)


# ---------------------------------------------------------------------------
# power sums


@dataclass(frozen=True)
class PowerSumConfig:
    beta1: float
    beta_p: float
    gamma_p: float
    z: np.ndarray
    L: float
    js: list[int] = field(default_factory=list)
    sums: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    c_implied: float = 0.0
    witness: int | None = None

    @property
    def z1(self) -> complex:
        return complex(self.z[0])


def build_z_list(zs: ZeroSet, gamma_p: float) -> np.ndarray:
    """{(2 - w)^-2, (2 + i gamma' - w)^-2 : w != beta1}, sorted by modulus descending."""
    omegas = []
    for z in zs.nonexceptional():
        omegas.extend([z.rho] * z.multiplicity)
    w = np.array(omegas, dtype=complex)
    vals = np.concatenate([(2 - w) ** -2.0, (2 + 1j * gamma_p - w) ** -2.0])
    order = np.lexsort((np.angle(vals), -np.abs(vals)))
    return vals[order]


def turan_witness(z: Sequence[complex], L_bound: float | None = None) -> int:
    """Smallest j1 <= 24 L with 8 sum Re(z_n^j1) >= |z_1|^j1, L = |z_1|^-1 sum |z_n|.

    ``z`` must be sorted by modulus, largest first.
    """
    z = np.asarray(z, dtype=complex)
    if z.size == 0:
        raise ValueError("empty z list")
    a1 = abs(z[0])
    if np.any(np.abs(z) > a1 * (1 + 1e-12)):
        raise ValueError("z_1 must have the largest modulus")
    L = float(np.abs(z).sum() / a1) if L_bound is None else L_bound
    jmax = int(math.floor(24 * L))
    # normalise by |z_1| so high powers stay representable
    u = z / a1
    cur = np.ones_like(u)
    for j in range(1, jmax + 1):
        cur = cur * u
        if 8 * math.fsum(cur.real.tolist()) >= 1.0:
            return j
    raise ExhaustedRange(f"no witness j <= 24L = {24 * L:.3f}")


def power_sum_experiment(
    zs: ZeroSet, beta1: float, beta_p: float, gamma_p: float, j_max: int
) -> PowerSumConfig:
    """Trace of sum Re(z_n^j) for j = 0..j_max next to the exact middle term of the upper bound."""
    if not any(abs(z.beta - beta_p) < 1e-6 and abs(z.gamma - gamma_p) < 1e-6 for z in zs.zeros):
        raise ValueError(f"{beta_p}+{gamma_p}i is not in the zero set")
    z = build_z_list(zs, gamma_p)
    L = float(np.abs(z).sum() / abs(z[0]))
    js, sums, upper = [], [], []
    c = 0.0
    for j in range(0, j_max + 1):
        js.append(j)
        sums.append(math.fsum((z**j).real.tolist()))
        if j == 0:
            upper.append(math.nan)
            continue
        mid = (
            1
            - (2 - beta1) ** (-2 * j)
            + ((1 + 1j * gamma_p) ** (-2 * j) - (2 - beta1 + 1j * gamma_p) ** (-2 * j)).real
        )
        upper.append(mid)
        c = max(c, mid / (j * (1 - beta1)))
    try:
        witness = turan_witness(z)
    except ExhaustedRange:
        witness = None
    return PowerSumConfig(beta1, beta_p, gamma_p, z, L, js, sums, upper, c, witness)


def seeded_configurations(
    base: ZeroSet, count: int, seed: int, max_synthetic: int = 3
) -> Iterator[tuple[ZeroSet, float, float, float]]:
    """Random (zero set, beta1, beta', gamma') draws built from a truncation of ``base``.

    Each draw keeps the zeros of ``base`` below a random height, adds up to
    ``max_synthetic`` synthetic zeros off the line and a synthetic beta1, and
    picks rho' among the resulting non-real zeros.
    """
    rng = np.random.default_rng(seed)
    upper = [(z.beta, z.gamma) for z in base.nonexceptional() if z.gamma > 0]
    lo = min(20.0, base.T_max)
    for _ in range(count):
        height = float(rng.uniform(lo, base.T_max))
        pts = [p for p in upper if p[1] <= height]
        m = int(rng.integers(0, max_synthetic + 1))
        pts += [(float(rng.uniform(0.5, 0.99)), float(rng.uniform(1.0, height))) for _ in range(m)]
        if not pts:
            pts = [(0.5, height)]
        beta1 = float(rng.uniform(0.9, 0.999))
        zs = ZeroSet.from_upper(pts, height, source="seeded", beta1=beta1)
        beta_p, gamma_p = pts[int(rng.integers(len(pts)))]
        yield zs, beta1, beta_p, gamma_p
