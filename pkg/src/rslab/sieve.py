"""Selberg-sieve apparatus: smooth weight, local densities, sieve and Brun-Titchmarsh checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import KappaUnavailable
from .lfunc_core import (
    Representation,
    _require,
    coeff_stream,
    multiplicative_by_norm,
    norm_sum,
    rs_analytic_conductor,
)

# ---------------------------------------------------------------------------
# smooth weight


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, S(u) + S(1-u) = 1."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1 - u, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class SmoothWeight:
    """Phi = 1 on [0, 1], smooth ramps of width ``ramp`` on each side, support [-ramp, 1 + ramp].

    S(u) + S(1-u) = 1 makes each ramp contribute ramp/2, so the area is 1 + ramp.
    """

    ramp: float = 0.75
    epsabs: float = 1e-12

    def __post_init__(self):
        if not 0 < self.ramp < 1:
            raise ValueError("ramp must lie in (0, 1) to keep the support inside (-2, 2)")

    @property
    def support(self) -> tuple[float, float]:
        return (-self.ramp, 1 + self.ramp)

    @property
    def area(self) -> float:
        return 1 + self.ramp

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        w = self.ramp
        left = _smoothstep((y + w) / w)
        right = _smoothstep((1 + w - y) / w)
        return np.where(y < 0, left, np.where(y > 1, right, 1.0))

    def check(self, s: complex) -> complex:
        """Phi-check(s) = integral of Phi(y) e^(s y) dy: closed form on the plateau, quadrature on the ramps."""
        s = complex(s)
        plateau = complex(1.0) if s == 0 else np.expm1(s) / s
        total = complex(plateau)
        for a, b in ((-self.ramp, 0.0), (1.0, 1.0 + self.ramp)):
            re = quad(lambda y: float(self(y)) * (np.exp(s.real * y) * math.cos(s.imag * y)), a, b,
                      epsabs=self.epsabs, epsrel=1e-12, limit=400)[0]
            im = quad(lambda y: float(self(y)) * (np.exp(s.real * y) * math.sin(s.imag * y)), a, b,
                      epsabs=self.epsabs, epsrel=1e-12, limit=400)[0]
            total += complex(re, im)
        return total


DEFAULT_WEIGHT = SmoothWeight()


def phi_check(s: complex, weight: SmoothWeight = DEFAULT_WEIGHT) -> complex:
    return weight.check(s)


def decay_constant(s: complex, weight: SmoothWeight = DEFAULT_WEIGHT) -> float:
    """|Phi-check(s)| |s|^2 e^(-2|Re s|); bounded in s by integration by parts."""
    return abs(weight.check(s)) * abs(s) ** 2 * math.exp(-2 * abs(s.real))


# ---------------------------------------------------------------------------
# local densities


def ideals_from_norms(rep: Representation, norms: Sequence[int]) -> list[int]:
    """Indices of distinct prime ideals with the given norms (repeat a norm for the second split ideal)."""
    used: set[int] = set()
    out = []
    for nrm in norms:
        free = [i for i in rep.ideals_of_norm(int(nrm)) if i not in used]
        if not free:
            raise ValueError(f"no unused prime ideal of norm {nrm} in {rep.label}")
        used.add(free[0])
        out.append(free[0])
    return out


def _local_inverse(rep: Representation, i: int, s: complex) -> complex:
    """L(s, pi_p x pi~_p)^-1 = prod (1 - alpha_j conj(alpha_j') N(p)^-s)."""
    a = rep.alphas[i]
    if rep.ramified[i]:
        return 1.0 + 0j  # empty parameter set for the GL(1) ramified convention
    rs = np.outer(a, a.conj()).ravel()
    return complex(np.prod(1 - rs * float(rep.norms[i]) ** (-s)))


def g_factor(rep: Representation, ideals: Sequence[int], s: complex = 1.0) -> complex | float:
    """g_d(s) = prod over p | d of (1 - L(s, pi_p x pi~_p)^-1); g(d) = g_d(1) is real."""
    if len(set(ideals)) != len(ideals):
        raise ValueError("d must be squarefree (distinct prime ideals)")
    val = complex(1.0)
    for i in ideals:
        val *= 1 - _local_inverse(rep, i, s)
    return val.real if s == 1.0 else val


@dataclass(frozen=True)
class StripBoundRow:
    t: float
    value: float
    budget: float
    passed: bool


def g_strip_bound_check(
    rep: Representation, ideals: Sequence[int], t_grid: Sequence[float]
) -> list[StripBoundRow]:
    """|g_d(1 - 1/(2 n^2 [F:Q]) + it)| against C(pi x pi~)^(1/(8 n^2 [F:Q])) N(d)^(1/4)."""
    k = rep.n**2 * rep.field.degree
    sigma = 1 - 1 / (2 * k)
    Nd = math.prod(int(rep.norms[i]) for i in ideals)
    budget = rs_analytic_conductor(rep) ** (1 / (8 * k)) * Nd**0.25
    rows = []
    for t in t_grid:
        v = abs(g_factor(rep, ideals, complex(sigma, t)))
        rows.append(StripBoundRow(float(t), v, budget, v <= budget))
    return rows


# ---------------------------------------------------------------------------
# smoothed sums


def _phi_window(weight: SmoothWeight, x: float, T: float) -> tuple[float, float]:
    lo, hi = weight.support
    return x * math.exp(lo / T), x * math.exp(hi / T)


def _weighted(rep, coeffs: np.ndarray, weight: SmoothWeight, x: float, T: float) -> float:
    a, b = _phi_window(weight, x, T)
    m = np.arange(max(1, math.floor(a)), min(math.floor(b), coeffs.size - 1) + 1)
    w = weight(T * np.log(m / x))
    arr = np.zeros(coeffs.size)
    arr[m] = coeffs[m] * w
    return norm_sum(arr, 0, b)


@dataclass(frozen=True)
class LocalDensityReport:
    x: float
    T: float
    Nd: int
    lhs: float
    main: float
    kappa: float
    g: float
    difference: float
    budget: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.main if self.main else math.inf

    @property
    def budget_ratio(self) -> float:
        return abs(self.difference) / self.budget


def weighted_divisor_sum(
    rep: Representation,
    ideals: Sequence[int],
    x: float,
    T: float,
    weight: SmoothWeight = DEFAULT_WEIGHT,
    kappa: float | None = None,
) -> LocalDensityReport:
    """sum over d | n of lambda(n) Phi(T log(N(n)/x)) against kappa g(d) (x/T) Phi-check(1/T)."""
    kap = rep.kappa if kappa is None else kappa
    if kap is None:
        raise KappaUnavailable(f"{rep.label}: no residue on file; pass kappa (see estimate_kappa)")
    _, top = _phi_window(weight, x, T)
    X = _require(rep, top)
    lam = multiplicative_by_norm(rep, X, divisible_by=tuple(ideals))
    lhs = _weighted(rep, lam, weight, x, T)
    g = float(g_factor(rep, ideals))
    main = kap * g * (x / T) * weight.check(1 / T).real
    k = rep.n**2 * rep.field.degree
    Nd = math.prod(int(rep.norms[i]) for i in ideals)
    budget = x ** (1 - 1 / (2 * k)) * T**0.375 * rs_analytic_conductor(rep) ** (1 / (2 * k)) * Nd**0.25
    return LocalDensityReport(float(x), float(T), Nd, lhs, main, kap, g, lhs - main, budget)


@dataclass(frozen=True)
class KappaEstimate:
    smoothed: float
    euler: float
    x: float
    P: float


def estimate_kappa(
    rep: Representation, x: float, P: float | None = None, weight: SmoothWeight = DEFAULT_WEIGHT
) -> KappaEstimate:
    """Residue estimates: the smoothed mean of lambda at T = 1, and prod_p (1 - 1/p)^[F:Q]-normalised
    truncated Euler product of L(1, pi x pi~) over N(p) <= P."""
    _, top = _phi_window(weight, x, 1.0)
    X = _require(rep, top)
    lam = coeff_stream(rep, X).lam
    smoothed = _weighted(rep, lam, weight, x, 1.0) / (x * weight.check(1.0).real)
    P = rep.cutoff if P is None else P
    sel = np.flatnonzero(rep.norms <= P)
    logs = [-math.log(abs(_local_inverse(rep, int(i), 1.0))) for i in sel]
    # divide out zeta's Euler product over the same rational primes
    ps = np.unique(rep.primes[sel])
    logs += np.log1p(-1.0 / ps.astype(float)).tolist()
    return KappaEstimate(smoothed, math.exp(math.fsum(logs)), float(x), float(P))


@dataclass(frozen=True)
class SieveReport:
    x: float
    T: float
    z: float
    lhs: float
    main: float
    error_budget: float
    passed: bool
    flags: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.main + self.error_budget - self.lhs


def selberg_upper(
    rep: Representation, x: float, T: float, z: float, weight: SmoothWeight = DEFAULT_WEIGHT
) -> SieveReport:
    """Sum of lambda(n) Phi(T log(N(n)/x)) over n free of prime ideals of norm <= z, against
    3x/(T log z) Phi-check(1/T) + x^(1-1/(2k)) T^(3/8) C^(1/(2k)) z^5, k = n^2 [F:Q]."""
    if z < 2:
        raise ValueError("z must be >= 2")
    _, top = _phi_window(weight, x, T)
    X = _require(rep, top)
    lam = multiplicative_by_norm(rep, X, exclude_norm_upto=z)
    lhs = _weighted(rep, lam, weight, x, T)
    main = 3 * x / (T * math.log(z)) * weight.check(1 / T).real
    k = rep.n**2 * rep.field.degree
    C = rs_analytic_conductor(rep)
    err = x ** (1 - 1 / (2 * k)) * T**0.375 * C ** (1 / (2 * k)) * z**5
    flags = {"lhs_below_main": lhs <= main}
    return SieveReport(float(x), float(T), float(z), lhs, main, err, lhs <= main + err, flags)


@dataclass(frozen=True)
class BTReport:
    x: float
    T: float
    total: float
    budget: float
    ratio: float
    in_range: bool


def brun_titchmarsh(rep: Representation, x: float, T: float) -> BTReport:
    """sum of Lambda over x < N(n) <= x e^(1/T) against n^2 [F:Q] x / T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    top = x * math.exp(1 / T)
    cs = coeff_stream(rep, top)
    total = cs.norm_sum("vm", x, top)
    k = rep.n**2 * rep.field.degree
    budget = k * x / T
    in_range = T <= x ** (1 / (16 * k))
    return BTReport(float(x), float(T), total, budget, total / budget, in_range)
