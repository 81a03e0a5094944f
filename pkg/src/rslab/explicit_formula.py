"""Truncated explicit formula, short-interval zero terms and parameter plans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import IncompleteSet, InadmissibleParameters
from .lfunc_core import Representation
from .sums import psi_rs
from .zeros import ZeroSet

PER_ZERO_SLACK = 1e-12


def _zeros_upto(zs: ZeroSet, T: float, exclude_beta1: bool = False):
    """(rho, multiplicity) arrays for zeros with 0 < beta < 1, |gamma| <= T, split by sign of gamma."""
    if zs.zeros and not zs.complete:
        raise IncompleteSet("zero set is not certified complete")
    if zs.zeros and T > zs.T_max:
        raise ValueError(f"T={T} exceeds T_max={zs.T_max}")
    pool = zs.nonexceptional() if exclude_beta1 else list(zs.zeros)
    sel = [z for z in pool if 0 < z.beta < 1 and abs(z.gamma) <= T]
    up = [z for z in sel if z.gamma > 0]
    real = [z for z in sel if z.gamma == 0]
    rho = np.array([z.rho for z in up], dtype=complex)
    mult = np.array([z.multiplicity for z in up], dtype=float)
    rho_r = np.array([z.beta for z in real], dtype=float)
    mult_r = np.array([z.multiplicity for z in real], dtype=float)
    return rho, mult, rho_r, mult_r


def _pair_fsum(terms_up: np.ndarray, terms_down: np.ndarray, real_terms: np.ndarray) -> complex:
    pairs = terms_up + terms_down
    re = math.fsum(pairs.real.tolist() + real_terms.tolist())
    im = math.fsum(pairs.imag.tolist())
    return complex(re, im)


def zero_sum(zs: ZeroSet, x: float, T: float) -> complex:
    """sum over zeros with 0 < beta < 1, |gamma| <= T of x^rho / rho, conjugates summed jointly."""
    rho, mult, rho_r, mult_r = _zeros_upto(zs, T)
    lx = math.log(x) if x > 0 else 0.0
    up = mult * np.exp(rho * lx) / rho
    down = mult * np.exp(rho.conj() * lx) / rho.conj()
    real = mult_r * np.exp(rho_r * lx) / rho_r
    return _pair_fsum(up, down, real)


@dataclass(frozen=True)
class EFReport:
    x: float
    T: float
    psi: float
    main: float
    zero_sum: complex
    im_residue: float
    residual: float
    budget: float

    @property
    def ratio(self) -> float:
        return self.residual / self.budget if self.budget > 0 else math.inf


def explicit_formula_residual(rep: Representation, zs: ZeroSet, x: float, T: float) -> EFReport:
    """|psi(x) - (x - sum x^rho/rho)| against x (log x)^2 / sqrt(T)."""
    psi = psi_rs(rep, x)
    zsum = zero_sum(zs, x, T)
    residual = abs(psi - (x - zsum.real))
    budget = x * math.log(x) ** 2 / math.sqrt(T) if T > 0 else math.inf
    return EFReport(float(x), float(T), psi, float(x), zsum, abs(zsum.imag), residual, budget)


def ef_sweep(rep: Representation, zs: ZeroSet, x: float, Ts: Sequence[float]) -> list[EFReport]:
    return [explicit_formula_residual(rep, zs, x, T) for T in Ts]


@dataclass(frozen=True)
class IntervalZeroTerm:
    x: float
    h: float
    T: float
    total: complex
    gammas: np.ndarray
    magnitudes: np.ndarray
    bounds: np.ndarray
    branch: list[str] = field(default_factory=list)

    @property
    def all_within(self) -> bool:
        return bool(np.all(self.magnitudes <= self.bounds + PER_ZERO_SLACK))


def _check_xh(x: float, h: float) -> None:
    if not 2 <= h <= x:
        raise ValueError(f"need 2 <= h <= x, got x={x}, h={h}")


def interval_zero_term(zs: ZeroSet, x: float, h: float, T: float) -> IntervalZeroTerm:
    """sum of ((x+h)^rho - x^rho)/rho with the per-zero bound min{h x^(beta-1), 3 x^beta/|gamma|}."""
    _check_xh(x, h)
    rho, mult, rho_r, mult_r = _zeros_upto(zs, T)
    lx = math.log(x)

    def term(r):
        # x^r (e^{r log(1+h/x)} - 1) / r, accurate for small h/x
        return np.exp(r * lx) * np.expm1(r * math.log1p(h / x)) / r

    up, down = term(rho), term(rho.conj())
    real = term(rho_r.astype(complex)).real
    total = _pair_fsum(mult * up, mult * down, mult_r * real)

    gam = np.concatenate([rho.imag, -rho.imag, np.zeros(rho_r.size)])
    beta = np.concatenate([rho.real, rho.real, rho_r])
    mags = np.abs(np.concatenate([up, down, real.astype(complex)]))
    b1 = h * np.exp((beta - 1) * lx)
    with np.errstate(divide="ignore"):
        b2 = np.where(gam != 0, 3 * np.exp(beta * lx) / np.abs(gam), np.inf)
    bounds = np.minimum(b1, b2)
    branch = ["mean-value" if a <= b else "large-gamma" for a, b in zip(b1, b2)]
    return IntervalZeroTerm(float(x), float(h), float(T), total, gam, mags, bounds, branch)


@dataclass(frozen=True)
class DyadicBound:
    x: float
    h: float
    T: float
    window: float
    near: float
    far: float
    tail: float
    sup_at: float | None

    @property
    def total(self) -> float:
        return self.near + self.far + self.tail


def dyadic_zero_bound(zs: ZeroSet, x: float, h: float, T: float) -> DyadicBound:
    """Right side of the dyadic zero-sum bound with all implied constants set to 1.

    near = sum' over |gamma| <= W of x^(beta-1), W = x log x / h;
    far  = W sup_M M^-1 sum' over |gamma| <= M of x^(beta-1), M in {e^j} with W <= M <= T;
    tail = x (log x)^2 / (h sqrt T).
    """
    _check_xh(x, h)
    rho, mult, rho_r, mult_r = _zeros_upto(zs, T, exclude_beta1=True)
    lx = math.log(x)
    W = x * lx / h
    gam = np.concatenate([rho.imag, -rho.imag, np.zeros(rho_r.size)])
    w = np.concatenate([mult, mult, mult_r]) * np.exp(
        (np.concatenate([rho.real, rho.real, rho_r]) - 1) * lx
    )

    def partial(M: float) -> float:
        return math.fsum(w[np.abs(gam) <= M].tolist())

    near = partial(W)
    far, sup_at = 0.0, None
    j = math.ceil(math.log(W)) if W > 0 else 0
    while math.exp(j) <= T:
        M = math.exp(j)
        if M >= W:
            val = partial(M) / M
            if sup_at is None or val > far / W:
                far, sup_at = W * val, M
        j += 1
    tail = x * lx**2 / (h * math.sqrt(T)) if T > 0 else math.inf
    return DyadicBound(float(x), float(h), float(T), W, near, far, tail, sup_at)


@dataclass(frozen=True)
class XiSolution:
    x: float
    h: float
    beta1: float
    xi: float
    factor: float
    residual: float


def xi_solve(x: float, h: float, beta1: float) -> XiSolution:
    """xi in [x, x+h] with (x+h)^beta1 - x^beta1 = beta1 h xi^(beta1-1), by bisection.

    Works with u = xi/x, where the equation reads u^(beta1-1) = expm1(beta1 log1p(h/x)) / (beta1 h/x);
    the left side is decreasing in u, so [1, 1 + h/x] is a bracket.
    """
    if not 0 < beta1 < 1:
        raise ValueError("beta1 must lie in (0, 1)")
    _check_xh(x, h)
    r = h / x
    target = math.expm1(beta1 * math.log1p(r)) / (beta1 * r)

    def g(u: float) -> float:
        return math.exp((beta1 - 1) * math.log(u)) - target

    lo, hi = 1.0, 1.0 + r
    for _ in range(200):
        if hi - lo <= 1e-12 * lo:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    xi = x * u
    factor = -math.expm1((beta1 - 1) * math.log(xi))
    lhs = x**beta1 * math.expm1(beta1 * math.log1p(r))
    residual = abs(lhs - beta1 * h * math.exp((beta1 - 1) * math.log(xi)))
    return XiSolution(float(x), float(h), beta1, xi, factor, residual)


@dataclass(frozen=True)
class ParameterPlan:
    A: float
    n: int
    dF: int
    theta: float
    T_exponent: float
    delta: float
    limit: float
    A_warning: bool
    T: float | None = None


def choices_plan(A: float, n: int, dF: int, theta: float = 0.0, x: float | None = None) -> ParameterPlan:
    """T = x^(1/(4 A n^2 dF)) and delta = 1/(16 A n^2 dF log(e n dF)), with admissibility checks."""
    if A <= 0 or n < 1 or dF < 1:
        raise InadmissibleParameters("A, n and dF must be positive")
    limit = 1 / (16 * A * n * n)
    delta = 1 / (16 * A * n * n * dF * math.log(math.e * n * dF))
    if not 0 <= theta <= limit:
        raise InadmissibleParameters(f"theta={theta} outside [0, 1/(16 A n^2)] = [0, {limit:.6g}]")
    if not 0 <= delta * dF <= limit:
        raise InadmissibleParameters(f"delta*dF={delta * dF} outside [0, {limit:.6g}]")
    expo = 1 / (4 * A * n * n * dF)
    T = x**expo if x is not None else None
    return ParameterPlan(A, n, dF, theta, expo, delta, limit, A < 1e7, T)
