"""Norm-indexed sums of Rankin-Selberg von Mangoldt coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentLocalFactor, StreamTooShort
from .lfunc_core import Representation, coeff_stream, norm_sum, rs_analytic_conductor


@dataclass(frozen=True)
class IntervalSumReport:
    label: str
    x: float
    h: float
    raw: float
    main: float
    ratio: float
    T: float | None = None
    beta1: float | None = None
    xi: float | None = None


def _check_interval(x: float, h: float) -> None:
    if not 2 <= h <= x:
        raise ValueError(f"need 2 <= h <= x, got x={x}, h={h}")


def psi_rs(rep: Representation, x: float) -> float:
    """sum of Lambda_{pi x pi~}(n) over N(n) <= x."""
    if x < 2:
        return 0.0
    return coeff_stream(rep, x).norm_sum("vm", 0, x)


def short_interval(
    rep: Representation, x: float, h: float, beta1: float | None = None
) -> IntervalSumReport:
    """Raw sum over x < N(n) <= x + h against h, or h(1 - xi^(beta1-1)) with an exceptional zero."""
    _check_interval(x, h)
    raw = coeff_stream(rep, x + h).norm_sum("vm", x, x + h)
    xi = None
    main = float(h)
    if beta1 is not None:
        from .explicit_formula import xi_solve

        sol = xi_solve(x, h, beta1)
        xi, main = sol.xi, h * sol.factor
    ratio = raw / main if main > 0 else math.inf
    return IntervalSumReport(rep.label, float(x), float(h), raw, main, ratio, beta1=beta1, xi=xi)


def grc_prime_interval(rep: Representation, x: float, h: float) -> float:
    """sum of |lambda_pi(p)|^2 log N(p) over prime ideals with x < N(p) <= x + h."""
    _check_interval(x, h)
    return coeff_stream(rep, x + h).norm_sum("vm_prime", x, x + h)


@dataclass(frozen=True)
class TailReport:
    x: float
    tail: float
    bound: float
    ratio: float


def composite_tail(rep: Representation, x: float) -> TailReport:
    """Prime-power (non-prime) part of Lambda over x <= N(n) <= 2x against n^2 x^(1-1/(2(n^2+1))) (log x)^3."""
    if x < 4:
        raise ValueError("composite_tail needs x >= 4")
    cs = coeff_stream(rep, 2 * x)
    lo = math.ceil(x) - 1
    tail = norm_sum(cs.vm - cs.vm_prime, lo, 2 * x)
    n2 = rep.n * rep.n
    bound = n2 * x ** (1 - 1 / (2 * (n2 + 1))) * math.log(x) ** 3
    return TailReport(float(x), tail, bound, tail / bound)


@dataclass(frozen=True)
class HypothesisHReport:
    k: int
    X: float
    total: float
    blocks: list[tuple[float, float, float]] = field(default_factory=list)

    @property
    def increments(self) -> list[float]:
        return [b[2] for b in self.blocks]

    def decreasing(self) -> bool:
        inc = self.increments
        return all(b < a for a, b in zip(inc, inc[1:]))


def _hyp_h_terms(rep: Representation, k: int, X: float) -> tuple[np.ndarray, np.ndarray]:
    sel = np.flatnonzero(rep.norms <= X)
    norms = rep.norms[sel].astype(float)
    pk = (rep.alphas[sel] ** k).sum(axis=1)
    # |Lambda_pi(p^k)|^2 N(p)^-k
    terms = np.abs(pk) ** 2 * np.log(norms) ** 2 * norms ** (-float(k))
    return norms, terms


def hypothesis_h_partial(
    rep: Representation, k: int, X: float, block_start: float = 1000.0
) -> HypothesisHReport:
    """Partial sum over N(p) <= X plus its increments on dyadic blocks (b, 2b], b = block_start 2^j."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if X < 2:
        return HypothesisHReport(k, float(X), 0.0, [])
    if X > rep.cutoff:
        raise StreamTooShort(f"{rep.label}: need prime data to {X}, instance built to {rep.cutoff}")
    norms, terms = _hyp_h_terms(rep, k, X)
    total = math.fsum(terms.tolist())
    blocks = []
    lo = block_start
    while 2 * lo <= X:
        mask = (norms > lo) & (norms <= 2 * lo)
        blocks.append((lo, 2 * lo, math.fsum(terms[mask].tolist())))
        lo *= 2
    return HypothesisHReport(k, float(X), total, blocks)


@dataclass(frozen=True)
class MertensReport:
    eta: float
    X: float
    partial: float
    budget: float
    passed: bool


def mertens_check(rep: Representation, eta: float, X: float) -> MertensReport:
    """sum Lambda(n) N(n)^(-1-eta) against 1/eta + (1/2) log C(pi x pi~) + 10 n^2 [F:Q]."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    slack = 10 * rep.n**2 * rep.field.degree
    budget = 1 / eta + 0.5 * math.log(rs_analytic_conductor(rep)) + slack
    if X < 2:
        return MertensReport(eta, float(X), 0.0, budget, True)
    cs = coeff_stream(rep, X)
    top = int(math.floor(X))
    m = np.arange(top + 1, dtype=float)
    m[0] = 1.0
    weighted = cs.vm[: top + 1] * m ** (-1 - eta)
    partial = norm_sum(weighted, 0, X)
    return MertensReport(eta, float(X), partial, budget, partial <= budget)


@dataclass(frozen=True)
class BrumleyReport:
    eps: float
    X: float
    log_value: float
    max_ratio: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def brumley_max_product(rep: Representation, eps: float, X: float) -> BrumleyReport:
    """prod over N(p) <= X of sum_r max_j |alpha_j(p)|^(2r) N(p)^(-r(1+eps)), summed in closed form."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if X > rep.cutoff:
        raise StreamTooShort(f"{rep.label}: need prime data to {X}, instance built to {rep.cutoff}")
    sel = np.flatnonzero(rep.norms <= X)
    if sel.size == 0:
        return BrumleyReport(eps, float(X), 0.0, 0.0)
    amax = np.abs(rep.alphas[sel]).max(axis=1)
    r = amax**2 * rep.norms[sel].astype(float) ** (-(1 + eps))
    worst = float(r.max())
    if worst >= 1:
        i = int(sel[np.argmax(r)])
        raise DivergentLocalFactor(f"geometric ratio {worst:.4g} >= 1 at norm {rep.norms[i]}")
    return BrumleyReport(eps, float(X), -math.fsum(np.log1p(-r).tolist()), worst)
