"""Riemann zeta on vertical strips by Euler-Maclaurin summation."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli, loggamma

_M = 12
_B = bernoulli(2 * _M)
# B_{2k} / (2k)!
_EM_COEF = [float(_B[2 * k]) / math.factorial(2 * k) for k in range(1, _M + 1)]


def zeta(s) -> np.ndarray:
    """zeta(s) for an array of complex s with Re(s) > -10 and s != 1."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if s.size == 0:
        return s
    height = float(np.max(np.abs(s)))
    N = int(height / 2) + 20
    acc = np.zeros_like(s)
    for n in range(1, N):
        acc += np.exp(-s * math.log(n))
    logN = math.log(N)
    Ns = np.exp(-s * logN)
    acc += N * Ns / (s - 1) + 0.5 * Ns
    # rising factorial s (s+1) ... (s+2k-2), times N^(-s-2k+1)
    rising = s.copy()
    power = Ns / N
    for k, c in enumerate(_EM_COEF, start=1):
        acc += c * rising * power
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (N * N)
    return acc


def theta(t) -> np.ndarray:
    """Riemann-Siegel theta: arg Gamma(1/4 + it/2) - (t/2) log pi, continuous in t."""
    t = np.asarray(t, dtype=float)
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def hardy_z(t) -> np.ndarray:
    """Real-valued Z(t) = e^(i theta(t)) zeta(1/2 + it)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return (np.exp(1j * theta(t)) * zeta(0.5 + 1j * t)).real


def zero_counting_function(T: float, samples: int = 400) -> float:
    """N(T) = theta(T)/pi + 1 + S(T), with S(T) from the argument of zeta along 2 -> 2+iT -> 1/2+iT.

    Re zeta(2+it) > 0, so the vertical leg needs no unwrapping.
    """
    if T <= 0:
        return 0.0
    sig = np.linspace(2.0, 0.5, samples)
    vals = zeta(sig + 1j * T)
    arg = np.unwrap(np.angle(vals))
    return float(theta(T) / math.pi + 1 + arg[-1] / math.pi)
