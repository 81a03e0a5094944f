"""Exact q-expansions of the level-one Hecke eigenforms.

Power series are multiplied by Kronecker substitution: a series with
integer coefficients c_i is encoded as the integer sum c_i 2^(b i) and
multiplied with GMP.  Signed slots are decoded by adding 2^(b-1) to every
slot before splitting the bytes, which is exact as long as every *final*
coefficient lies in [-2^(b-1), 2^(b-1)).

Delta = q prod (1 - q^m)^24 is computed as q J(q)^8 with Jacobi's
J(q) = sum (-1)^k (2k+1) q^(k(k+1)/2) (three squarings).  For the other
weights with a one-dimensional cusp space the normalized eigenform is
Delta * E_(k-12).
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from pathlib import Path

import gmpy2
import numpy as np

from .errors import CutoffTooLarge

DESK_CAP = 3_000_000
WEIGHTS = (12, 16, 18, 20, 22, 26)
# E_w = 1 + c_w sum sigma_{w-1}(m) q^m
_EISENSTEIN_C = {4: 240, 6: -504, 8: 480, 10: -264, 14: -24}


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _slot_bits(weight: int, N: int) -> int:
    # |a(n)| <= d(n) n^((k-1)/2) and d(n) < 2^12 for n <= DESK_CAP
    coeff_bits = math.ceil((weight - 1) / 2 * math.log2(max(N, 2))) + 12 + 2
    bits = coeff_bits
    if weight != 12:
        w = weight - 12 - 1
        bits = max(bits, math.ceil(w * math.log2(max(N, 2))) + 2)
    return 8 * math.ceil(bits / 8)


def _to_mpz(buf: bytes) -> gmpy2.mpz:
    return gmpy2.mpz(int.from_bytes(buf, "little"))


class _Packer:
    """Signed Kronecker packing with M slots of b bits."""

    def __init__(self, M: int, b: int):
        self.M, self.b, self.nb = M, b, b // 8
        self.half = 1 << (b - 1)
        pattern = np.zeros((M, self.nb), dtype=np.uint8)
        pattern[:, -1] = 0x80
        self.offset = _to_mpz(pattern.tobytes())
        self.mask = (gmpy2.mpz(1) << (b * M)) - 1

    def pack_sparse(self, coeffs: dict[int, int]) -> gmpy2.mpz:
        buf = np.zeros((self.M, self.nb), dtype=np.uint8)
        buf[:, -1] = 0x80
        for i, c in coeffs.items():
            buf[i] = np.frombuffer((c + self.half).to_bytes(self.nb, "little"), dtype=np.uint8)
        return _to_mpz(buf.tobytes()) - self.offset

    def unpack(self, value: gmpy2.mpz) -> np.ndarray:
        q = (value + self.offset) & self.mask
        raw = int(q).to_bytes(self.M * self.nb, "little")
        return np.frombuffer(raw, dtype=np.uint8).reshape(self.M, self.nb)

    def slot(self, slots: np.ndarray, i: int) -> int:
        return int.from_bytes(slots[i].tobytes(), "little") - self.half


def _power_limbs(N: int, w: int, L: int) -> np.ndarray:
    """d^w for d = 0..N as L little-endian 32-bit limbs, limb-major (row i holds limb i)."""
    d = np.arange(N + 1, dtype=np.uint64)
    out = np.zeros((L, N + 1), dtype=np.uint64)
    out[0] = 1
    for _ in range(w):
        out *= d
        _carry(out)
    return out


def _carry(limbs: np.ndarray) -> None:
    low = np.uint64(0xFFFFFFFF)
    shift = np.uint64(32)
    for i in range(limbs.shape[0] - 1):
        limbs[i + 1] += limbs[i] >> shift
        limbs[i] &= low
    if np.any(limbs[-1] >> shift):
        raise OverflowError("limb budget too small")


def _sigma_limbs(N: int, w: int, L: int) -> np.ndarray:
    """sigma_w(m) for m = 0..N as 32-bit limbs, one row per m (sigma_w(0) = 0)."""
    powers = _power_limbs(N, w, L)
    sig = np.zeros((L, N + 1), dtype=np.uint64)
    r = math.isqrt(N)
    for d in range(1, r + 1):
        sig[:, d::d] += powers[:, d : d + 1]
    for j in range(1, N // (r + 1) + 1):
        ds = np.arange(r + 1, N // j + 1)
        sig[:, ds * j] += powers[:, ds]
    _carry(sig)
    return np.ascontiguousarray(sig.T)


@functools.lru_cache(maxsize=2)
def _delta_slots(N: int) -> tuple[_Packer, np.ndarray]:
    """Delta = q J^8 at the narrow weight-12 slot width, shared by every weight."""
    b = _slot_bits(12, N)
    packer = _Packer(N + 1, b)
    jac = {}
    k = 0
    while k * (k + 1) // 2 < N:
        jac[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    S = packer.pack_sparse(jac)
    mask_n = (gmpy2.mpz(1) << (b * N)) - 1
    for _ in range(3):
        S = (S * S) & mask_n
    slots = packer.unpack(S << b)
    slots.flags.writeable = False
    return packer, slots


def _widen(slots: np.ndarray, narrow: _Packer, wide: _Packer) -> gmpy2.mpz:
    """Repack offset-encoded narrow slots as the signed integer sum c_n 2^(b n) at the wide width."""
    buf = np.zeros((wide.M, wide.nb), dtype=np.uint8)
    buf[:, : narrow.nb] = slots
    pattern = np.zeros((wide.M, wide.nb), dtype=np.uint8)
    pattern[:, narrow.nb - 1] = 0x80
    return _to_mpz(buf.tobytes()) - _to_mpz(pattern.tobytes())


def eigenform_slots(weight: int, N: int) -> tuple[_Packer, np.ndarray]:
    """Packed coefficients a(0..N) of the normalized level-one eigenform."""
    if weight not in WEIGHTS:
        raise ValueError(f"weight {weight} not in {WEIGHTS}")
    if N > DESK_CAP:
        raise CutoffTooLarge(f"q-expansion cutoff {N} exceeds desk cap {DESK_CAP}")
    narrow, delta = _delta_slots(N)
    if weight == 12:
        return narrow, delta
    packer = _Packer(N + 1, _slot_bits(weight, N))
    F = _widen(delta, narrow, packer)
    ew = weight - 12
    sig = _sigma_limbs(N, ew - 1, -(-packer.b // 32)).astype("<u4").view(np.uint8)
    if sig[:, packer.nb :].any():
        raise OverflowError("sigma exceeds the slot width")
    sig = np.ascontiguousarray(sig[:, : packer.nb])
    F = (F + _EISENSTEIN_C[ew] * ((F * _to_mpz(sig.tobytes())) & packer.mask)) & packer.mask
    return packer, packer.unpack(F)


def eigenform_qexp(weight: int, N: int) -> list[int]:
    """All coefficients a(0..N) as exact integers (intended for small N)."""
    packer, slots = eigenform_slots(weight, N)
    return [packer.slot(slots, i) for i in range(N + 1)]


@dataclass(frozen=True)
class HeckeTable:
    weight: int
    cutoff: int
    primes: np.ndarray
    a_p: tuple[int, ...]
    lam: np.ndarray

    def restrict(self, cutoff: int) -> HeckeTable:
        k = int(np.searchsorted(self.primes, cutoff, side="right"))
        return HeckeTable(self.weight, cutoff, self.primes[:k], self.a_p[:k], self.lam[:k])

    def deligne_ok(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.lam) <= 2 + tol))


def _cache_dir() -> Path | None:
    env = os.environ.get("RSLAB_CACHE", "")
    if env.lower() in ("off", "0", "none"):
        return None
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "rslab"


_TABLES: dict[int, HeckeTable] = {}


def _load_cached(weight: int, cutoff: int) -> HeckeTable | None:
    root = _cache_dir()
    if root is None or not root.is_dir():
        return None
    best = None
    for path in root.glob(f"hecke_w{weight}_N*.npz"):
        n = int(path.stem.split("_N")[1])
        if n >= cutoff and (best is None or n < best[0]):
            best = (n, path)
    if best is None:
        return None
    try:
        with np.load(best[1]) as data:
            primes = data["primes"]
            a_p = tuple(int(s) for s in data["a_p"])
    except (OSError, KeyError, ValueError):
        return None
    lam = _normalize(weight, primes, a_p)
    return HeckeTable(weight, best[0], primes, a_p, lam)


def _store(table: HeckeTable) -> None:
    root = _cache_dir()
    if root is None:
        return
    try:
        root.mkdir(parents=True, exist_ok=True)
        tmp = root / f".hecke_w{table.weight}_N{table.cutoff}.{os.getpid()}.npz"
        np.savez(tmp, primes=table.primes, a_p=np.array([str(a) for a in table.a_p]))
        tmp.replace(root / f"hecke_w{table.weight}_N{table.cutoff}.npz")
    except OSError:
        pass


def _normalize(weight: int, primes: np.ndarray, a_p) -> np.ndarray:
    # int -> float is correctly rounded, so this matches a 53-bit mpfr quotient
    a = np.array([float(v) for v in a_p])
    return a / primes.astype(float) ** ((weight - 1) / 2)


def hecke_table(weight: int, cutoff: int) -> HeckeTable:
    """Eigenvalues a(p) and lambda(p) = a(p) p^(-(k-1)/2) for primes p <= cutoff."""
    if cutoff > DESK_CAP:
        raise CutoffTooLarge(f"Hecke cutoff {cutoff} exceeds desk cap {DESK_CAP}")
    held = _TABLES.get(weight)
    if held is not None and held.cutoff >= cutoff:
        return held.restrict(cutoff)
    table = _load_cached(weight, cutoff)
    if table is None:
        N = max(cutoff, 100)
        packer, slots = eigenform_slots(weight, N)
        primes = primes_up_to(N)
        a_p = tuple(packer.slot(slots, int(p)) for p in primes)
        table = HeckeTable(weight, N, primes, a_p, _normalize(weight, primes, a_p))
        _store(table)
    _TABLES[weight] = table
    return table.restrict(cutoff)


def tau_expansion(cutoff: int) -> dict[int, int]:
    """Ramanujan tau(p) for primes p <= cutoff."""
    table = hecke_table(12, cutoff)
    return dict(zip(table.primes.tolist(), table.a_p))
