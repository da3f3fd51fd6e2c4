"""Small integer helpers shared by the other modules."""
from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np
import sympy

TRIAL_LIMIT = 10**6


class DomainError(ValueError):
    pass


class ResourceGuard(RuntimeError):
    """Raised when a requested enumeration exceeds a configured size guard."""


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def factorize(n: int) -> dict[int, int]:
    """Trial division up to TRIAL_LIMIT, then sympy for whatever cofactor is left."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n and d <= TRIAL_LIMIT:
        for q in (d, d + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        d += 6
    if n > 1:
        if d * d > n:
            out[n] = out.get(n, 0) + 1
        else:
            for q, e in sympy.factorint(n).items():
                out[int(q)] = out.get(int(q), 0) + e
    return dict(sorted(out.items()))


def merge_factors(*fs: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for f in fs:
        for p, e in f.items():
            out[p] = out.get(p, 0) + e
    return dict(sorted(out.items()))


def divisors_from(fac: dict[int, int]) -> list[int]:
    ds = [1]
    for p, e in fac.items():
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


@lru_cache(maxsize=8)
def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for i in range(2, isqrt(n) + 1):
        if s[i]:
            s[i * i :: i] = False
    return np.nonzero(s)[0].astype(np.int64)


def spf_array(n: int) -> np.ndarray:
    """Smallest prime factor for every integer up to n."""
    s = np.arange(n + 1, dtype=np.int64)
    for p in range(2, isqrt(n) + 1):
        if s[p] == p:
            blk = s[p * p :: p]
            blk[blk == np.arange(p * p, n + 1, p)] = p
    return s


def spf_table(n: int) -> list[int]:
    """spf_array as a plain list, for fast scalar indexing."""
    return spf_array(n).tolist()


def divisors_spf(n: int, spf: list[int]) -> list[int]:
    ds = [1]
    while n > 1:
        p = spf[n]
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return ds


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n < 1:
        raise DomainError("kronecker symbol needs n >= 1")
    res = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            res = -res
    if n == 1:
        return res
    return res * int(sympy.jacobi_symbol(D % n, n))


def kronecker_primes(D: int, primes: np.ndarray) -> np.ndarray:
    """(D/p) for an array of primes, via vectorised Euler criterion."""
    out = np.empty(len(primes), dtype=np.int64)
    two = primes == 2
    if two.any():
        out[two] = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
    odd = primes[~two]
    if D < 2**62:
        base = D % odd
    else:
        base = np.array([D % int(p) for p in odd], dtype=np.int64)
    e = (odd - 1) // 2
    r = np.ones_like(odd)
    while e.any():
        m = (e & 1) == 1
        r = np.where(m, (r * base) % odd, r)
        base = (base * base) % odd
        e >>= 1
    out[~two] = np.where(r == 1, 1, np.where(r == 0, 0, -1))
    return out


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_of_one(q: int) -> list[int]:
    """All alpha mod q with alpha^2 = 1."""
    if q == 1:
        return [0]
    return [a for a in range(q) if (a * a - 1) % q == 0]


def chebyshev_trace(s: int, j: int) -> int:
    """tau_j(s) = 2 T_j(s/2): the trace of g^j when tr g = s and det g = 1."""
    a, b = 2, s
    if j == 0:
        return 2
    for _ in range(j - 1):
        a, b = b, s * b - a
    return b


def chebyshev_u(s: int, j: int) -> int:
    """V_j(s) with V_0 = 0, V_1 = 1, V_{j+1} = s V_j - V_{j-1}; u_j = u_1 V_j."""
    a, b = 0, 1
    if j == 0:
        return 0
    for _ in range(j - 1):
        a, b = b, s * b - a
    return b


def chebyshev_roots(t: int, j: int) -> int | None:
    """The integer s >= 3 with tau_j(s) = t, if any."""
    if j < 2 or t < 3:
        return None
    lo, hi = 3, 3
    while chebyshev_trace(hi, j) < t:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if chebyshev_trace(mid, j) < t:
            lo = mid + 1
        else:
            hi = mid
    return lo if chebyshev_trace(lo, j) == t else None


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    g = gcd(m1, m2)
    assert g == 1
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)
