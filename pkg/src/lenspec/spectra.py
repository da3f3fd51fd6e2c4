"""Multiplicities m, weighted multiplicities m-hat, the weights I, and correlation sums."""
from __future__ import annotations

import array
import math
import os
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .arith import (
    DomainError,
    chebyshev_roots,
    chebyshev_trace,
    chebyshev_u,
    divisors_spf,
    kronecker,
    primes_upto,
    spf_array,
)
from .finite_sl2 import FULL, GroupSpec, coset_space, gamma1_matrix, permutation_character
from .quad_forms import class_number, divisor_profile, power_index

BLOCK = 64


@dataclass
class SpectrumRow:
    t: int
    m: int
    mhat: Fraction
    I: float


@dataclass
class SpectrumTable:
    spec: GroupSpec
    x_max: int
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self._by_t = {r.t: r for r in self.rows}

    def row(self, t: int) -> SpectrumRow:
        return self._by_t[t]

    def m_of(self, t: int) -> int:
        return self._by_t[t].m

    def to_csv(self) -> str:
        lines = ["t,m,mhat_num,mhat_den,I"]
        for r in self.rows:
            lines.append(f"{r.t},{r.m},{r.mhat.numerator},{r.mhat.denominator},{r.I!r}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        return [
            {"t": r.t, "m": r.m, "mhat_num": r.mhat.numerator, "mhat_den": r.mhat.denominator, "I": r.I}
            for r in self.rows
        ]


# --- class numbers for every discriminant (t^2-4)/u^2, by one sweep over forms ------

_SPF = None


def _init_worker(spf_bytes: bytes) -> None:
    global _SPF
    _SPF = array.array("q")
    _SPF.frombytes(spf_bytes)


def _classes_of_trace(t: int, spf) -> dict[int, int]:
    """u -> h((t^2-4)/u^2): cycles of reduced forms of discriminant t^2-4, split by content."""
    D = t * t - 4
    R = isqrt(D)
    forms = set()
    for s in range(1, (t - 1) // 2 + 1):
        w = t - s
        b = w - s
        n = s * w - 1
        for al in divisors_spf(n, spf):
            if s <= al < w and D < (2 * al + b) ** 2 and (2 * al - b <= 0 or (2 * al - b) ** 2 < D):
                g = n // al
                forms.add((al, b, -g))
                forms.add((-al, b, g))
    out: dict[int, int] = {}
    while forms:
        f = forms.pop()
        a, b, c = f
        u = gcd(gcd(a, b), c)
        while True:
            r = R - (R + b) % (2 * abs(c))
            a, b, c = c, r, (r * r - D) // (4 * c)
            if (a, b, c) == f:
                break
            forms.remove((a, b, c))
        out[u] = out.get(u, 0) + 1
    return dict(sorted(out.items()))


def _block(ts: list[int]) -> list[tuple[int, dict]]:
    return [(t, _classes_of_trace(t, _SPF)) for t in ts]


_class_cache: dict[int, dict] = {}
_cache_lock = threading.Lock()


def class_data(x_max: int, threads: int | None = None) -> dict[int, dict]:
    """t -> {u: h(D_{t,u})} for 3 <= t < x_max (cached, extended on demand)."""
    need = [t for t in range(3, x_max) if t not in _class_cache]
    if need:
        threads = threads or os.cpu_count() or 1
        spf = spf_array(max(x_max * x_max // 4 + 8, 16))
        blocks = [need[i : i + BLOCK] for i in range(0, len(need), BLOCK)]
        results = []
        if threads <= 1 or len(blocks) == 1:
            _init_worker(spf.tobytes())
            for b in blocks:
                results.extend(_block(b))
        else:
            with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                     initargs=(spf.tobytes(),)) as ex:
                for res in ex.map(_block, blocks):
                    results.extend(res)
        with _cache_lock:
            for t, d in results:
                _class_cache[t] = d
    return {t: _class_cache[t] for t in range(3, x_max)}


# --- power structure ---------------------------------------------------------

def power_roots(t: int) -> list[tuple[int, int]]:
    """All (s, j) with j >= 2, s >= 3 and tau_j(s) = t."""
    out = []
    j = 2
    while 3**j <= 4 * t:
        s = chebyshev_roots(t, j)
        if s is not None:
            out.append((s, j))
        j += 1
    return out


def _power_index_fast(t: int, u: int) -> int:
    D = (t * t - 4) // (u * u)
    best = 1
    for s, j in power_roots(t):
        v = chebyshev_u(s, j)
        if u % v == 0 and s * s - D * (u // v) ** 2 == 4:
            best = max(best, j)
    return best


# --- omega -------------------------------------------------------------------

_omega_cache: dict = {}


def omega(spec: GroupSpec, t: int, u: int) -> int:
    if spec.is_full():
        return 1
    n = spec.N
    D = (t * t - 4) // (u * u)
    g = gamma1_matrix(D, t, u, n)
    key = (spec, g.entries)
    hit = _omega_cache.get(key)
    if hit is None:
        hit = permutation_character(coset_space(spec, n), g)
        _omega_cache[key] = hit
    return hit


# --- single-t evaluation ----------------------------------------------------------

def _check_t(t: int) -> None:
    if t < 3:
        raise DomainError("trace must be at least 3")


def m_hat(spec: GroupSpec, t: int) -> Fraction:
    """sum over u in U(t) of omega(t,u) h(D_{t,u}) / j_{t,u}."""
    _check_t(t)
    total = Fraction(0)
    for u, D, j in divisor_profile(t).entries:
        total += Fraction(omega(spec, t, u) * class_number(D), j)
    return total


def m_direct(t: int) -> int:
    """Primitive multiplicity for the full group: sum of h over u with j_{t,u} = 1."""
    _check_t(t)
    return sum(class_number(D) for u, D, j in divisor_profile(t).entries if j == 1)


@lru_cache(maxsize=None)
def m(spec: GroupSpec, t: int) -> int:
    """m from m-hat by peeling off the contributions of proper powers."""
    _check_t(t)
    val = m_hat(spec, t)
    for s, j in power_roots(t):
        val -= Fraction(m(spec, s), j)
    if val.denominator != 1 or val < 0:
        raise ArithmeticError(f"non-integral multiplicity {val} at t = {t}")
    return int(val)


def trace_log_ratio(t: int) -> float:
    r = math.sqrt(t * t - 4)
    return math.log((t + r) / 2) / r


def I_weight(spec: GroupSpec, t: int, mhat: Fraction | None = None) -> float:
    _check_t(t)
    mh = m_hat(spec, t) if mhat is None else mhat
    return trace_log_ratio(t) * float(mh)


def I_from_L(spec: GroupSpec, t: int, L) -> float:
    """sum over u of omega u^-1 L(1, D_{t,u}), with L a callable D -> L(1, D)."""
    return sum(omega(spec, t, u) * L(D) / u for u, D, j in divisor_profile(t).entries)


# --- sieve tables ----------------------------------------------------------------

_table_cache: dict = {}


def spectrum_table(spec: GroupSpec, x_max: int, threads: int | None = None) -> SpectrumTable:
    """Rows for 3 <= t < x_max, including rows with m = 0."""
    if x_max < 4:
        raise DomainError("x_max must be at least 4")
    key = (spec, x_max)
    if key in _table_cache:
        return _table_cache[key]
    data = class_data(x_max, threads)
    rows = []
    mvals: dict[int, int] = {}
    for t in range(3, x_max):
        mh = Fraction(0)
        for u, h in data[t].items():
            mh += Fraction(omega(spec, t, u) * h, _power_index_fast(t, u))
        val = mh
        for s, j in power_roots(t):
            val -= Fraction(mvals[s], j)
        if val.denominator != 1 or val < 0:
            raise ArithmeticError(f"non-integral multiplicity {val} at t = {t}")
        mvals[t] = int(val)
        rows.append(SpectrumRow(t, int(val), mh, trace_log_ratio(t) * float(mh)))
    tab = SpectrumTable(spec, x_max, rows)
    _table_cache[key] = tab
    return tab


def correlation_sum(spec: GroupSpec, k: int, shifts, x: int, threads: int | None = None):
    """(sum_t prod_i m(t + r_i), same with m-hat) over max(3, 3 - min r) <= t < x."""
    if k < 2:
        raise DomainError("k must be at least 2")
    shifts = tuple(int(r) for r in shifts)
    if len(shifts) != k:
        raise DomainError("need one shift per factor")
    tab = spectrum_table(spec, max(x + max(shifts), 4), threads)
    start = max(3, 3 - min(shifts))
    pi = 0
    pi_hat = Fraction(0)
    for t in range(start, x):
        prod = 1
        prod_hat = Fraction(1)
        for r in shifts:
            row = tab.row(t + r)
            prod *= row.m
            prod_hat *= row.mhat
        pi += prod
        pi_hat += prod_hat
    return pi, pi_hat


# --- periodic approximants ---------------------------------------------------------

def beta_period(spec: GroupSpec, P: int, M: int) -> int:
    n = spec.level
    out = n * n * 2 ** (2 * M + 3)
    for p in primes_upto(P).tolist():
        if p > 2:
            out *= p ** (2 * M + 1)
    return out


def _smooth_ok(u: int, ps: list[int], M: int) -> bool:
    for p in ps:
        e = 0
        while u % p == 0:
            u //= p
            e += 1
        if e > M:
            return False
    return u == 1


def beta_approximant(spec: GroupSpec, P: int, M: int, t: int) -> float:
    if P < 2 or M < 1:
        raise DomainError("need P >= 2 and M >= 1")
    _check_t(t)
    ps = primes_upto(P).tolist()
    total = 0.0
    for u, D, j in divisor_profile(t).entries:
        if not _smooth_ok(u, ps, M):
            continue
        euler = 1.0
        for p in ps:
            euler /= 1.0 - kronecker(D, p) / p
        total += omega(spec, t, u) * euler / u
    return total


def progression_mean(spec: GroupSpec, N: int, m_res: int, x: int, threads: int | None = None) -> float:
    """(1/x) sum of I(t) over 3 <= t <= x with t = m mod N."""
    if N < 1:
        raise DomainError("N must be positive")
    tab = spectrum_table(spec, x + 1, threads)
    return sum(r.I for r in tab.rows if (r.t - m_res) % N == 0) / x


def li(x: float) -> float:
    from .coefficients import li_k

    return li_k(x, 1)


def trace_power(s: int, j: int) -> int:
    return chebyshev_trace(s, j)
