"""Local factors and Euler products for the correlation constants, li_k, empirical reports."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from scipy import integrate

from .arith import DomainError, primes_upto, valuation
from .finite_sl2 import FULL, GroupSpec, NoClosedForm, ResourceGuard, image_order, trace_histogram

BRUTE_MODULUS_CAP = 20000


@dataclass(frozen=True)
class LocalFactor:
    p: int
    k: int
    shifts: tuple
    value: Fraction | float
    method: str  # "closed" or "brute"
    depth: int | None = None
    tail: float | None = None
    history: tuple = ()

    def as_dict(self) -> dict:
        d = {"p": self.p, "method": self.method, "depth": self.depth}
        if isinstance(self.value, Fraction):
            d["value_num"] = self.value.numerator
            d["value_den"] = self.value.denominator
        else:
            d["value_float"] = self.value
        if self.tail is not None:
            d["tail_estimate"] = self.tail
        return d


@dataclass
class EulerProduct:
    value: float
    exact: Fraction | None
    tail_factor: float
    tail_bound: float
    C: float
    factors: list = field(default_factory=list)


@dataclass
class CorrelationReport:
    spec: str
    k: int
    shifts: tuple
    x: int
    pi_k: int
    li_k: float
    c_empirical: float
    c_predicted: float
    c_predicted_tail_bound: float
    ratio: float
    local_factors: list

    def as_dict(self) -> dict:
        return {
            "spec": self.spec,
            "k": self.k,
            "shifts": list(self.shifts),
            "x": self.x,
            "pi_k": self.pi_k,
            "li_k": self.li_k,
            "c_empirical": self.c_empirical,
            "c_predicted": self.c_predicted,
            "c_predicted_tail_bound": self.c_predicted_tail_bound,
            "ratio": self.ratio,
            "local_factors": [f.as_dict() for f in self.local_factors],
        }


# --- li_k ----------------------------------------------------------------------

def li_k(x: float, k: int) -> float:
    """int_2^x (log t)^-k dt, computed as int e^u u^-k du over [log 2, log x]."""
    if x < 2:
        raise DomainError("li_k needs x >= 2")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if x == 2:
        return 0.0
    a, b = math.log(2.0), math.log(x)
    # scale by e^b so the integrand stays O(1) near the upper end
    f = lambda u: math.exp(u - b) * u ** (-k)
    val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=500)
    return val * math.exp(b)


# --- exact sums over trace types -------------------------------------------------

def _family(k: int, d: Fraction, x: Fraction, a: Fraction, b: Fraction, y: Fraction, s0: int) -> Fraction:
    """sum_{s >= s0} d x^s (a + b y^s)^k in closed form, via the binomial expansion."""
    out = Fraction(0)
    for j in range(k + 1):
        coef = comb(k, j) * a ** (k - j) * b**j
        if coef == 0:
            continue
        z = x * y**j
        out += coef * d * z**s0 / (1 - z)
    return out


def _finite(k: int, pairs) -> Fraction:
    return sum((d * w**k for d, w in pairs), Fraction(0))


def _full_odd_factor(p: int, k: int) -> Fraction:
    P = Fraction(p)
    up = P / (P - 1)
    out = _finite(k, [((P - 3) / (2 * P), up), ((P - 1) / (2 * P), P / (P + 1))])
    x = 1 / P**2
    # p^l || t^2-4 with l = 2s even: unit part a residue or not
    out += _family(k, (P - 1) / P, x, up, Fraction(0), Fraction(1), 1)
    out += _family(k, (P - 1) / P, x, up, -2 * P / (P * P - 1), 1 / P, 1)
    # l = 2s + 1 odd
    out += _family(k, 2 * (P - 1) / P**2, x, up, -1 / (P - 1), 1 / P, 0)
    return out


def _full_two_factor(k: int) -> Fraction:
    h, q = Fraction(1, 2), Fraction(1, 4)
    out = _finite(k, [(h, Fraction(2, 3)), (q, Fraction(1))])
    # l = 2s + 1 >= 3
    out += _family(k, h, q, Fraction(2), Fraction(-1), h, 1)
    # l = 2s >= 4, four classes of the odd part mod 8
    out += _family(k, q, q, Fraction(2), Fraction(0), Fraction(1), 2)
    out += _family(k, q, q, Fraction(2), Fraction(-2, 3), h, 2)
    out += 2 * _family(k, q, q, Fraction(2), Fraction(-1), h, 2)
    return out


def _gamma0_factor(p: int, N: int, k: int) -> Fraction:
    P = Fraction(p)
    e = P - 1
    out = Fraction(0)
    # l < N: only even l with residue unit part survive
    pairs = [((P - 3) / (2 * P), 2 * P / e)]
    for s in range(1, (N + 1) // 2):
        if 2 * s < N:
            pairs.append(((P - 1) * P ** (-2 * s - 1), 2 * P ** (s + 1) / e))
    out += _finite(k, pairs)
    alpha = P ** (N + 1 - (N + 1) // 2) + P ** (N - N // 2)
    x = 1 / P**2
    s_even = (N + 1) // 2
    s_odd = N // 2
    out += _family(k, (P - 1) / P, x, alpha / e, Fraction(0), Fraction(1), s_even)
    out += _family(k, (P - 1) / P, x, alpha / e, -2 * P**N / e, 1 / P, s_even)
    out += _family(k, 2 * (P - 1) / P**2, x, alpha / e, -(P**N + P ** (N - 1)) / e, 1 / P, s_odd)
    return out


def _hat_factor(p: int, N: int, k: int) -> Fraction:
    P = Fraction(p)
    g = 2 / P ** (2 * N)
    base = P ** (2 * N - 1)
    out = _finite(k, [(g * (P - 1) / (2 * P), base * (P + 1) / 2), (g * (P - 1) / (2 * P), base * (P - 1) / 2)])
    x = 1 / P**2
    top = (P ** (2 * N) + P ** (2 * N - 1)) / 2
    out += _family(k, g * (P - 1) / (2 * P), x, top, Fraction(0), Fraction(1), 1)
    out += _family(k, g * (P - 1) / (2 * P), x, top, -(P ** (2 * N - 1)), 1 / P, 1)
    out += _family(k, g * (P - 1) / P**2, x, top, -(P ** (2 * N - 1) + P ** (2 * N - 2)) / 2, 1 / P, 0)
    return out


@lru_cache(maxsize=None)
def local_factor_closed(spec: GroupSpec, p: int, k: int, shifts: tuple | None = None) -> Fraction:
    """Exact local factor at p for zero shifts, summed class by class."""
    if shifts is not None and any(shifts):
        raise NoClosedForm("closed forms cover zero shifts only")
    if k < 1:
        raise DomainError("k must be positive")
    if k == 1:
        return Fraction(1)
    N = 0 if spec.is_full() or spec.N % p else valuation(spec.N, p)
    if N == 0:
        return _full_two_factor(k) if p == 2 else _full_odd_factor(p, k)
    if p == 2:
        raise NoClosedForm("no closed form at p = 2 dividing the level")
    if spec.kind == "gamma0":
        return _gamma0_factor(p, N, k)
    return _hat_factor(p, N, k)


# --- the factors exactly as printed ------------------------------------------------

def printed_full_constant(p: int, k: int) -> Fraction:
    """The displayed k = 2, 3 per-prime factors for the full group."""
    if p == 2:
        return {2: Fraction(1015, 864), 3: Fraction(682495, 428544)}[k]
    if k == 2:
        return Fraction(p * p * (p**3 + p * p - p - 3), (p - 1) ** 2 * (p + 1) ** 3)
    if k == 3:
        return Fraction(
            p**8 + p**7 + p**6 - 5 * p**5 - 5 * p**3 - 5 * p * p - p - 1,
            (p - 1) ** 2 * (p + 1) ** 2 * (p**4 + p**3 + p * p + p + 1),
        )
    raise NoClosedForm("printed constants exist for k = 2, 3 only")


def printed_level_constant(spec: GroupSpec, p: int, k: int) -> Fraction:
    N = valuation(spec.N, p)
    if spec.kind == "gamma0":
        if k == 2:
            return Fraction(2 * p * (N * p * p - p - N), (p - 1) ** 2 * (p + 1))
        even = N % 2 == 0
        if even:
            h1 = (p + 1) * (p**6 + 2 * p**5 + 5 * p**4 + 2 * p**3 + 5 * p * p + 2 * p + 1)
            h2 = (p + 1) ** 2 * (p**4 + 3 * p**3 + p * p + 3 * p + 1)
        else:
            h1 = 2 * (4 * p**6 + 9 * p**5 + 14 * p**4 + 12 * p**3 + 14 * p * p + 9 * p + 4)
            h2 = 2 * (p + 1) * (p + 3) * (p**4 + p**3 + p * p + p + 1)
        return Fraction(
            p * p * (p ** ((N - 1) // 2) * h1 - 2 * h2),
            (p - 1) ** 3 * (p + 1) * (p**4 + p**3 + p * p + p + 1),
        )
    if k == 2:
        return Fraction(p ** (2 * N - 1) * (p * p + p + 1), 2 * (p + 1))
    return Fraction(
        p ** (4 * N - 2) * (p**6 + p**5 + 4 * p**4 + p**3 + 4 * p * p + p + 1),
        4 * (p**4 + p**3 + p * p + p + 1),
    )


def printed_constant(spec: GroupSpec, p: int, k: int) -> Fraction:
    if spec.is_full() or spec.N % p:
        return printed_full_constant(p, k)
    return printed_level_constant(spec, p, k)


def _geom_terms(k, terms):
    return sum((c * _family(k, *t) for c, t in terms), Fraction(0))


def printed_series(p: int, k: int) -> Fraction:
    """The displayed general-k series for the full group, read literally."""
    if p == 2:
        out = Fraction(1, 2) * Fraction(2, 3) ** k + Fraction(1, 4) + Fraction(2) ** (k - 6)
        out += Fraction(3, 64) * Fraction(5, 3) ** k
        h, q = Fraction(1, 2), Fraction(1, 4)
        # odd l = 2s+1 >= 3: 2^(k-l) (1 - 2^-(s+1))^k
        out += _family(k, Fraction(2) ** k * h, q, Fraction(1), -h, h, 1)
        # even l = 2s >= 6: 2^(k-l-2) (1 - 3 (1 - (2/3) 2^-s)^k)
        d = Fraction(2) ** k * q
        out += _family(0, d, q, Fraction(1), Fraction(0), Fraction(1), 3)
        out -= 3 * _family(k, d, q, Fraction(1), Fraction(-2, 3), h, 3)
        return out
    P = Fraction(p)
    iq = 1 / P
    out = (Fraction(1, 2) * (1 - 3 * iq) * (1 + iq) ** (-k) + Fraction(1, 2) * (1 - iq) ** (1 - k)
           + iq * iq * (1 + iq) * (1 - iq) ** (-k))
    x = 1 / P**2
    out += _family(k, 2 * P * (1 - iq) ** (1 - k), x, Fraction(1), Fraction(-1), iq, 1)
    out += _family(k, (1 - iq) * (1 - iq * iq) ** (-k), x, 1 + iq, -2 * iq, iq, 1)
    return out


# --- brute-force limit engine ---------------------------------------------------

def _check_depth(spec: GroupSpec, p: int, L: int) -> None:
    if not spec.is_full() and spec.N % p == 0 and L < valuation(spec.N, p):
        raise DomainError("depth below level")


def local_factor_bruteforce(spec: GroupSpec, p: int, k: int, shifts, L: int) -> LocalFactor:
    """v_l = p^{l(k-1)} sum_m prod_i F(m + r_i; p^l) for l = 1..L; returns v_L."""
    shifts = tuple(int(s) for s in shifts)
    if len(shifts) != k:
        raise DomainError("need one shift per factor")
    if L < 1:
        raise DomainError("depth must be positive")
    _check_depth(spec, p, L)
    if p**L > BRUTE_MODULUS_CAP:
        raise ResourceGuard(f"p^L = {p ** L} exceeds the brute-force cap {BRUTE_MODULUS_CAP}")
    hist = []
    for l in range(1, L + 1):
        n = p**l
        h = [int(c) for c in trace_histogram(spec, n)]
        G = image_order(spec, n)
        num = 0
        for m in range(n):
            prod = 1
            for r in shifts:
                prod *= h[(m + r) % n]
                if prod == 0:
                    break
            num += prod
        hist.append(Fraction(num * n ** (k - 1), G**k))
    vL = hist[-1]
    tail = abs(float(vL - hist[-2])) * p / (p - 1) if L >= 2 else float("inf")
    return LocalFactor(p, k, shifts, vL, "brute", L, tail, tuple(hist))


def max_depth(p: int, L: int, cap: int | None = None) -> int:
    cap = BRUTE_MODULUS_CAP if cap is None else cap
    d = 1
    while d < L and p ** (d + 1) <= cap:
        d += 1
    return d


def local_factor(spec: GroupSpec, p: int, k: int, shifts, L: int) -> LocalFactor:
    shifts = tuple(int(s) for s in shifts)
    if not any(shifts):
        try:
            return LocalFactor(p, k, shifts, local_factor_closed(spec, p, k), "closed")
        except NoClosedForm:
            pass
    depth = max_depth(p, L)
    if not spec.is_full() and spec.N % p == 0:
        depth = max(depth, valuation(spec.N, p) + 1)
    return local_factor_bruteforce(spec, p, k, shifts, depth)


def _prime_zeta2_tail(P: int, X: int = 10**7) -> float:
    """sum_{p > P} p^-2: explicit up to X plus the integral tail 1/(X log X)."""
    ps = primes_upto(X).astype(float)
    return float(np.sum(1.0 / ps[ps > P] ** 2)) + 1.0 / (X * math.log(X))


def euler_product(spec: GroupSpec, k: int, shifts, P: int, L: int, threads: int = 1) -> EulerProduct:
    if P < 3:
        raise DomainError("prime cutoff must be at least 3")
    shifts = tuple(int(s) for s in shifts)
    if len(shifts) != k:
        raise DomainError("need one shift per factor")
    ps = [int(p) for p in primes_upto(P)]
    if not spec.is_full():
        from .arith import factorize
        ps = sorted(set(ps) | set(factorize(spec.N)))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        factors = list(ex.map(lambda p: local_factor(spec, p, k, shifts, L), ps))
    exact = Fraction(1)
    value = 1.0
    for f in factors:
        value *= float(f.value)
        if exact is not None and isinstance(f.value, Fraction) and f.method == "closed":
            exact *= f.value
        else:
            exact = None
    if exact is not None:
        value = float(exact)
    # tail constant from the last ten primes at or below P that are not at the level
    tail_ps = [f for f in factors if f.p <= P and (spec.is_full() or spec.N % f.p)][-10:]
    C = max((abs(math.log(float(f.value))) * f.p**2 for f in tail_ps), default=0.0)
    signed = sum(math.log(float(f.value)) * f.p**2 for f in tail_ps) / max(len(tail_ps), 1)
    S = _prime_zeta2_tail(P)
    tail_factor = math.exp(signed * S)
    tail_bound = abs(value) * (math.exp(C * S) - 1.0)
    return EulerProduct(value, exact, tail_factor, tail_bound, C, factors)


def compare_empirical(spec: GroupSpec, k: int, shifts, x: int, P: int = 100, L: int = 6,
                      threads: int = 1) -> CorrelationReport:
    from .spectra import correlation_sum, spectrum_table

    shifts = tuple(int(s) for s in shifts)
    if len(shifts) != k:
        raise DomainError("need one shift per factor")
    if k == 1:
        tab = spectrum_table(spec, x + max(shifts[0], 0), threads=threads)
        pi = sum(tab.m_of(t + shifts[0]) for t in range(max(3, 3 - shifts[0]), x))
    else:
        pi, _ = correlation_sum(spec, k, shifts, x, threads=threads)
    lk = li_k(float(x) ** (k + 1), k)
    ep = euler_product(spec, k, shifts, P, L, threads=threads)
    c_emp = pi / lk
    return CorrelationReport(
        str(spec), k, shifts, x, int(pi), lk, c_emp, ep.value, ep.tail_bound,
        pi / (ep.value * lk), ep.factors,
    )
