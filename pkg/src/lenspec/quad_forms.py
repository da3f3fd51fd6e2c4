"""Indefinite binary quadratic forms, Pell solutions and narrow class numbers."""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np
from scipy import special

from .arith import (
    DomainError,
    chebyshev_roots,
    chebyshev_u,
    divisors_from,
    divisors_spf,
    factorize,
    is_square,
    kronecker_primes,
    merge_factors,
    primes_upto,
    spf_table,
)


class BoundExceeded(RuntimeError):
    pass


class InconsistentPower(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    @property
    def primitive(self) -> bool:
        return self.content == 1

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def act(self, g) -> "QuadForm":
        """Q o g for g = ((p, q), (r, s)), i.e. Q(px + qy, rx + sy)."""
        (p, q), (r, s) = g
        a, b, c = self.a, self.b, self.c
        return QuadForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )


@dataclass(frozen=True)
class PellSolution:
    D: int
    t: int
    u: int
    j: int = 1

    def __post_init__(self):
        if self.t * self.t - self.D * self.u * self.u != 4:
            raise DomainError(f"({self.t},{self.u}) does not solve t^2 - {self.D} u^2 = 4")

    @property
    def log_eps(self) -> float:
        return unit_log(self.t, self.u, self.D)


@dataclass(frozen=True)
class TraceClass:
    t: int
    entries: tuple  # (u, D, j) sorted by u


def check_discriminant(D: int) -> int:
    if D <= 0 or D % 4 not in (0, 1) or is_square(D):
        raise DomainError(f"{D} is not a valid indefinite discriminant")
    return D


def unit_log(t: int, u: int, D: int) -> float:
    # for huge t the correction term log(1 + u sqrt(D)/t) is below double precision anyway
    if t < 10**150:
        return math.log((t + u * math.sqrt(D)) / 2)
    return math.log(t)


def t_squared_minus_4(t: int) -> dict[int, int]:
    """Factorisation of t^2 - 4, from t - 2 and t + 2 separately."""
    return merge_factors(factorize(t - 2), factorize(t + 2))


def pell_power(sol: PellSolution, j: int) -> tuple[int, int]:
    t1, u1, D = sol.t, sol.u, sol.D
    t, u = t1, u1
    for _ in range(j - 1):
        t, u = (t1 * t + D * u1 * u) // 2, (t1 * u + u1 * t) // 2
    return t, u


_pell_memo: dict[int, PellSolution] = {}
_pell_fail: dict[int, int] = {}
_pell_lock = threading.Lock()


def fundamental_solution(D: int, t_bound: int) -> PellSolution:
    """Smallest t >= 3 with (t^2-4)/D a square, by ascending search below t_bound."""
    check_discriminant(D)
    hit = _pell_memo.get(D)
    if hit is not None:
        if hit.t > t_bound:
            raise BoundExceeded(f"fundamental solution of {D} exceeds t = {t_bound}")
        return hit
    start = _pell_fail.get(D, 2) + 1
    for t in range(start, t_bound + 1):
        q = t * t - 4
        if q % D == 0 and is_square(q // D):
            sol = PellSolution(D, t, isqrt(q // D), 1)
            with _pell_lock:
                _pell_memo[D] = sol
            return sol
    with _pell_lock:
        _pell_fail[D] = max(_pell_fail.get(D, 2), t_bound)
    raise BoundExceeded(f"no solution of t^2 - {D}u^2 = 4 with t <= {t_bound}")


def power_index(t: int, u: int) -> int:
    """j with (t + u sqrt D)/2 = eps(D)^j."""
    if t < 3 or u < 1 or (t * t - 4) % (u * u):
        raise DomainError(f"(t,u) = ({t},{u}) is not admissible")
    D = check_discriminant((t * t - 4) // (u * u))
    # candidate roots: tau_j(s) = t with u = u' V_j(s)
    best = (1, t, u)
    j = 2
    while 3**j <= 4 * t:
        s = chebyshev_roots(t, j)
        if s is not None:
            v = chebyshev_u(s, j)
            if u % v == 0 and s * s - D * (u // v) ** 2 == 4:
                best = (j, s, u // v)
        j += 1
    j, s, u1 = best
    # iterate the root through the recurrence to make sure it lands on (t, u)
    if pell_power(PellSolution(D, s, u1), j) != (t, u):
        raise InconsistentPower(f"({t},{u}) is not a power of ({s},{u1})")
    return j


def divisor_profile(t: int) -> TraceClass:
    if t < 3:
        raise DomainError("trace must be at least 3")
    fac = t_squared_minus_4(t)
    half = {p: e // 2 for p, e in fac.items() if e >= 2}
    T = t * t - 4
    entries = []
    for u in divisors_from(half):
        D = T // (u * u)
        if D % 4 in (0, 1):
            entries.append((u, D, power_index(t, u)))
    return TraceClass(t, tuple(entries))


# --- reduction theory -------------------------------------------------------

_spf_cache: list = []
_spf_lock = threading.Lock()
SPF_MAX = 5 * 10**7


def _divisors(n: int) -> list[int]:
    if n <= SPF_MAX:
        with _spf_lock:
            if len(_spf_cache) <= n:
                size = max(n, 2 * len(_spf_cache), 1 << 16)
                _spf_cache[:] = spf_table(min(size, SPF_MAX))
            spf = _spf_cache
        return divisors_spf(n, spf)
    return divisors_from(factorize(n))


def is_reduced(f: QuadForm, D: int | None = None) -> bool:
    """0 < b < sqrt D and sqrt D - b < 2|a| < sqrt D + b, in exact integers."""
    D = f.disc if D is None else D
    a2, b = 2 * abs(f.a), f.b
    if b <= 0 or b * b >= D:
        return False
    return (a2 + b) ** 2 > D and (a2 - b <= 0 or (a2 - b) ** 2 < D)


def reduced_forms(D: int, primitive: bool = True) -> list[QuadForm]:
    check_discriminant(D)
    R = isqrt(D)
    out = []
    for b in range(2 - D % 2, R + 1, 2):
        n = (D - b * b) // 4
        for a in _divisors(n):
            if (2 * a + b) ** 2 > D and (2 * a - b <= 0 or (2 * a - b) ** 2 < D):
                c = n // a
                if primitive and gcd(gcd(a, b), c) != 1:
                    continue
                out.append(QuadForm(a, b, -c))
                out.append(QuadForm(-a, b, c))
    return sorted(out, key=lambda f: (f.a, f.b, f.c))


def rho(f: QuadForm, R: int | None = None) -> tuple[QuadForm, int]:
    """Neighbour [c, r, (r^2-D)/4c] with r = -b mod 2|c| and sqrt D - 2|c| < r < sqrt D.

    Returns the neighbour and s with f o [[0,-1],[1,s]] = neighbour.
    """
    D = f.disc
    R = isqrt(D) if R is None else R
    c = f.c
    r = R - (R + f.b) % (2 * abs(c))
    return QuadForm(c, r, (r * r - D) // (4 * c)), (r + f.b) // (2 * c)


def cycle(f: QuadForm) -> list[QuadForm]:
    R = isqrt(f.disc)
    out = [f]
    g, _ = rho(f, R)
    while g != f:
        out.append(g)
        g, _ = rho(g, R)
    return out


def cycles(D: int) -> list[list[QuadForm]]:
    left = set(reduced_forms(D))
    out = []
    for f in reduced_forms(D):
        if f in left:
            cyc = cycle(f)
            left.difference_update(cyc)
            out.append(cyc)
    return out


def class_number(D: int) -> int:
    """Narrow class number: number of rho-cycles of reduced primitive forms."""
    return len(cycles(D))


def automorph(f: QuadForm) -> tuple[int, int, int, int]:
    """Product of the rho step matrices around the cycle of f; it fixes f."""
    R = isqrt(f.disc)
    M = (1, 0, 0, 1)
    g = f
    while True:
        g2, s = rho(g, R)
        A, B, C, E = M
        M = (B, s * B - A, E, s * E - C)
        g = g2
        if g == f:
            return M


def fundamental_unit(D: int) -> PellSolution:
    """Narrow fundamental solution read off the cycle automorph (no size limit on t)."""
    check_discriminant(D)
    hit = _pell_memo.get(D)
    if hit is not None:
        return hit
    f = reduced_forms(D)[0]
    M = automorph(f)
    t = abs(M[0] + M[3])
    u = abs(M[2]) // abs(f.a)
    sol = PellSolution(D, t, u, 1)
    with _pell_lock:
        _pell_memo[D] = sol
    return sol


# --- L-values ---------------------------------------------------------------

def dirichlet_L(D: int, cutoff: int) -> float:
    """Euler product of (D/p) over p <= cutoff, evaluated at s = 1."""
    check_discriminant(D)
    if cutoff < 100:
        raise DomainError("cutoff must be at least 100")
    ps = primes_upto(cutoff)
    chi = kronecker_primes(D, ps)
    return float(np.exp(-np.sum(np.log1p(-chi / ps))))


def class_formula_L(D: int) -> float:
    """h(D) log eps(D) / sqrt(D): the value the Euler product should approach."""
    return class_number(D) * fundamental_unit(D).log_eps / math.sqrt(D)


def fundamental_part(D: int) -> tuple[int, int]:
    """D = d0 f^2 with d0 a fundamental discriminant."""
    fac = factorize(D)
    core = 1
    f = 1
    for p, e in fac.items():
        core *= p ** (e % 2)
        f *= p ** (e // 2)
    if core % 4 != 1:
        core *= 4
        f //= 2
    return core, f


@lru_cache(maxsize=4096)
def l_value(D: int) -> float:
    """L(1, (D/.)) to near double precision.

    Uses the smoothed series for the primitive character of conductor q = d0,
    sum chi(n) [erfc(n sqrt(pi/q))/n + E1(pi n^2/q)/sqrt(q)], then removes the
    Euler factors at primes dividing the conductor f of D = d0 f^2.
    """
    check_discriminant(D)
    q, f = fundamental_part(D)
    N = int(6.5 * math.sqrt(q)) + 10
    ps = primes_upto(N)
    chi_p = dict(zip(ps.tolist(), kronecker_primes(q, ps).tolist()))
    chi = np.zeros(N + 1)
    chi[1] = 1.0
    spf = spf_table(N)
    for n in range(2, N + 1):
        p = spf[n]
        chi[n] = chi_p[p] * chi[n // p]
    n = np.arange(1, N + 1, dtype=float)
    x = math.pi * n * n / q
    terms = chi[1:] * (special.erfc(np.sqrt(x)) / n + special.exp1(x) / math.sqrt(q))
    val = float(np.sum(terms))
    for p in factorize(f) if f > 1 else {}:
        val *= 1 - int(kronecker_primes(q, np.array([p]))[0]) / p
    return val


# --- forms <-> matrices -----------------------------------------------------

def matrix_of(Q: QuadForm, s: PellSolution) -> tuple[tuple[int, int], tuple[int, int]]:
    if Q.disc != s.D:
        raise DomainError("discriminant mismatch")
    if (s.t - Q.b * s.u) % 2:
        raise DomainError("t and b u must have the same parity")
    t, u = s.t, s.u
    return (((t + Q.b * u) // 2, -Q.c * u), (Q.a * u, (t - Q.b * u) // 2))


def form_of(g) -> tuple[QuadForm, int, int, int]:
    (g11, g12), (g21, g22) = g
    if g11 * g22 - g12 * g21 != 1:
        raise DomainError("determinant must be 1")
    t = g11 + g22
    if abs(t) <= 2:
        raise DomainError("not hyperbolic")
    if t < 0:
        g11, g12, g21, g22, t = -g11, -g12, -g21, -g22, -t
    u = gcd(gcd(g21, g11 - g22), g12)
    Q = QuadForm(g21 // u, (g11 - g22) // u, -g12 // u)
    return Q, t, u, (t * t - 4) // (u * u)
