"""SL2(Z/nZ), congruence images, trace distributions, cosets and permutation characters."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import DomainError, ResourceGuard, factorize, legendre, sqrt_of_one, valuation

MAX_ELEMENTS = 10**8
MAX_COSETS = 10**6
MAX_CONJ = 10**7
# the factored trace counter touches n^2 (a, d) pairs and n^2 (b, c) pairs
MAX_PAIR_WORK = 10**9


class NoClosedForm(LookupError):
    pass


@dataclass(frozen=True)
class ModMatrix:
    n: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        n = self.n
        object.__setattr__(self, "a", self.a % n)
        object.__setattr__(self, "b", self.b % n)
        object.__setattr__(self, "c", self.c % n)
        object.__setattr__(self, "d", self.d % n)
        if (self.a * self.d - self.b * self.c - 1) % n:
            raise DomainError(f"determinant is not 1 mod {n}")

    @classmethod
    def of(cls, g, n: int) -> "ModMatrix":
        (a, b), (c, d) = g
        return cls(n, a, b, c, d)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.n

    def __mul__(self, o: "ModMatrix") -> "ModMatrix":
        if o.n != self.n:
            raise DomainError("modulus mismatch")
        return ModMatrix(
            self.n,
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inv(self) -> "ModMatrix":
        return ModMatrix(self.n, self.d, -self.b, -self.c, self.a)

    def __pow__(self, j: int) -> "ModMatrix":
        out = ModMatrix(self.n, 1, 0, 0, 1)
        base = self if j >= 0 else self.inv()
        j = abs(j)
        while j:
            if j & 1:
                out = out * base
            base = base * base
            j >>= 1
        return out

    def scaled(self, alpha: int) -> "ModMatrix":
        return ModMatrix(self.n, alpha * self.a, alpha * self.b, alpha * self.c, alpha * self.d)

    def projective_key(self) -> tuple[int, int, int, int]:
        """Canonical representative modulo scalars alpha I with alpha^2 = 1."""
        n = self.n
        return min(
            ((al * self.a) % n, (al * self.b) % n, (al * self.c) % n, (al * self.d) % n)
            for al in sqrt_of_one(n)
        )


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "full", "gamma0" or "hat"
    N: int = 1

    def __post_init__(self):
        if self.kind not in ("full", "gamma0", "hat"):
            raise DomainError(f"unknown group kind {self.kind!r}")
        if self.N < 1:
            raise DomainError("level must be positive")
        if self.kind == "full" and self.N != 1:
            raise DomainError("full group has level 1")

    @classmethod
    def parse(cls, s: str) -> "GroupSpec":
        s = s.strip().lower()
        if s == "full":
            return cls("full", 1)
        m = re.fullmatch(r"(gamma0|hat):(\d+)", s)
        if not m:
            raise DomainError(f"cannot parse group spec {s!r}")
        return cls(m.group(1), int(m.group(2)))

    def __str__(self) -> str:
        return "full" if self.kind == "full" else f"{self.kind}:{self.N}"

    @property
    def level(self) -> int:
        return 1 if self.kind == "full" else self.N

    def local_level(self, p: int, r: int) -> int:
        if self.kind == "full" or self.N % p:
            return 0
        return min(r, valuation(self.N, p))

    def is_full(self) -> bool:
        return self.kind == "full" or self.N == 1


FULL = GroupSpec("full")


def group_order(n: int) -> int:
    if n < 1:
        raise DomainError("modulus must be positive")
    out = 1
    for p, r in factorize(n).items() if n > 1 else []:
        out *= p ** (3 * r - 2) * (p * p - 1)
    return out


def _q(spec: GroupSpec, n: int) -> int:
    return 1 if spec.is_full() else gcd(n, spec.N)


def image_order(spec: GroupSpec, n: int) -> int:
    q = _q(spec, n)
    if q == 1:
        return group_order(n)
    if spec.kind == "gamma0":
        idx = q
        for p in factorize(q):
            idx = idx * (p + 1) // p
        return group_order(n) // idx
    return group_order(n) // group_order(q) * len(sqrt_of_one(q))


def in_image(spec: GroupSpec, g: ModMatrix) -> bool:
    q = _q(spec, g.n)
    if q == 1:
        return True
    if spec.kind == "gamma0":
        return g.c % q == 0
    if g.b % q or g.c % q or (g.a - g.d) % q:
        return False
    return (g.a * g.a - 1) % q == 0


def _image_mask(spec: GroupSpec, n: int, E: np.ndarray) -> np.ndarray:
    q = _q(spec, n)
    if q == 1:
        return np.ones(len(E), dtype=bool)
    a, b, c, d = E.T
    if spec.kind == "gamma0":
        return c % q == 0
    return (b % q == 0) & (c % q == 0) & ((a - d) % q == 0) & ((a * a - 1) % q == 0)


@lru_cache(maxsize=16)
def sl2_elements(n: int) -> np.ndarray:
    """All of SL2(Z/n) as rows (a, b, c, d), lexicographic in (a, b, c, d)."""
    if group_order(n) > MAX_ELEMENTS:
        raise ResourceGuard(f"SL2(Z/{n}) has more than {MAX_ELEMENTS} elements")
    r = np.arange(n, dtype=np.int64)
    B, C = np.meshgrid(r, r, indexing="ij")
    B, C = B.ravel(), C.ravel()
    V = (1 + B * C) % n
    chunks = []
    for a in range(n):
        # d values solving a d = v, grouped by v
        ad = (a * r) % n
        order = np.argsort(ad, kind="stable")
        sorted_ad = ad[order]
        lo = np.searchsorted(sorted_ad, V, side="left")
        hi = np.searchsorted(sorted_ad, V, side="right")
        cnt = hi - lo
        keep = cnt > 0
        if not keep.any():
            continue
        rep = np.repeat(np.arange(len(V))[keep], cnt[keep])
        offs = np.arange(rep.size) - np.repeat(np.cumsum(cnt[keep]) - cnt[keep], cnt[keep])
        dd = order[np.repeat(lo[keep], cnt[keep]) + offs]
        rows = np.column_stack([np.full(rep.size, a), B[rep], C[rep], dd])
        chunks.append(rows)
    E = np.concatenate(chunks)
    E = E[np.lexsort((E[:, 3], E[:, 2], E[:, 1], E[:, 0]))]
    E.setflags(write=False)
    return E


@dataclass(frozen=True)
class SubgroupImage:
    spec: GroupSpec
    n: int

    @property
    def order(self) -> int:
        return image_order(self.spec, self.n)

    def contains(self, g: ModMatrix) -> bool:
        return in_image(self.spec, g)

    def elements(self) -> np.ndarray:
        if self.order > MAX_ELEMENTS or group_order(self.n) > MAX_ELEMENTS:
            raise ResourceGuard("image too large to enumerate")
        E = sl2_elements(self.n)
        return E[_image_mask(self.spec, self.n, E)]


def subgroup_image(spec: GroupSpec, n: int) -> SubgroupImage:
    if n < 2:
        raise DomainError("modulus must be at least 2")
    return SubgroupImage(spec, n)


# --- trace distributions ------------------------------------------------------

@lru_cache(maxsize=256)
def trace_histogram(spec: GroupSpec, n: int) -> tuple[int, ...]:
    """#{g in image : tr g = m} for every m, by exhaustive counting.

    Every element is (a, b, c, d) with ad - bc = 1 and the image conditions
    split into a condition on (a, d) and one on (b, c).  We tabulate how many
    allowed (b, c) give each product bc, then run over all allowed (a, d).
    """
    if 2 * n * n > MAX_PAIR_WORK:
        raise ResourceGuard(f"trace count at modulus {n} exceeds the work guard")
    q = _q(spec, n)
    r = np.arange(n, dtype=np.int64)
    bs = r if (q == 1 or spec.kind == "gamma0") else r[r % q == 0]
    cs = r if q == 1 else r[r % q == 0]
    Nbc = np.zeros(n, dtype=np.int64)
    for b in bs.tolist():
        Nbc += np.bincount((b * cs) % n, minlength=n)
    counts = np.zeros(n, dtype=np.int64)
    if spec.kind == "hat" and q > 1:
        roots = sqrt_of_one(q)
        ok_a = np.zeros(n, dtype=bool)
        for al in roots:
            ok_a |= (r - al) % q == 0
        for a in r[ok_a].tolist():
            al = a % q
            d = r[(r - al) % q == 0]
            np.add.at(counts, (a + d) % n, Nbc[(a * d - 1) % n])
    else:
        for a in range(n):
            counts += np.roll(Nbc[(a * r - 1) % n], a)
    total = int(counts.sum())
    assert total == image_order(spec, n), (spec, n, total)
    return tuple(int(x) for x in counts)


def trace_histogram_enumerated(spec: GroupSpec, n: int) -> tuple[int, ...]:
    """Same table, by walking the element list one matrix at a time."""
    E = subgroup_image(spec, n).elements()
    return tuple(int(x) for x in np.bincount((E[:, 0] + E[:, 3]) % n, minlength=n))


def trace_count_bruteforce(spec: GroupSpec, n: int, m: int) -> tuple[int, Fraction]:
    h = trace_histogram(spec, n)
    c = h[m % n]
    return c, Fraction(c, sum(h))


# --- closed forms ------------------------------------------------------------

def _val(x: int, p: int, cap: int) -> int:
    return cap if x == 0 else min(valuation(x, p), cap)


def _full_odd(p: int, r: int, t: int) -> int:
    n = p**r
    T = (t * t - 4) % n
    if T == 0:
        return p ** (2 * r) + p ** (2 * r - 1) - p ** ((3 * r - 1) // 2)
    l = _val(T, p, r)
    w = T // p**l
    if l == 0:
        return p ** (2 * r - 1) * (p + legendre(T, p))
    if l % 2 == 0:
        if legendre(w, p) == 1:
            return p ** (2 * r - 1) * (p + 1)
        return p ** (2 * r) + p ** (2 * r - 1) - 2 * p ** (2 * r - l // 2 - 1)
    return p ** (2 * r) + p ** (2 * r - 1) - p ** (2 * r - (l + 1) // 2) - p ** (2 * r - (l + 3) // 2)


def _two_adic_split(t: int, r: int) -> tuple[int, int, int]:
    """For t = 2 mod 4, t != +-2: (sigma, l, t1) with t - 2 sigma = 2^l t1 mod 2^r, l >= 3."""
    n = 2**r
    for s in (1, -1):
        x = (t - 2 * s) % n
        l = _val(x, 2, r)
        if l >= 3:
            return s, l, x >> l
    raise AssertionError("unreachable")


def _full_two(r: int, t: int) -> int:
    n = 2**r
    t %= n
    if t % 2:
        return 2 ** (2 * r - 1)
    if t % 4 == 0:
        return 3 * 2 ** (2 * r - 2)
    if (t - 2) % n == 0 or (t + 2) % n == 0:
        return 3 * 2 ** (2 * r - 1) - 2 ** ((3 * r - 1) // 2)
    s, l, t1 = _two_adic_split(t, r)
    if l % 2:
        return 3 * (2 ** (2 * r - 1) - 2 ** (2 * r - (l + 3) // 2))
    # even l: depends on the odd part W of (t^2-4)/2^l mod 8
    delta = {1: Fraction(0), 5: Fraction(1, 2 ** (l // 2 + 1)),
             3: Fraction(3, 2 ** (l // 2 + 2)), 7: Fraction(3, 2 ** (l // 2 + 2))}
    base = s * t1 + (4 if l == 4 else 0)
    m = 2 ** min(3, r - l)
    cands = [w for w in (1, 3, 5, 7) if (w - base) % m == 0]
    val = 4**r * (Fraction(3, 2) - sum(delta[w] for w in cands) / len(cands))
    assert val.denominator == 1
    return int(val)


def _gamma0_odd(p: int, r: int, N: int, t: int) -> int:
    T = (t * t - 4) % p**r
    A = p ** (2 * r - (N + 1) // 2) + p ** (2 * r - N // 2 - 1)
    if T == 0:
        return A - p ** ((3 * r - 1) // 2)
    l = _val(T, p, r)
    w = T // p**l
    if l < N:
        if l % 2 == 0 and legendre(w, p) == 1:
            return 2 * p ** (2 * r + l // 2 - N)
        return 0
    if l % 2 == 0:
        return A if legendre(w, p) == 1 else A - 2 * p ** (2 * r - l // 2 - 1)
    return A - p ** (2 * r - (l + 1) // 2) - p ** (2 * r - (l + 3) // 2)


def _hat_odd(p: int, r: int, N: int, t: int) -> int:
    n = p**r
    if r <= 2 * N:
        return p ** (3 * (r - N)) if (t - 2) % n == 0 or (t + 2) % n == 0 else 0
    q = p ** (2 * N)
    if (t - 2) % q and (t + 2) % q:
        return 0
    # t^2 - 4 is divisible by p^{2N}; T is the quotient as a residue mod p^{r-2N}
    s = r - 2 * N
    T = ((t * t - 4) % n) // q
    X = 2 * r - N
    if T == 0:
        return p**X + p ** (X - 1) - p ** ((3 * r - 1) // 2)
    l = _val(T, p, s)
    w = T // p**l
    if l == 0:
        return p ** (X - 1) * (p + legendre(T, p))
    if l % 2 == 0:
        if legendre(w, p) == 1:
            return p ** (X - 1) * (p + 1)
        return p**X + p ** (X - 1) - 2 * p ** (X - l // 2 - 1)
    return p**X + p ** (X - 1) - p ** (X - (l + 1) // 2) - p ** (X - (l + 3) // 2)


def _closed_case(spec: GroupSpec, p: int, r: int) -> tuple[str, int]:
    N = spec.local_level(p, r)
    if N == 0:
        if p == 2 and r < 6:
            raise NoClosedForm("p = 2 needs r >= 6")
        return "full", 0
    if p == 2:
        raise NoClosedForm("level divisible by 2")
    return spec.kind, N


def trace_count_closed(spec: GroupSpec, p: int, r: int, m: int) -> int:
    """Closed-form trace count on the image in SL2(Z/p^r), corrected rows (see notes in README)."""
    if r < 1:
        raise DomainError("r must be positive")
    kind, N = _closed_case(spec, p, r)
    t = m % p**r
    if kind == "full":
        return _full_two(r, t) if p == 2 else _full_odd(p, r, t)
    if kind == "gamma0":
        return _gamma0_odd(p, r, N, t)
    return _hat_odd(p, r, N, t)


# Literal transcriptions of the rows as printed, kept for itemised comparison.

def _pow(p: int, e) -> Fraction:
    e = Fraction(e)
    if e.denominator != 1:
        raise ValueError("fractional exponent")
    return Fraction(p) ** int(e)


def _printed_full_two(r: int, t: int) -> Fraction | None:
    n = 2**r
    if t % 2:
        return _pow(2, 2 * r - 1)
    if t % 4 == 0:
        return 3 * _pow(2, 2 * r - 2)
    if (t - 2) % n == 0 or (t + 2) % n == 0:
        return 3 * _pow(2, 2 * r - 1) - _pow(2, (3 * r - 1) // 2)
    s, l, t1 = _two_adic_split(t, r)
    if l == 4:
        return 3 * _pow(2, 2 * r - 1) if t1 % 8 == 5 else 5 * _pow(2, 2 * r - 2)
    if l % 2:
        return 3 * (_pow(2, 2 * r - 1) - _pow(2, Fraction(2 * r) - Fraction(l + 3, 2)))
    if l >= 6:
        if t1 % 8 == 1:
            return 3 * _pow(2, 2 * r - 1)
        return 3 * _pow(2, 2 * r - 1) - _pow(2, 2 * r - l // 2)
    return None


def _printed_gamma0(p: int, r: int, N: int, t: int) -> Fraction:
    T = (t * t - 4) % p**r
    A = _pow(p, 2 * r - (N + 1) // 2) + _pow(p, 2 * r - N // 2 - 1)
    if T == 0:
        return A - _pow(p, (3 * r - 1) // 2)
    l = _val(T, p, r)
    w = T // p**l
    if l % 2 == 0 and legendre(w, p) == 1 and l <= N:
        return 2 * _pow(p, 2 * r + l // 2 - N - 1)
    if l >= N:
        if l % 2 == 0 and legendre(w, p) == 1:
            return A
        if l % 2 == 0:
            return A - 2 * _pow(p, 2 * r - l // 2 - 1)
        return A - _pow(p, 2 * r - (l + 1) // 2) - _pow(p, 2 * r - (l + 3) // 2)
    return Fraction(0)


def _printed_hat(p: int, r: int, N: int, t: int) -> Fraction:
    n = p**r
    q = p ** (2 * N)
    qe = p ** min(2 * N, r)
    if (t - 2) % qe and (t + 2) % qe:
        return Fraction(0)
    # T := (t -+ 2)/p^{2N} for t = +-2, read as a residue mod p^{r-2N}
    sign = 2 if (t - 2) % qe == 0 else -2
    s = max(r - 2 * N, 0)
    T = (((t - sign) % n) // q) % p**s if s > 0 else 0
    if T == 0:
        return _pow(p, 2 * r - N) + _pow(p, 2 * r - N - 1) - _pow(p, (3 * r - 1) // 2)
    l = _val(T, p, s)
    w = T // p**l
    if l == 0:
        return _pow(p, 2 * r - N - 1) * (p + legendre(T, p))
    if l % 2 == 0:
        if legendre(w, p) == 1:
            return _pow(p, 2 * r - N - 1) * (p + 1)
        return _pow(p, 2 * r - N) + _pow(p, 2 * r - N - 1) - 2 * _pow(p, 2 * r - l // 2 - 1)
    return (_pow(p, 2 * r - N) + _pow(p, 2 * r - N - 1)
            - _pow(p, 2 * r - (l + 1) // 2) - _pow(p, 2 * r - (l + 3) // 2))


def trace_count_printed(spec: GroupSpec, p: int, r: int, m: int) -> Fraction | None:
    """The row exactly as printed in the source lemmas (None where no row applies)."""
    kind, N = _closed_case(spec, p, r)
    t = m % p**r
    if kind == "full":
        return _printed_full_two(r, t) if p == 2 else Fraction(_full_odd(p, r, t))
    if kind == "gamma0":
        return _printed_gamma0(p, r, N, t)
    return _printed_hat(p, r, N, t)


# --- census of trace types -----------------------------------------------------

def _census_key(p: int, r: int, t: int):
    T = (t * t - 4) % p**r
    if T == 0:
        return ("zero", r)
    l = _val(T, p, r)
    return ("qr" if legendre(T // p**l, p) == 1 else "nqr", l)


def census_direct(p: int, r: int) -> dict:
    out = {k: 0 for k in census_keys(p, r)}
    for t in range(p**r):
        out[_census_key(p, r, t)] += 1
    return out


def census_keys(p: int, r: int) -> list:
    keys = [("qr", 0), ("nqr", 0)]
    for l in range(1, r):
        keys += [("qr", l), ("nqr", l)]
    return keys + [("zero", r)]


def trace_type_census(p: int, r: int) -> dict:
    """Number of t mod p^r in each trace type (corrected count for the p^l || T classes)."""
    if p == 2:
        raise DomainError("census is stated for odd p")
    out = {("qr", 0): p ** (r - 1) * (p - 3) // 2, ("nqr", 0): p ** (r - 1) * (p - 1) // 2}
    for l in range(1, r):
        out[("qr", l)] = p ** (r - l - 1) * (p - 1)
        out[("nqr", l)] = p ** (r - l - 1) * (p - 1)
    out[("zero", r)] = 2
    return out


def trace_type_census_printed(p: int, r: int) -> dict:
    out = trace_type_census(p, r)
    for l in range(1, r):
        out[("qr", l)] = out[("nqr", l)] = p ** (r - 1) * (p - 1)
    return out


# --- conjugacy classes and cosets ------------------------------------------------

def gamma_nu(D: int, t: int, u: int, n: int, nu: int = 1) -> ModMatrix:
    if t * t - D * u * u != 4:
        raise DomainError("(t, u) does not solve the Pell equation")
    delta = 1 if D % 4 == 1 else 0
    assert (t + delta * u) % 2 == 0 and (D - delta * delta) % 4 == 0
    nu_inv = pow(nu, -1, n)
    return ModMatrix(n, (t + delta * u) // 2, (D - delta) // 4 * nu_inv * u, nu * u, (t - delta * u) // 2)


def gamma1_matrix(D: int, t: int, u: int, n: int) -> ModMatrix:
    return gamma_nu(D, t, u, n, 1)


@dataclass
class CosetSpace:
    spec: GroupSpec
    n: int
    reps: list
    index: dict = field(repr=False)  # projective key -> coset number
    ambient: str = "PSL2"

    def __len__(self) -> int:
        return len(self.reps)

    def coset_of(self, g: ModMatrix) -> int:
        return self.index[g.projective_key()]

    def action(self, g: ModMatrix) -> list[int]:
        """Right multiplication by g as a permutation of coset numbers."""
        return [self.coset_of(x * g) for x in self.reps]


def _in_image_projective(spec: GroupSpec, g: ModMatrix) -> bool:
    return any(in_image(spec, g.scaled(al)) for al in sqrt_of_one(g.n))


@lru_cache(maxsize=64)
def coset_space(spec: GroupSpec, n: int) -> CosetSpace:
    """Right cosets of the image of spec in PSL2(Z/n)."""
    roots = sqrt_of_one(n)
    n_proj = group_order(n) // len(roots)
    q = _q(spec, n)
    sub = image_order(spec, n)
    # the image always contains the scalars alpha with alpha^2 = 1 mod n
    n_cosets = n_proj // (sub // len(roots))
    if n_cosets > MAX_COSETS:
        raise ResourceGuard(f"{n_cosets} cosets exceed the guard")
    E = sl2_elements(n)
    H = [ModMatrix(n, *map(int, e)) for e in E[_image_mask(spec, n, E)]] if q > 1 else None
    index: dict = {}
    reps = []
    for e in E:
        g = ModMatrix(n, *map(int, e))
        key = g.projective_key()
        if key in index:
            continue
        cid = len(reps)
        reps.append(g)
        if H is None:
            for e2 in E:
                index[ModMatrix(n, *map(int, e2)).projective_key()] = 0
            break
        for h in H:
            index[(h * g).projective_key()] = cid
    assert len(reps) == n_cosets, (len(reps), n_cosets)
    return CosetSpace(spec, n, reps, index)


def permutation_character(cs: CosetSpace, g: ModMatrix) -> int:
    """Number of cosets H x fixed by right multiplication by g."""
    if g.n != cs.n:
        raise DomainError("modulus mismatch")
    if len(cs) == 1:
        return 1
    return sum(1 for x in cs.reps if _in_image_projective(cs.spec, x * g * x.inv()))


def _conjugates(h: ModMatrix) -> np.ndarray:
    """x^-1 h x for every x in SL2(Z/n), as rows."""
    n = h.n
    if group_order(n) > MAX_CONJ:
        raise ResourceGuard("conjugacy search too large")
    X = sl2_elements(n)
    a, b, c, d = X.T
    # x^-1 = [[d, -b], [-c, a]]
    p11 = (h.a * a + h.b * c) % n
    p12 = (h.a * b + h.b * d) % n
    p21 = (h.c * a + h.d * c) % n
    p22 = (h.c * b + h.d * d) % n
    return np.column_stack([
        (d * p11 - b * p21) % n,
        (d * p12 - b * p22) % n,
        (-c * p11 + a * p21) % n,
        (-c * p12 + a * p22) % n,
    ])


def are_conjugate(g: ModMatrix, h: ModMatrix, projective: bool = True) -> bool:
    if g.n != h.n:
        raise DomainError("modulus mismatch")
    n = g.n
    scalars = sqrt_of_one(n) if projective else [1]
    traces = {(al * h.trace) % n for al in scalars}
    if g.trace not in traces:
        return False
    C = _conjugates(g)
    for al in scalars:
        target = np.array(h.scaled(al).entries)
        if (C == target).all(axis=1).any():
            return True
    return False


def conjugacy_class_keys(h: ModMatrix) -> set:
    """Projective keys of the PSL2 conjugacy class of h."""
    n = h.n
    C = _conjugates(h)
    keys = set()
    for al in sqrt_of_one(n):
        S = (C * al) % n
        keys.update(map(tuple, S.tolist()))
    return keys


def projective_order(g: ModMatrix) -> int:
    ident = {ModMatrix(g.n, al, 0, 0, al).entries for al in sqrt_of_one(g.n)}
    x = g
    j = 1
    while x.entries not in ident:
        x = x * g
        j += 1
    return j
