from math import prod

import pytest
from hypothesis import given, strategies as st

from lenspec.arith import (
    DomainError,
    chebyshev_roots,
    chebyshev_trace,
    chebyshev_u,
    divisors_from,
    divisors_spf,
    factorize,
    kronecker,
    kronecker_primes,
    legendre,
    primes_upto,
    spf_table,
    sqrt_of_one,
)


@given(st.integers(1, 10**12))
def test_factorize_roundtrip(n):
    f = factorize(n)
    assert prod(p**e for p, e in f.items()) == n
    assert all(e >= 1 for e in f.values())


def test_factorize_large_cofactor():
    n = (10**6 + 3) * (10**6 + 33)  # both prime, beyond the trial-division limit
    assert factorize(n * 4) == {2: 2, 10**6 + 3: 1, 10**6 + 33: 1}


def test_factorize_rejects_zero():
    with pytest.raises(DomainError):
        factorize(0)


@given(st.integers(2, 5000))
def test_divisors_spf_matches_factorization(n):
    spf = spf_table(5000)
    assert sorted(divisors_spf(n, spf)) == divisors_from(factorize(n))


def test_primes_upto():
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _kronecker_naive(D, p):
    # (D/2) by the mod-8 rule, otherwise Euler's criterion
    if p == 2:
        return 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
    r = pow(D % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


@given(st.integers(1, 10**8), st.sampled_from(primes_upto(200).tolist()))
def test_kronecker_at_primes(D, p):
    assert kronecker(D, p) == _kronecker_naive(D, p)


@given(st.integers(1, 10**7), st.integers(1, 300), st.integers(1, 300))
def test_kronecker_multiplicative_in_n(D, a, b):
    assert kronecker(D, a * b) == kronecker(D, a) * kronecker(D, b)


@given(st.integers(1, 2**70))
def test_kronecker_primes_vectorised(D):
    ps = primes_upto(500)
    assert kronecker_primes(D, ps).tolist() == [_kronecker_naive(D, int(p)) for p in ps]


def test_legendre_small():
    assert [legendre(a, 7) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]


@pytest.mark.parametrize("q,roots", [(1, [0]), (5, [1, 4]), (8, [1, 3, 5, 7]), (15, [1, 4, 11, 14])])
def test_sqrt_of_one(q, roots):
    assert sqrt_of_one(q) == roots


@given(st.integers(3, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_chebyshev_composition(s, i, j):
    assert chebyshev_trace(chebyshev_trace(s, i), j) == chebyshev_trace(s, i * j)


@given(st.integers(3, 10**4), st.integers(1, 8))
def test_chebyshev_matches_matrix_power(s, j):
    # g = [[s, -1], [1, 0]] has trace s; its j-th power has trace tau_j(s) and lower-left V_j(s)
    a, b, c, d = 1, 0, 0, 1
    for _ in range(j):
        a, b, c, d = a * s + b, -a, c * s + d, -c
    assert a + d == chebyshev_trace(s, j)
    assert c == chebyshev_u(s, j)


@given(st.integers(3, 10**5), st.integers(2, 7))
def test_chebyshev_roots_inverts(s, j):
    assert chebyshev_roots(chebyshev_trace(s, j), j) == s


def test_chebyshev_roots_absent():
    assert chebyshev_roots(8, 2) is None  # tau_2(s) = s^2 - 2 takes the values 7, 14, ...
