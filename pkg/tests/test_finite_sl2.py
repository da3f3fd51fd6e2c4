import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from lenspec.arith import DomainError, ResourceGuard, legendre
from lenspec.finite_sl2 import (
    FULL,
    GroupSpec,
    ModMatrix,
    NoClosedForm,
    are_conjugate,
    census_direct,
    coset_space,
    gamma1_matrix,
    gamma_nu,
    group_order,
    image_order,
    permutation_character,
    projective_order,
    sl2_elements,
    subgroup_image,
    trace_count_bruteforce,
    trace_count_closed,
    trace_count_printed,
    trace_histogram,
    trace_histogram_enumerated,
    trace_type_census,
)
from lenspec.quad_forms import divisor_profile

G0 = lambda N: GroupSpec("gamma0", N)
HAT = lambda N: GroupSpec("hat", N)


def naive_elements(n):
    return [(a, b, c, d) for a, b, c, d in product(range(n), repeat=4) if (a * d - b * c) % n == 1 % n]


def naive_member(spec, g, n):
    a, b, c, d = g
    if spec.is_full():
        return True
    from math import gcd
    q = gcd(n, spec.N)
    if spec.kind == "gamma0":
        return c % q == 0
    return any(all(x % q == y for x, y in zip(g, (al, 0, 0, al))) for al in range(q) if (al * al - 1) % q == 0)


# --- group specs and orders ----------------------------------------------------------

def test_spec_parse_roundtrip():
    for s in ("full", "gamma0:3", "hat:25", "gamma0:15"):
        assert str(GroupSpec.parse(s)) == s
    for bad in ("gamma1:3", "hat:", "full:2", "gamma0:0"):
        with pytest.raises(DomainError):
            GroupSpec.parse(bad)


@pytest.mark.parametrize("n,order", [(2, 6), (3, 24), (4, 48), (5, 120), (9, 648), (15, 2880)])
def test_group_order_examples(n, order):
    assert group_order(n) == order


@pytest.mark.parametrize("n", range(2, 17))
def test_group_order_matches_enumeration(n):
    els = naive_elements(n)
    assert group_order(n) == len(els)
    assert [tuple(e) for e in sl2_elements(n).tolist()] == sorted(els)


def test_subgroup_image_examples():
    assert subgroup_image(G0(3), 3).order == 6
    assert subgroup_image(HAT(3), 3).order == 2
    assert subgroup_image(FULL, 5).order == 120
    assert {tuple(e) for e in subgroup_image(HAT(3), 3).elements().tolist()} == {(1, 0, 0, 1), (2, 0, 0, 2)}


@pytest.mark.parametrize("spec,n", [(G0(3), 9), (HAT(3), 9), (G0(9), 9), (HAT(9), 27), (G0(15), 15),
                                    (HAT(15), 15), (G0(4), 8), (HAT(5), 10)])
def test_image_matches_naive_membership(spec, n):
    els = naive_elements(n)
    mine = {tuple(e) for e in subgroup_image(spec, n).elements().tolist()}
    assert mine == {g for g in els if naive_member(spec, g, n)}
    assert image_order(spec, n) == len(mine)


def test_enumeration_guard():
    with pytest.raises(ResourceGuard):
        subgroup_image(FULL, 1000).elements()


# --- trace counts -------------------------------------------------------------------

def test_bruteforce_examples():
    assert trace_count_bruteforce(FULL, 3, 0) == (6, Fraction(1, 4))
    assert trace_count_bruteforce(FULL, 3, 2)[0] == 9
    assert trace_count_bruteforce(G0(3), 3, 1)[0] == 3


@pytest.mark.parametrize("spec,n", [(FULL, 8), (FULL, 12), (FULL, 27), (G0(3), 27), (HAT(3), 27), (G0(9), 27),
                                    (HAT(9), 27), (G0(5), 25), (HAT(25), 25), (G0(15), 15), (HAT(15), 45),
                                    (FULL, 49), (FULL, 64)])
def test_factored_count_matches_element_walk(spec, n):
    assert trace_histogram(spec, n) == trace_histogram_enumerated(spec, n)


@pytest.mark.parametrize("spec,n", [(FULL, 81), (FULL, 125), (FULL, 49), (FULL, 128), (G0(3), 81), (HAT(5), 125)])
def test_distribution_sums_to_one(spec, n):
    assert sum(trace_count_bruteforce(spec, n, m)[1] for m in range(n)) == 1


def test_closed_examples():
    assert trace_count_closed(FULL, 3, 1, 0) == 6
    assert trace_count_closed(G0(3), 3, 1, 1) == 3
    assert trace_count_closed(HAT(3), 3, 1, 2) == 1


def test_closed_guards():
    with pytest.raises(NoClosedForm):
        trace_count_closed(FULL, 2, 5, 0)
    with pytest.raises(NoClosedForm):
        trace_count_closed(G0(4), 2, 6, 0)


@pytest.mark.parametrize("spec,p,r", [(FULL, p, r) for p in (3, 5, 7, 11) for r in (1, 2, 3)]
                         + [(FULL, 2, r) for r in (6, 7, 8)]
                         + [(k(p**N), p, r) for k in (G0, HAT) for p in (3, 5, 7) for N in (1, 2) for r in range(N, 4)]
                         + [(k(27), 3, r) for k in (G0, HAT) for r in (3, 4)])
def test_closed_equals_enumeration(spec, p, r):
    hist = trace_histogram(spec, p**r)
    assert [trace_count_closed(spec, p, r, m) for m in range(p**r)] == list(hist)


def test_printed_rows_where_they_agree():
    # odd-p full-group rows are reproduced exactly as printed
    for p, r in ((3, 2), (5, 3), (7, 2)):
        hist = trace_histogram(FULL, p**r)
        assert all(trace_count_printed(FULL, p, r, m) == hist[m] for m in range(p**r))


def test_printed_two_adic_rows_deviate():
    hist = trace_histogram(FULL, 64)
    bad = [m for m in range(64) if trace_count_printed(FULL, 2, 6, m) not in (None, hist[m])]
    assert bad == [14, 18, 46, 50]


# --- census ------------------------------------------------------------------------

def test_census_examples():
    c = trace_type_census(5, 1)
    assert c[("qr", 0)] == 1 and c[("zero", 1)] == 2
    assert sum(trace_type_census(3, 2).values()) == 9


@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 4))
def test_census_partitions_and_matches_direct(p, r):
    c = trace_type_census(p, r)
    assert sum(c.values()) == p**r
    assert c == census_direct(p, r)


def test_census_rejects_two():
    with pytest.raises(DomainError):
        trace_type_census(2, 3)


# --- gamma_1, cosets and characters ----------------------------------------------------

def test_gamma1_examples():
    assert gamma1_matrix(5, 3, 1, 7).entries == (2, 1, 1, 1)
    assert gamma1_matrix(8, 6, 2, 5).entries == (3, 4, 2, 3)


@given(st.integers(3, 3000), st.sampled_from([2, 3, 5, 7, 8, 9, 15, 16, 25]), st.data())
def test_gamma1_det_and_trace(t, n, data):
    u, D, _ = data.draw(st.sampled_from(divisor_profile(t).entries))
    g = gamma1_matrix(D, t, u, n)
    assert g.trace == t % n
    # (a - d) = delta u and c = u, so the form data b^2 - 4ac reproduces D u^2
    assert ((g.a - g.d) ** 2 + 4 * g.b * g.c - D * u * u) % n == 0


def test_coset_space_examples():
    assert len(coset_space(FULL, 7)) == 1
    assert len(coset_space(G0(3), 3)) == 4
    assert len(coset_space(HAT(3), 3)) == 12


@pytest.mark.parametrize("spec,n", [(G0(5), 5), (G0(9), 9), (HAT(5), 5), (HAT(9), 9), (G0(15), 15), (HAT(8), 8)])
def test_cosets_partition(spec, n):
    cs = coset_space(spec, n)
    proj = {ModMatrix(n, *map(int, e)).projective_key() for e in sl2_elements(n)}
    assert set(cs.index) == proj
    assert set(cs.index.values()) == set(range(len(cs)))
    sub_proj = len({ModMatrix(n, *map(int, e)).projective_key() for e in subgroup_image(spec, n).elements()})
    assert len(cs) * sub_proj == len(proj)


@pytest.mark.parametrize("spec,n", [(G0(5), 5), (HAT(7), 7), (G0(9), 9), (HAT(15), 15)])
def test_action_is_permutation_and_character_is_class_function(spec, n):
    cs = coset_space(spec, n)
    E = sl2_elements(n)
    rng = random.Random(n)
    ident = ModMatrix(n, 1, 0, 0, 1)
    assert permutation_character(cs, ident) == len(cs)
    for _ in range(100):
        g = ModMatrix(n, *map(int, E[rng.randrange(len(E))]))
        x = ModMatrix(n, *map(int, E[rng.randrange(len(E))]))
        assert sorted(cs.action(g)) == list(range(len(cs)))
        w = permutation_character(cs, g)
        assert w == sum(1 for i, j in enumerate(cs.action(g)) if i == j)
        assert w == permutation_character(cs, x.inv() * g * x)


def test_permutation_character_full_and_mismatch():
    cs = coset_space(FULL, 5)
    assert permutation_character(cs, gamma1_matrix(5, 3, 1, 5)) == 1
    with pytest.raises(DomainError):
        permutation_character(coset_space(G0(5), 5), gamma1_matrix(5, 3, 1, 7))


# --- conjugacy -------------------------------------------------------------------------

def test_are_conjugate_basic():
    g = gamma1_matrix(5, 3, 1, 9)
    assert are_conjugate(g, g)
    h = gamma1_matrix(12, 4, 1, 9)  # trace 4, not +-3 mod 9
    assert not are_conjugate(g, h)


def test_are_conjugate_matches_naive_search():
    n = 7
    els = [ModMatrix(n, *e) for e in naive_elements(n)]
    rng = random.Random(3)
    for _ in range(20):
        g, h = rng.choice(els), rng.choice(els)
        naive = any((x.inv() * g * x).projective_key() == h.projective_key() for x in els)
        assert are_conjugate(g, h) == naive


def test_conj2_holds_when_p_does_not_divide_D():
    """gamma_1 and gamma_eta share a power-conjugacy class; checked for p not dividing D."""
    for p in (3, 5, 7):
        eta = next(a for a in range(2, p) if legendre(a, p) == -1)
        for r in (1, 2):
            n = p**r
            for t in range(3, 60):
                for u, D, _ in divisor_profile(t).entries:
                    if D % p == 0:
                        continue
                    g1, ge = gamma_nu(D, t, u, n, 1), gamma_nu(D, t, u, n, eta)
                    assert any(are_conjugate(g1**l, ge) for l in range(1, projective_order(g1) + 1))


def test_conjugacy_guard():
    with pytest.raises(ResourceGuard):
        are_conjugate(gamma1_matrix(5, 3, 1, 300), gamma1_matrix(5, 3, 1, 300))
