import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weilqmc.finitefield import (
    FieldParams,
    additive_character,
    coeffs_to_index,
    digit_bijection,
    digit_bijection_inv,
    find_field_poly,
    index_to_coeffs,
    is_irreducible,
    is_primitive,
    mul_arrays,
    nu_m,
    nu_m_numerator,
    poly_add,
    poly_mul_mod,
    poly_pow_mod,
    pow_arrays,
    trace,
    trace_arrays,
)

F4 = FieldParams(2, 2, (1, 1, 1))
SMALL_FIELDS = [(b, m) for b in (2, 3, 5, 7) for m in range(1, 7) if b**m <= 64]


def brute_irreducible(p, b):
    """No monic factor of degree 1..m//2, by exhaustive division."""
    m = len(p) - 1
    for d in range(1, m // 2 + 1):
        for low in itertools.product(range(b), repeat=d):
            q = list(low) + [1]
            rem = list(p)
            for shift in range(m - d, -1, -1):
                c = rem[shift + d]
                for i in range(d + 1):
                    rem[shift + i] = (rem[shift + i] - c * q[i]) % b
            if not any(rem):
                return False
    return True


def test_mul_examples():
    x, x1, one = (0, 1), (1, 1), (1, 0)
    assert poly_mul_mod(x, x, F4) == (1, 1)
    assert poly_mul_mod(x1, x1, F4) == (0, 1)
    for v in [(0, 0), x, x1, one]:
        assert poly_mul_mod(one, v, F4) == v


def test_pow_examples():
    assert poly_pow_mod((0, 1), 3, F4) == (1, 0)
    assert poly_pow_mod((1, 1), 3, F4) == (1, 0)
    assert poly_pow_mod((0, 0), 5, F4) == (0, 0)
    assert poly_pow_mod((0, 0), 0, F4) == (1, 0)


@pytest.mark.parametrize(
    "p,b,expected",
    [((1, 1, 1), 2, True), ((1, 0, 1), 2, False), ((1, 0, 1), 3, True), ((1, 1, 0, 1), 2, True)],
)
def test_irreducible_examples(p, b, expected):
    assert is_irreducible(p, b) is expected


def test_irreducible_matches_brute_force():
    for b, m in [(2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3)]:
        for low in itertools.product(range(b), repeat=m):
            p = (*low, 1)
            assert is_irreducible(p, b) == brute_irreducible(p, b), p


@pytest.mark.parametrize(
    "p,b,expected",
    [((1, 1, 1), 2, True), ((1, 1, 1, 1, 1), 2, False), ((1, 1, 0, 1), 2, True)],
)
def test_primitive_examples(p, b, expected):
    assert is_primitive(p, b) is expected


def test_primitive_matches_order_of_x():
    for b, m in [(2, 4), (2, 5), (3, 3)]:
        for low in itertools.product(range(b), repeat=m):
            p = (*low, 1)
            if not is_irreducible(p, b):
                continue
            F = FieldParams(b, m, p)
            x = tuple([0, 1] + [0] * (m - 2)) if m > 1 else (0,)
            y, order = x, 1
            while y != (1,) + (0,) * (m - 1):
                y, order = poly_mul_mod(y, x, F), order + 1
            assert F.is_primitive == (order == b**m - 1)


def test_find_field_poly_examples():
    assert find_field_poly(2, 2, True).p == (1, 1, 1)
    assert find_field_poly(2, 1).p == (0, 1)
    assert find_field_poly(3, 2).p == (1, 0, 1)
    assert find_field_poly(2, 4, True).is_primitive


def test_field_params_validation_and_string():
    assert FieldParams.from_string("2,2,1,1,1") == F4
    assert F4.to_string() == "2,2,1,1,1"
    with pytest.raises(ValueError, match="reducible"):
        FieldParams(2, 2, (1, 0, 1))
    with pytest.raises(ValueError):
        FieldParams(4, 2, (1, 1, 1))


def test_digit_and_nu_examples():
    assert digit_bijection(0, F4) == (0, 0)
    assert digit_bijection(2, F4) == (0, 1)
    assert digit_bijection(3, F4) == (1, 1)
    assert nu_m((0, 0), F4) == 0
    assert nu_m((0, 1), F4).limit_denominator() == nu_m((0, 1), F4) and nu_m((0, 1), F4) == 0.25
    assert nu_m((1, 1), F4) == 0.75
    with pytest.raises(ValueError):
        digit_bijection(4, F4)


@pytest.mark.parametrize("b,m", SMALL_FIELDS)
def test_digit_bijection_roundtrip_and_nu_image(b, m):
    F = find_field_poly(b, m)
    B = b**m
    assert [digit_bijection_inv(digit_bijection(n, F), F) for n in range(B)] == list(range(B))
    assert sorted(nu_m_numerator(digit_bijection(n, F), F) for n in range(B)) == list(range(B))


def test_trace_examples():
    assert trace((0, 0), F4) == 0
    assert trace((0, 1), F4) == 1
    assert trace((1, 0), F4) == 0
    assert additive_character((1, 0), (0, 1), F4) == 1
    assert additive_character((0, 0), (1, 1), F4) == 0
    assert additive_character((0, 1), (0, 1), F4) == 1


@pytest.mark.parametrize("b,m", SMALL_FIELDS)
def test_character_additive_nontrivial_orthogonal(b, m):
    F = find_field_poly(b, m)
    elems = [digit_bijection(n, F) for n in range(b**m)]
    tr = {y: trace(y, F) for y in elems}
    for y in elems:
        for z in elems:
            assert tr[poly_add(y, z, F)] == (tr[y] + tr[z]) % b
    assert any(tr.values())
    for a in elems:
        idx = [additive_character(a, z, F) for z in elems]
        counts = np.bincount(idx, minlength=b)
        if any(a):
            assert (counts == b ** (m - 1)).all()  # sum of psi(az) vanishes
        else:
            assert counts[0] == b**m


@pytest.mark.parametrize("b,m", [(2, 3), (3, 3), (2, 6), (5, 2)])
def test_bulk_routines_match_scalar(b, m):
    F = find_field_poly(b, m)
    B = b**m
    U = index_to_coeffs(np.arange(B), F)
    assert (coeffs_to_index(U, F) == np.arange(B)).all()
    prod = mul_arrays(U[:, None, :], U[None, :, :], F)
    for u in range(0, B, max(1, B // 9)):
        for v in range(B):
            assert tuple(prod[u, v]) == poly_mul_mod(tuple(U[u]), tuple(U[v]), F)
    for e in (0, 1, 2, 5, B - 1):
        P = pow_arrays(U, e, F)
        assert all(tuple(P[n]) == poly_pow_mod(tuple(U[n]), e, F) for n in range(B))
    assert list(trace_arrays(U, F)) == [trace(tuple(u), F) for u in U]
    T = F.pairing_table
    for u in range(B):
        for v in range(B):
            assert T[u, v] == additive_character(tuple(U[u]), tuple(U[v]), F)


@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_field_axioms_in_f81(a, c, d):
    F = find_field_poly(3, 4)
    A, C, D = (digit_bijection(v, F) for v in (a, c, d))
    assert poly_mul_mod(A, poly_add(C, D, F), F) == poly_add(poly_mul_mod(A, C, F), poly_mul_mod(A, D, F), F)
    assert poly_mul_mod(poly_mul_mod(A, C, F), D, F) == poly_mul_mod(A, poly_mul_mod(C, D, F), F)
    if any(A):
        assert poly_pow_mod(A, 80, F) == (1, 0, 0, 0)
