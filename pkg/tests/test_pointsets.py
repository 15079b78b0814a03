import math
import warnings
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weilqmc.finitefield import FieldParams, digit_bijection, find_field_poly, nu_m, poly_pow_mod
from weilqmc.modarith import coprime_exponents, primes_up_to
from weilqmc.pointsets import (
    PointSet,
    WeakBoundWarning,
    exponent_sequence,
    gen_walsh_pset,
    gen_walsh_pset_fast,
    gen_weil_pset,
    gen_weil_pset_exponents,
    gen_weil_pset_fast,
    regenerate,
    tent_residues,
    tent_transform,
)

PRIMES = [N for N in primes_up_to(199) if N >= 5]


def naive_pset(N, exps):
    return Counter(tuple(pow(n, e, N) for e in exps) for n in range(N))


def rows(P):
    return Counter(map(tuple, P.residues.tolist()))


def test_gauss_example():
    P = gen_weil_pset(5, 2)
    assert P.residues.tolist() == [[0, 0], [1, 1], [2, 4], [3, 4], [4, 1]]
    assert P.denom == 5 and P.family == "weil"


def test_one_dimensional_set_is_the_grid():
    assert gen_weil_pset(7, 1).residues[:, 0].tolist() == list(range(7))


def test_invalid_inputs():
    with pytest.raises(ValueError, match="N must be prime"):
        gen_weil_pset(4, 1)
    with pytest.raises(ValueError):
        gen_weil_pset(5, 5)
    with pytest.raises(ValueError):
        gen_weil_pset_exponents(11, [3, 1])
    with pytest.raises(ValueError):
        PointSet(5, np.array([[5]]), "weil")


def test_large_s_warns():
    with pytest.warns(WeakBoundWarning):
        P = gen_weil_pset(7, 3)
    assert P.notes


@pytest.mark.parametrize("N", [5, 11, 31, 101])
def test_weil_set_matches_naive_powers(N):
    s = math.isqrt(N)
    assert rows(gen_weil_pset(N, s)) == naive_pset(N, range(1, s + 1))


def test_fast_matches_naive_multiset_over_primes():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakBoundWarning)
        for N in PRIMES[:12]:
            for s in range(1, min(N, 6)):
                assert gen_weil_pset_fast(N, s).same_multiset(gen_weil_pset(N, s))


def test_generalized_exponents():
    exps = coprime_exponents(23, 3)
    P = gen_weil_pset_exponents(23, exps)
    assert rows(P) == naive_pset(23, exps)
    assert gen_weil_pset_fast(23, 3, exps).same_multiset(P)


@given(st.sampled_from(PRIMES), st.data())
@settings(max_examples=40, deadline=None)
def test_exponent_permutes_coordinate(N, data):
    # a coprime exponent is a bijection of Z_N, so the projection is the full grid
    j = data.draw(st.sampled_from([j for j in range(1, N - 1) if math.gcd(j, N - 1) == 1]))
    P = gen_weil_pset_exponents(N, [j])
    assert sorted(P.residues[:, 0].tolist()) == list(range(N))


def test_exponent_sequence_examples():
    assert exponent_sequence(2, 4) == (1, 3, 5, 7)
    assert exponent_sequence(3, 5) == (1, 2, 4, 5, 7)
    assert exponent_sequence(5, 5) == (1, 2, 3, 4, 6)


@given(st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 60))
def test_exponent_sequence_skips_multiples(b, s):
    expected = [c for c in range(1, s * b + 1) if c % b][:s]
    assert list(exponent_sequence(b, s)) == expected


def test_tent_examples():
    assert tent_residues(np.array([0, 1, 2, 3, 4]), 5).tolist() == [0, 2, 4, 4, 2]
    assert tent_residues(np.array([0, 2, 3]), 4).tolist() == [0, 4, 2]
    Q = tent_transform(gen_weil_pset(5, 2))
    assert Q.family == "tent" and Q.residues[3].tolist() == [4, 2]
    assert Q.params["base_family"] == "weil"


@given(st.integers(1, 10**6), st.data())
def test_tent_matches_fraction_formula(d, data):
    from fractions import Fraction

    r = data.draw(st.integers(0, d - 1))
    t = Fraction(r, d)
    assert Fraction(int(tent_residues(np.array([r]), d)[0]), d) == 1 - abs(2 * t - 1)


def naive_walsh(params, exps):
    B = params.order
    out = Counter()
    for n in range(B):
        y = digit_bijection(n, params)
        out[tuple(int(nu_m(poly_pow_mod(y, e, params), params) * B) for e in exps)] += 1
    return out


@pytest.mark.parametrize("b,m,s", [(2, 2, 2), (2, 4, 3), (3, 2, 2), (3, 3, 4), (5, 2, 2)])
def test_walsh_set_matches_scalar_field_arithmetic(b, m, s):
    F = find_field_poly(b, m)
    R = gen_walsh_pset(F, s)
    assert rows(R) == naive_walsh(F, exponent_sequence(b, s))
    assert R.denom == b**m


def test_walsh_f4_example():
    F = FieldParams(2, 2, (1, 1, 1))
    R = gen_walsh_pset(F, 2)
    # exponents (1, 3) and y^3 = 1 on the nonzero elements of F_4
    assert sorted(map(tuple, R.residues.tolist())) == [(0, 0), (1, 2), (2, 2), (3, 2)]


def test_walsh_fast_needs_primitive():
    F = FieldParams(2, 4, (1, 1, 1, 1, 1))
    assert not F.is_primitive
    with pytest.raises(ValueError, match="primitive"):
        gen_walsh_pset_fast(F, 2)


def test_walsh_fast_matches_elementary():
    for m in range(1, 7):
        F = find_field_poly(2, m, primitive_required=True)
        for s in range(1, 9):
            assert gen_walsh_pset_fast(F, s).same_multiset(gen_walsh_pset(F, s))
    F = find_field_poly(3, 3, primitive_required=True)
    assert gen_walsh_pset_fast(F, 4).same_multiset(gen_walsh_pset(F, 4))


def test_regenerate_roundtrip():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakBoundWarning)
        sets = [
            gen_weil_pset(13, 3),
            gen_weil_pset_fast(17, 2),
            gen_weil_pset_exponents(23, [1, 5]),
            tent_transform(gen_weil_pset(11, 2)),
            gen_walsh_pset(find_field_poly(3, 2), 3),
            gen_walsh_pset_fast(find_field_poly(2, 5, True), 4),
        ]
    for P in sets:
        Q = regenerate(P.metadata())
        assert Q.family == P.family and np.array_equal(Q.residues, P.residues)


def test_points_and_fractions_agree():
    P = gen_weil_pset(11, 3)
    fr = P.fractions()
    assert np.allclose(P.points, [[float(v) for v in row] for row in fr])
    assert not P.residues.flags.writeable
