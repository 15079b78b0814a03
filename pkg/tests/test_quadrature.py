import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weilqmc.finitefield import find_field_poly
from weilqmc.integrands import SeriesSpec, compose_tent, decaying_family, evaluate, walsh_linear_spec
from weilqmc.modarith import primes_between, primes_up_to
from weilqmc.pointsets import gen_walsh_pset, gen_weil_pset, gen_weil_pset_exponents, tent_transform
from weilqmc.quadrature import (
    BoundQuery,
    aliasing_check,
    bound,
    bound_terms,
    coefficient_side,
    error,
    fitted_slope,
    info_complexity,
    matched_query,
    point_set_for,
    qmc_apply,
)

GAUSS = SeriesSpec("fourier", {(0, 1): 1.0})


def test_bound_examples():
    assert bound(BoundQuery("K", 101, 5, 1.0, 2.0)) == pytest.approx(4 / math.sqrt(101))
    assert bound(BoundQuery("K", 5, 1, 0.5, 1.0)) == pytest.approx(5**-0.5)
    assert bound(BoundQuery("W", 64, 3, b=2)) == pytest.approx(0.625)
    assert bound_terms(BoundQuery("K", 101, 5, exponents=(1, 3, 7, 9, 11)))[0] == pytest.approx(10 / math.sqrt(101))


@pytest.mark.parametrize(
    "args",
    [("K", 4, 1), ("K", 5, 5), ("X", 5, 1), ("W", 63, 2), ("K", 5, 1, 0.0), ("K", 5, 1, 1.0, 0.5)],
)
def test_bound_query_validation(args):
    with pytest.raises(ValueError):
        BoundQuery(*args, b=2 if args[0] == "W" else None)


@given(st.integers(1, 6), st.sampled_from([0.25, 0.5, 1.0]), st.sampled_from([1.0, 2.0, math.inf]))
@settings(max_examples=40, deadline=None)
def test_bound_monotone_in_N(s, alpha, p):
    primes = [N for N in primes_up_to(3000) if N > s]
    values = [bound(BoundQuery("K", N, s, alpha, p)) for N in primes]
    assert all(a >= b for a, b in zip(values, values[1:]))
    W = [bound(BoundQuery("W", 2**m, s, alpha, p, b=2)) for m in range(3, 20) if 2**m > s]
    assert all(a >= b for a, b in zip(W, W[1:]))


def test_info_complexity_examples():
    assert info_complexity(0.1, 2) == 101
    assert info_complexity(1, 1) == 2
    assert info_complexity(0.25, 1, space="W", b=2) == 16
    # N must exceed s; at s = 4 the Weil term 3/sqrt(N) needs N >= 9
    assert info_complexity(1, 2) == 3
    assert info_complexity(1, 4) == 11
    with pytest.raises(ValueError):
        info_complexity(0, 2)


@given(st.sampled_from([0.5, 0.2, 0.05, 0.01]), st.integers(1, 5), st.sampled_from([0.5, 1.0]))
@settings(max_examples=30, deadline=None)
def test_info_complexity_is_minimal(eps, s, alpha):
    N = info_complexity(eps, s, alpha)
    assert bound(BoundQuery("K", N, s, alpha)) <= eps
    smaller = [q for q in primes_up_to(N - 1) if q > s]
    if smaller:
        assert bound(BoundQuery("K", smaller[-1], s, alpha)) > eps


def test_error_examples():
    P = gen_weil_pset(5, 2)
    rep = error(GAUSS, P)
    assert rep.abs_error == pytest.approx(math.sqrt(5) / 5)
    assert rep.bound == pytest.approx(math.sqrt(5) / 5)
    assert rep.certified and rep.identity_error < 1e-12
    assert error(SeriesSpec("fourier", {(5, 5): 1.0}), P).abs_error == pytest.approx(1.0)
    const = error(SeriesSpec("fourier", {(0, 0): 1.0}), P)
    assert const.abs_error == 0 and const.ratio == 0


def test_mismatched_pairing_is_uncertified():
    P = gen_weil_pset(11, 2)
    rep = error(SeriesSpec("cosine", {(1, 1): 1.0}), P)
    assert not rep.certified and math.isnan(rep.ratio)
    assert matched_query(SeriesSpec("cosine", {(1, 1): 1.0}), tent_transform(P)) is not None
    R = gen_walsh_pset(find_field_poly(2, 4), 2, exponents=(1, 2))
    assert matched_query(SeriesSpec("walsh", {(1, 1): 1.0}, field=find_field_poly(2, 4)), R) is None


def fourier_library():
    rng = np.random.default_rng(11)
    out = [GAUSS, decaying_family(2, 3, 1.5, alpha=0.5, p=2)]
    for s in (1, 2, 3):
        terms = {tuple(rng.integers(-6, 7, size=s)): complex(*rng.normal(size=2)) for _ in range(6)}
        out.append(SeriesSpec("fourier", terms, alpha=float(rng.choice([0.5, 1.0])), p=1.0))
    return out


@pytest.mark.parametrize("idx", range(5))
def test_coefficient_identity_and_soundness(idx):
    f = fourier_library()[idx]
    for N in primes_between(11, 199):
        if f.dim and f.dim * f.dim >= N:
            continue
        rep = error(f, point_set_for("K", N, f.dim))
        assert rep.identity_error < 1e-12
        assert rep.ratio <= 1 + 1e-12


def test_qmc_apply_matches_float_average():
    f = fourier_library()[4]
    P = gen_weil_pset(101, f.dim)
    assert abs(qmc_apply(f, P) - evaluate(f, P.points).mean()) < 1e-12


def test_exponent_set_identity():
    f = SeriesSpec("fourier", {(1, 2): 1.0, (0, 3): -0.5})
    P = gen_weil_pset_exponents(23, (1, 5))
    rep = error(f, P)
    assert rep.certified and rep.identity_error < 1e-12 and rep.ratio <= 1


@pytest.mark.parametrize("N", [11, 31, 97])
def test_tent_transfer(N):
    g = SeriesSpec("cosine", {(1, 2): 1.0, (3, 0): -0.5, (0, 0): 0.2})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        P = gen_weil_pset(N, 2)
    Q = tent_transform(P)
    assert abs(qmc_apply(g, Q) - qmc_apply(compose_tent(g), P)) < 1e-12
    assert abs(coefficient_side(g, Q) - coefficient_side(compose_tent(g), P)) < 1e-12
    a, b = error(g, Q), error(compose_tent(g), P)
    assert abs(a.abs_error - b.abs_error) < 1e-12 and a.certified


@pytest.mark.parametrize("b,m", [(2, 4), (2, 7), (3, 3), (3, 5)])
def test_walsh_soundness(b, m):
    F = find_field_poly(b, m)
    for s, w in [(1, [1.0]), (2, [0.5, -1.0]), (3, [1.0, 1.0, 1.0])]:
        if s >= F.order:
            continue
        f = walsh_linear_spec(F, w, 0.1, depth=2)
        R = gen_walsh_pset(F, s)
        rep = error(f, R)
        assert rep.certified and rep.identity_error < 1e-12
        assert rep.ratio <= 1 + 1e-12
        exact = abs(0.1 + sum(w) / 2 - float(np.mean(0.1 + R.points @ w)))
        assert exact <= rep.error_upper + 1e-12


def test_aliasing_examples():
    r = aliasing_check(SeriesSpec("fourier", {(4,): 1.0}), 4)
    assert r["direct"] == 1 and r["grid"] == pytest.approx(1) and r["bound"] == pytest.approx(2 * math.pi)
    assert r["agree"] and r["compliant"]
    r = aliasing_check(SeriesSpec("fourier", {(1,): 1.0}), 4)
    assert r["direct"] == 0 and r["agree"]
    r = aliasing_check(SeriesSpec("fourier", {(0,): 1.0}), 8)
    assert r["direct"] == 0 and r["bound"] == 0 and r["compliant"]


def test_aliasing_walsh_needs_power():
    F = find_field_poly(2, 2)
    f = walsh_linear_spec(F, [1.0], depth=2)
    assert aliasing_check(f, 16)["agree"]
    with pytest.raises(ValueError, match="power"):
        aliasing_check(f, 8)
    with pytest.raises(ValueError, match="budget"):
        aliasing_check(decaying_family(3, 1, 2.0), 16, budget=100)


def test_fitted_slope_on_gauss_family():
    reports = [error(GAUSS, point_set_for("K", N, 2)) for N in primes_between(5, 97) if N % 4 == 1]
    # |Gauss sum| = sqrt(N) for every odd prime, so error = N^-1/2 exactly
    assert fitted_slope(reports) == pytest.approx(-0.5, abs=1e-9)
    assert fitted_slope(reports[:1]) is None
