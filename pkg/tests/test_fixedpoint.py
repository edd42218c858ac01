import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ivtree.errors import DomainError
from ivtree.fixedpoint import (
    TIFields,
    classify,
    critical_points,
    cubic,
    discriminant,
    fixed_points,
    map_g,
    map_g_prime,
    thresholds,
)
from ivtree.gibbs import consistency_residual
from ivtree.model import ModelParams
from ivtree.tree import build_tree

REF_C = math.exp(-26 / 27.5)
REF_D = math.exp(69.2 / 27.5)
pos = st.floats(1e-2, 50.0)


def scan_root_count(c, d, num=100_000):
    """Sign changes of the cubic over a log grid covering every possible root."""
    lo, hi = min(d, 1 / d), max(d, 1 / d)
    u = np.geomspace(lo * 0.5, hi * 2.0, num)
    s = np.sign(cubic(u, c, d))
    return int(np.count_nonzero(s[1:] != s[:-1]))


def test_g_examples():
    assert map_g(1.0, 1.0, 1.0) == 1.0
    assert map_g(1.0, 2.5, 0.7) == pytest.approx((2.5 * 0.7 + 1) / (2.5 + 0.7), rel=1e-15)
    u = np.geomspace(1e-3, 1e3, 50)
    np.testing.assert_allclose(map_g(u, 3.7, 1.0), 1.0, rtol=1e-15)
    assert map_g(1.0, 1.0, 9.0) == pytest.approx(1.0, rel=1e-15)


@given(u=pos, c=pos, d=pos)
def test_g_bounds(u, c, d):
    lo, hi = min(d, 1 / d), max(d, 1 / d)
    g = map_g(u, c, d)
    assert lo * (1 - 1e-14) <= g <= hi * (1 + 1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        map_g(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        map_g_prime(1.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        fixed_points(0.0, 2.0)


def test_g_prime_examples():
    np.testing.assert_array_equal(map_g_prime(np.array([0.1, 1.0, 7.0]), 2.0, 1.0), 0.0)
    assert abs(map_g_prime(1e-12, 2.0, 5.0)) < 1e-9


@given(u=st.floats(0.05, 20.0), c=st.floats(0.05, 20.0), d=st.floats(0.05, 20.0))
def test_g_prime_matches_finite_difference(u, c, d):
    eps = 1e-6
    fd = (map_g(u + eps, c, d) - map_g(u - eps, c, d)) / (2 * eps)
    assert abs(map_g_prime(u, c, d) - fd) <= 1e-6
    gp = map_g_prime(u, c, d)
    assert gp == 0 or np.sign(gp) == np.sign(d - 1)


@pytest.mark.parametrize("d", [0.2, 1.0, 3.0, 11.0])
def test_c_equal_one_has_root_one(d):
    assert any(abs(u - 1) <= 1e-12 for u in fixed_points(1.0, d).roots)


def test_d_equal_one_single_root():
    rep = fixed_points(4.2, 1.0)
    assert rep.roots == pytest.approx((1.0,), rel=1e-14)
    assert rep.region == "unique"


def test_reference_point_roots():
    rep = fixed_points(REF_C, REF_D)
    assert rep.num_roots == 3 and rep.region == "three"
    u1, u2, u3 = rep.roots
    assert 0 < u1 < 0.1 and 1 < u2 < 5 and 5 < u3 < 10
    assert scan_root_count(REF_C, REF_D) == 3
    # the scan brackets each returned root
    u = np.geomspace(1e-3, 20, 100_000)
    s = np.sign(cubic(u, REF_C, REF_D))
    idx = np.nonzero(s[1:] != s[:-1])[0]
    for r, i in zip(rep.roots, idx):
        assert u[i] <= r <= u[i + 1]
    assert rep.stability == ("attracting", "repelling", "attracting")


@given(c=st.floats(0.01, 20.0), d=st.floats(0.01, 20.0))
def test_root_residuals(c, d):
    for u in fixed_points(c, d).roots:
        assert u > 0
        assert abs(cubic(u, c, d)) <= 1e-12 * max(1.0, c * u**3)
        assert abs(map_g(u, c, d) - u) <= 1e-12 * max(1.0, u)


def test_root_count_oracle():
    rng = np.random.default_rng(1234)
    cs, ds = rng.uniform(0.01, 20, 10_000), rng.uniform(0.01, 20, 10_000)
    # every root lies between min(d, 1/d) and max(d, 1/d), inside [0.01, 100]
    u = np.geomspace(0.005, 200.0, 100_000)
    u2, u3 = u**2, u**3
    scanned = np.empty(len(cs), dtype=int)
    for k in range(0, len(cs), 40):
        c, d = cs[k:k + 40, None], ds[k:k + 40, None]
        s = np.signbit(c * u3 - c * d * u2 + d * u - 1.0)
        scanned[k:k + 40] = np.count_nonzero(s[:, 1:] != s[:, :-1], axis=1)
    mismatches, exempt = [], 0
    for c, d, n_scan in zip(cs, ds, scanned):
        if d > 3:
            e1, e2 = thresholds(d)
            if min(abs(c - e1) / e1, abs(c - e2) / e2) <= 1e-8:
                exempt += 1
                continue
        if fixed_points(c, d).num_roots != n_scan:
            mismatches.append((c, d))
    assert not mismatches
    assert exempt < 10


def test_root_count_oracle_three_root_heavy():
    # uniform draws rarely land in the window; sample inside it as well
    rng = np.random.default_rng(99)
    for _ in range(300):
        d = rng.uniform(3.05, 20)
        e1, e2 = thresholds(d)
        c = math.exp(rng.uniform(math.log(e1), math.log(e2)))
        if min(c / e1 - 1, 1 - c / e2) < 1e-6:
            continue
        assert fixed_points(c, d).num_roots == 3 == scan_root_count(c, d)


def test_companion_matrix_oracle():
    rng = np.random.default_rng(3)
    for _ in range(500):
        c, d = np.exp(rng.uniform(-3, 3, 2))
        z = np.roots([c, -c * d, d, -1.0])
        real = np.sort(z[np.abs(z.imag) <= 1e-7 * np.abs(z)].real)
        rep = fixed_points(c, d)
        if rep.region != "unique" and len(real) != rep.num_roots:
            continue  # close pair; the companion eigenvalues may split off the axis
        assert len(real) == rep.num_roots
        assert np.all(real > 0)
        np.testing.assert_allclose(rep.roots, real, rtol=1e-6)


def test_discriminant_sign_matches_count():
    rng = np.random.default_rng(17)
    for _ in range(500):
        c, d = np.exp(rng.uniform(-3, 3, 2))
        n = fixed_points(c, d).num_roots
        if discriminant(c, d) > 1e-9 * c * d**4:
            assert n == 3
        elif discriminant(c, d) < -1e-9 * c * d**4:
            assert n == 1


@pytest.mark.parametrize("d", [3.5, 4.0, REF_D, 20.0, 100.0])
def test_thresholds_closed_form(d):
    e1, e2 = thresholds(d)
    root = math.sqrt((d * d - 9) ** 3 * (d * d - 1))
    B = d**4 + 18 * d * d - 27
    assert e1 == pytest.approx((B - root) / (8 * d**3), rel=1e-10)
    assert e2 == pytest.approx((B + root) / (8 * d**3), rel=1e-12)
    assert 0 < e1 < e2
    assert e1 * e2 == pytest.approx(1.0, rel=1e-10)


def test_thresholds_reference_window():
    e1, e2 = thresholds(12.38)
    assert e1 < 0.3885 < e2


def test_threshold_window_collapses():
    widths = [np.subtract(*thresholds(d))[()] * -1 for d in (3.1, 3.01, 3.001)]
    assert widths[0] > widths[1] > widths[2] > 0
    assert widths[2] < 1e-3


@pytest.mark.parametrize("d", [3.0, 2.0, 0.5])
def test_thresholds_domain(d):
    with pytest.raises(DomainError):
        thresholds(d)


def test_sweep_one_three_one():
    e1, e2 = thresholds(4.0)
    counts = [fixed_points(c, 4.0).num_roots for c in np.linspace(e1 * 0.5, e2 * 1.5, 2001)]
    changes = [counts[0]] + [b for a, b in zip(counts, counts[1:]) if a != b]
    assert changes == [1, 3, 1]
    m = 1e-6
    assert fixed_points(e1 * (1 - m), 4.0).num_roots == 1
    assert fixed_points(e1 * (1 + m), 4.0).num_roots == 3
    assert fixed_points(e2 * (1 - m), 4.0).num_roots == 3
    assert fixed_points(e2 * (1 + m), 4.0).num_roots == 1


@pytest.mark.parametrize("d", [4.0, 7.5, REF_D])
def test_bifurcation_pattern(d):
    e1, e2 = thresholds(d)
    mid = math.sqrt(e1 * e2)
    pattern = [fixed_points(c, d).num_roots for c in (e1 * 0.5, e1, mid, e2, e2 * 2)]
    assert pattern == [1, 2, 3, 2, 1]
    for c in (e1, e2):
        rep = fixed_points(c, d)
        assert rep.region == "boundary" and sorted(rep.multiplicity) == [1, 2]


def test_stability_ordering_random():
    rng = np.random.default_rng(44)
    seen = 0
    for _ in range(200):
        d = rng.uniform(3.2, 30)
        e1, e2 = thresholds(d)
        c = math.exp(rng.uniform(math.log(e1), math.log(e2)))
        rep = fixed_points(c, d)
        if rep.num_roots != 3:
            continue
        seen += 1
        gp = [abs(map_g_prime(u, c, d)) for u in rep.roots]
        assert gp[0] < 1 < gp[1] and gp[2] < 1
    assert seen > 150


@given(c=pos, d=pos)
def test_symmetry_point_criterion(c, d):
    assert cubic(1.0, c, d) == pytest.approx((c - 1) * (1 - d), abs=1e-12 * (1 + c * d))
    has_one = any(abs(u - 1) <= 1e-9 for u in fixed_points(c, d).roots)
    if abs((c - 1) * (d - 1)) > 1e-6:
        assert not has_one


def test_critical_points_examples():
    c = 2.0
    cp = critical_points(c, 3.0)
    assert len(cp) == 2 and cp[0] == pytest.approx(cp[1], rel=1e-15)
    assert cp[0] ** 2 == pytest.approx(1 / c, rel=1e-14)
    assert critical_points(1.0, 2.0) == []
    assert critical_points(1.0, 1.5) == []


def test_critical_points_against_scan():
    c, d = 1.0, 5.0
    u = np.geomspace(1e-3, 1e3, 200_001)
    f = u * map_g_prime(u, c, d) - map_g(u, c, d)
    idx = np.nonzero(np.sign(f[1:]) != np.sign(f[:-1]))[0]
    cp = critical_points(c, d)
    assert len(idx) == len(cp) == 2
    for r, i in zip(cp, idx):
        assert u[i] <= r <= u[i + 1]


def test_classify_examples():
    assert classify(5.0, 2.0) == "unique"
    assert classify(0.3885, 12.38) == "three"
    e1, _ = thresholds(4.0)
    assert classify(e1 - 0.01 * e1, 4.0) == "unique"


@given(c=st.floats(0.01, 20.0), d=st.floats(0.01, 20.0))
def test_classify_agrees_with_roots(c, d):
    rep = fixed_points(c, d)
    assert classify(c, d) == {1: "unique", 2: "boundary", 3: "three"}[rep.num_roots]
    if d <= 3:
        assert rep.num_roots == 1


def test_ti_fields():
    f = TIFields.from_u(2.5)
    assert f.u1 == f.u2 == pytest.approx(2.5, rel=1e-15)
    q = f.quadruple()
    assert q.h_pp == q.h_mp == f.h1 and q.h_mm == q.h_pm == f.h2
    with pytest.raises(DomainError):
        TIFields.from_u(0.0)


def test_phase_transition_witness():
    rng = np.random.default_rng(7)
    t3, t2 = build_tree(2, 3), build_tree(2, 2)
    for _ in range(10):
        d = rng.uniform(3.5, 12.5)
        e1, e2 = thresholds(d)
        c = math.sqrt(e1 * e2) * math.exp(rng.uniform(-0.3, 0.3) * math.log(e2 / e1) / 2)
        if classify(c, d) != "three":
            continue
        p = ModelParams.from_reduced(c, d)
        res = [consistency_residual(t3, t2, p, f.boundary(), f.boundary()) for f in fixed_points(c, d).fields()]
        assert len(res) == 3 and max(res) <= 1e-10
