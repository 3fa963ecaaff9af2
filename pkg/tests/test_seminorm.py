"""Seminorm, pairing, pointwise operator, Hoelder seminorm, slope operators."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracpq.domain import Disk, GridFunction, MaskShape, Rectangle, build_domain, cone_function
from fracpq.errors import CollarTooThin, DomainMismatch, NotInterior
from fracpq.seminorm import (
    FracParams,
    gagliardo,
    gagliardo_with_log,
    holder_seminorm,
    pairing,
    pointwise_Lsm,
    seminorm_pow_and_grad,
    upper_lower_slope,
)
from reference import (
    reference_gagliardo,
    reference_pairing,
    reference_pointwise,
    small_grids,
)


def rand_fn(dom, rng) -> GridFunction:
    return GridFunction(dom, rng.standard_normal(dom.n_interior))


def test_gagliardo_matches_double_loop_reference():
    rng = np.random.default_rng(7)
    for k, dom in enumerate(small_grids()):
        u = rand_fn(dom, rng)
        fp = FracParams(s=0.3 + 0.1 * k, m=2.0 + 1.5 * k, tail_correction=bool(k % 2))
        T = fp.resolve_T(dom)
        got = gagliardo(u, fp)
        want = reference_gagliardo(u, fp.s, fp.m, T, fp.tail_correction)
        assert abs(got - want) <= 1e-12 * want


def test_pairing_matches_double_loop_reference():
    rng = np.random.default_rng(8)
    for k, dom in enumerate(small_grids()):
        u, v = rand_fn(dom, rng), rand_fn(dom, rng)
        fp = FracParams(s=0.6, m=3.0 + k, tail_correction=bool((k + 1) % 2))
        T = fp.resolve_T(dom)
        got = pairing(u, v, fp)
        want = reference_pairing(u, v, fp.s, fp.m, T, fp.tail_correction)
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-30)


def test_gagliardo_zero_and_positivity():
    dom = small_grids()[0]
    fp = FracParams(s=0.5, m=3.0)
    zero = GridFunction(dom, np.zeros(dom.n_interior))
    assert gagliardo(zero, fp) == 0.0
    rng = np.random.default_rng(3)
    u = rand_fn(dom, rng)
    assert gagliardo(u, fp) > 0.0  # interior-collar pairs see any nonzero value


def test_gagliardo_homogeneity():
    dom = small_grids()[1]
    rng = np.random.default_rng(11)
    u = rand_fn(dom, rng)
    fp = FracParams(s=0.4, m=5.0)
    got = gagliardo(-3.0 * u, fp)
    assert got == pytest.approx(3.0 * gagliardo(u, fp), rel=1e-12)


def test_pairing_equals_gagliardo_power():
    rng = np.random.default_rng(5)
    doms = small_grids()
    for k in range(8):
        dom = doms[k % len(doms)]
        u = rand_fn(dom, rng)
        s = float(rng.uniform(0.1, 0.9))
        m = float(rng.uniform(1.5, 40.0))
        fp = FracParams(s=s, m=m)
        val, log_pow = gagliardo_with_log(u, fp)
        assert val == pytest.approx(math.exp(log_pow / m), rel=1e-13)
        assert pairing(u, u, fp) == pytest.approx(val**m, rel=1e-12)


def test_pairing_linear_in_test_function():
    dom = small_grids()[2]
    rng = np.random.default_rng(9)
    u, v, w = (rand_fn(dom, rng) for _ in range(3))
    fp = FracParams(s=0.7, m=4.5)
    lhs = pairing(u, 2.0 * v + (-0.5) * w, fp)
    rhs = 2.0 * pairing(u, v, fp) - 0.5 * pairing(u, w, fp)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_pairing_is_gateaux_derivative():
    dom = small_grids()[0]
    rng = np.random.default_rng(13)
    u, v = rand_fn(dom, rng), rand_fn(dom, rng)
    fp = FracParams(s=0.5, m=4.0)
    eps = 1e-6

    def f(w):
        return gagliardo(w, fp) ** fp.m / fp.m

    fd = (f(u + eps * v) - f(u - eps * v)) / (2 * eps)
    assert pairing(u, v, fp) == pytest.approx(fd, rel=1e-5)


def test_pow_and_grad_consistency():
    dom = small_grids()[3]
    rng = np.random.default_rng(17)
    u = rand_fn(dom, rng)
    fp = FracParams(s=0.5, m=6.0)
    log_pow, grad = seminorm_pow_and_grad(u, fp)
    val, log_pow2 = gagliardo_with_log(u, fp)
    assert log_pow == pytest.approx(log_pow2, rel=1e-12)
    # gradient rows are pairings with basis vectors
    for idx in [0, dom.n_interior // 2, dom.n_interior - 1]:
        e = np.zeros(dom.n_interior)
        e[idx] = 1.0
        assert grad[idx] == pytest.approx(
            pairing(u, GridFunction(dom, e), fp), rel=1e-11, abs=1e-300
        )


def test_triangle_monotonicity_of_modulus():
    dom = small_grids()[1]
    rng = np.random.default_rng(23)
    fp = FracParams(s=0.5, m=3.0)
    for _ in range(5):
        u = rand_fn(dom, rng)
        au = GridFunction(dom, np.abs(u.values))
        assert gagliardo(au, fp) <= gagliardo(u, fp) + 1e-13


def test_indicator_hand_sum():
    # single interior node, h = 1, T = 2: ordered pairs split into three
    # distance shells (1, sqrt2, 2) of four nodes each, tail disabled
    shape = MaskShape(file_mask=np.ones((1, 1), dtype=bool), h=1.0)
    dom = build_domain(shape, collar_width=2)
    u = GridFunction(dom, np.ones(1))
    fp = FracParams(s=0.5, m=2.0, T=2.0, tail_correction=False)
    hand = 2.0 * (4 * 1.0 ** (-3.0) + 4 * math.sqrt(2.0) ** (-3.0) + 4 * 2.0 ** (-3.0))
    assert gagliardo(u, fp) == pytest.approx(math.sqrt(hand), rel=1e-13)
    assert gagliardo(u, fp) == pytest.approx(
        reference_gagliardo(u, 0.5, 2.0, 2.0, False), rel=1e-13
    )


def test_domain_mismatch():
    dom_a, dom_b = small_grids()[:2]
    u = GridFunction(dom_a, np.ones(dom_a.n_interior))
    v = GridFunction(dom_b, np.ones(dom_b.n_interior))
    with pytest.raises(DomainMismatch):
        pairing(u, v, FracParams(s=0.5, m=2.0))


def test_collar_too_thin_and_small_T():
    dom = build_domain(Rectangle(0.4, 0.4), h=0.1, collar_width=2)
    u = GridFunction(dom, np.ones(dom.n_interior))
    with pytest.raises(CollarTooThin):
        gagliardo(u, FracParams(s=0.5, m=2.0))  # default T needs collar 4
    with pytest.raises(ValueError):
        gagliardo(u, FracParams(s=0.5, m=2.0, T=0.1))  # below bbox diameter


def test_frac_params_validation():
    with pytest.raises(ValueError):
        FracParams(s=0.0, m=2.0)
    with pytest.raises(ValueError):
        FracParams(s=1.0, m=2.0)
    with pytest.raises(ValueError):
        FracParams(s=0.5, m=1.0)
    with pytest.raises(ValueError):
        FracParams(s=0.5, m=2.0, T=-1.0)


def test_pointwise_zero_and_strict_max():
    dom = small_grids()[0]
    fp = FracParams(s=0.5, m=3.0)
    zero = GridFunction(dom, np.zeros(dom.n_interior))
    i = int(dom.interior_idx[0])
    assert pointwise_Lsm(zero, i, fp) == 0.0
    center = int(dom.deepest[0])
    vals = np.zeros(dom.n_interior)
    vals[np.searchsorted(dom.interior_idx, center)] = 1.0
    spike = GridFunction(dom, vals)
    assert pointwise_Lsm(spike, center, fp) < 0.0


def test_pointwise_matches_reference_on_cone():
    dom = build_domain(Disk(0.5), h=1 / 16)
    phi = cone_function(dom)
    fp = FracParams(s=0.5, m=4.0)
    T = fp.resolve_T(dom)
    center = int(dom.deepest[0])
    off = int(dom.interior_idx[10])
    for node in (center, off):
        got = pointwise_Lsm(phi, node, fp)
        want = reference_pointwise(phi, node, fp.s, fp.m, T, fp.tail_correction)
        assert got == pytest.approx(want, rel=1e-11)


def test_pointwise_consistent_with_pairing():
    # <(-Delta_m)^s u, v> = -sum_i Lsm(u, i) v_i h^N exactly (same terms regrouped)
    dom = small_grids()[4]
    rng = np.random.default_rng(29)
    u, v = rand_fn(dom, rng), rand_fn(dom, rng)
    fp = FracParams(s=0.35, m=3.5)
    lhs = pairing(u, v, fp)
    rhs = -sum(
        pointwise_Lsm(u, int(i), fp) * v.values[k] * dom.h**2
        for k, i in enumerate(dom.interior_idx)
    )
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_pointwise_not_interior():
    dom = small_grids()[0]
    u = GridFunction(dom, np.ones(dom.n_interior))
    with pytest.raises(NotInterior):
        pointwise_Lsm(u, 0, FracParams(s=0.5, m=2.0))


def test_holder_zero_and_homogeneity():
    dom = small_grids()[0]
    zero = GridFunction(dom, np.zeros(dom.n_interior))
    assert holder_seminorm(zero, 0.5) == (0.0, (0, 1))
    rng = np.random.default_rng(31)
    u = rand_fn(dom, rng)
    v5, _ = holder_seminorm(u, 0.5)
    v5s, _ = holder_seminorm(-2.5 * u, 0.5)
    assert v5s == pytest.approx(2.5 * v5, rel=1e-13)


def test_holder_attaining_pair_lexicographic():
    shape = MaskShape(file_mask=np.ones((1, 1), dtype=bool), h=1.0)
    dom = build_domain(shape, collar_width=2)
    u = GridFunction(dom, np.ones(1))
    val, (i, j) = holder_seminorm(u, 0.5)
    assert val == 1.0  # four axis neighbors tie at quotient 1/1^0.5
    center = int(dom.interior_idx[0])
    # ties are (center, each axis neighbor); first sorted pair has the
    # smallest partner index, the neighbor one x-step left of center
    assert j == center
    assert i == center - dom.extent[1]


def test_holder_exhaustive_on_small_grid():
    dom = small_grids()[3]
    rng = np.random.default_rng(37)
    u = rand_fn(dom, rng)
    full = u.full().ravel()
    xy = dom.all_xy
    best = 0.0
    for i in range(dom.n_nodes):
        for j in range(i + 1, dom.n_nodes):
            d = math.hypot(xy[i, 0] - xy[j, 0], xy[i, 1] - xy[j, 1])
            best = max(best, abs(full[i] - full[j]) / d**0.5)
    val, _ = holder_seminorm(u, 0.5)
    assert val == pytest.approx(best, rel=1e-13)


def test_cone_holder_near_paper_value_quick():
    dom = build_domain(Disk(0.5), h=1 / 32)
    phi = cone_function(dom)
    val, _ = holder_seminorm(phi, 0.5)
    assert abs(val - 0.5**0.5) <= 0.05 * 0.5**0.5


def test_slope_zero_and_cone_center():
    dom = build_domain(Disk(0.5), h=1 / 32)
    zero = GridFunction(dom, np.zeros(dom.n_interior))
    center = int(dom.deepest[0])
    assert upper_lower_slope(zero, center, 0.5) == (0.0, 0.0)
    phi = cone_function(dom)
    up, lo = upper_lower_slope(phi, center, 0.5)
    R = dom.inradius
    assert abs(lo + R**0.5) <= 0.05 * R**0.5  # L- ~ -R^(1-s)
    assert up == pytest.approx(-dom.h**0.5, rel=1e-12)  # nearest ring, still below apex
    assert up >= lo


def test_slope_odd_symmetry_and_holder_dominates():
    dom = small_grids()[2]
    rng = np.random.default_rng(41)
    u = rand_fn(dom, rng)
    s = 0.6
    hol, _ = holder_seminorm(u, s)
    for i in dom.interior_idx[:: max(1, dom.n_interior // 7)]:
        up, lo = upper_lower_slope(u, int(i), s)
        mup, mlo = upper_lower_slope(-1.0 * u, int(i), s)
        assert mup == pytest.approx(-lo, rel=1e-13, abs=1e-15)
        assert mlo == pytest.approx(-up, rel=1e-13, abs=1e-15)
        assert hol >= up - 1e-13 and hol >= -lo - 1e-13


def test_slope_collar_witness_negative():
    dom = small_grids()[0]
    rng = np.random.default_rng(43)
    u = GridFunction(dom, 1.0 + rng.uniform(0, 1, dom.n_interior))
    i = int(dom.interior_idx[np.argmax(u.values)])
    _, lo = upper_lower_slope(u, i, 0.5)
    assert lo < 0.0  # exterior zeros force a negative quotient


def test_slope_not_interior():
    dom = small_grids()[0]
    u = GridFunction(dom, np.ones(dom.n_interior))
    with pytest.raises(NotInterior):
        upper_lower_slope(u, 0, 0.5)
