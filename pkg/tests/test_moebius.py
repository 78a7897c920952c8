import cmath
import math

import numpy as np
import pytest
import sympy as sp

from polydyn.dynamics import estimate_divergence_rate
from polydyn.geometry import dist_disc, dist_halfplane
from polydyn.moebius import (
    INF,
    ClassificationError,
    MoebiusH,
    MoebiusHtoD,
    abel_conjugator_parabolic,
    classify,
    divergence_rate_1d,
    linearizer_hyperbolic,
    schroeder_conjugator_elliptic,
)
from polydyn.polyauto import PolydiscAuto
from polydyn.random_maps import random_moebius, random_of_kind

Z = sp.symbols("z")


def sym(m):
    return lambda e: (sp.nsimplify(m.a) * e + sp.nsimplify(m.b)) / (sp.nsimplify(m.c) * e + sp.nsimplify(m.d))


def same_map(m1, m2, tol=1e-12):
    return np.allclose(m1.matrix, m2.matrix, atol=tol)


def test_normalization():
    m = MoebiusH(-4, 0, 0, -1)
    assert (m.a, m.d) == (2.0, 0.5)
    assert MoebiusH(0, 1, -1, 0) == MoebiusH(0, -1, 1, 0)
    with pytest.raises(ValueError):
        MoebiusH(1, 0, 0, -1)


def test_algebra():
    assert same_map(MoebiusH(2, 0, 0, 1) @ MoebiusH(1, 1, 0, 1), MoebiusH(2, 2, 0, 1))
    assert same_map(MoebiusH.translation(1).inverse(), MoebiusH.translation(-1))
    assert same_map(MoebiusH.scaling(2).iterate(3), MoebiusH.scaling(8))
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = random_moebius(rng)
        assert (m.inverse() @ m).is_identity(1e-12)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        assert m.iterate(-2)(m.iterate(2)(z)) == pytest.approx(z, abs=1e-9)


def test_boundary_action():
    assert MoebiusH(2, 0, 0, 1).apply_boundary(INF) == INF
    assert MoebiusH(0, -1, 1, 0).apply_boundary(INF) == 0.0
    assert MoebiusH(0, -1, 1, 0).apply_boundary(0.0) == INF


def test_classify_examples():
    h = classify(MoebiusH(2, 0, 0, 0.5))
    assert h.kind == "hyperbolic" and h.boundary_fixed == (INF, 0.0)
    assert h.dilation == pytest.approx(0.25, abs=1e-15)
    p = classify(MoebiusH(1, 1, 0, 1))
    assert p.kind == "parabolic" and p.boundary_fixed == (INF,) and p.translation_sign == 1
    e = classify(MoebiusH(0, -1, 1, 0))
    assert e.kind == "elliptic" and e.fixed_point_interior == pytest.approx(1j)
    assert e.multiplier == pytest.approx(-1)
    assert classify(MoebiusH.identity()).kind == "identity"
    assert set(e.to_dict()) == {"kind", "fixed_point_interior", "multiplier"}


def test_elliptic_multiplier_by_finite_difference():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = random_of_kind(rng, "elliptic")
        cls = classify(m)
        p, h = cls.fixed_point_interior, 1e-6
        deriv = (m(p + h) - m(p - h)) / (2 * h)
        assert abs(m(p) - p) < 1e-9
        assert abs(deriv - cls.multiplier) < 1e-6
        assert abs(abs(cls.multiplier) - 1) < 1e-12


def test_rotation_multiplier():
    theta = 0.7
    cls = classify(MoebiusH.rotation(theta))
    assert cls.multiplier == pytest.approx(cmath.exp(-2j * theta), abs=1e-14)


def test_classification_is_conjugation_invariant():
    rng = np.random.default_rng(4)
    for kind in ("elliptic", "parabolic", "hyperbolic"):
        for _ in range(20):
            m = random_of_kind(rng, kind)
            h = random_moebius(rng)
            c1, c2 = classify(m), classify(h @ m @ h.inverse())
            assert c1.kind == c2.kind == kind
            if kind == "hyperbolic":
                assert c2.dilation == pytest.approx(c1.dilation, rel=1e-9)
            if kind == "parabolic":
                assert c1.translation_sign == c2.translation_sign


def test_hyperbolic_fixed_points_are_fixed_and_attracting():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = random_of_kind(rng, "hyperbolic")
        att, rep = classify(m).boundary_fixed
        for x in (att, rep):
            if math.isfinite(x):
                assert m.apply_boundary(x) == pytest.approx(x, abs=1e-8 * max(1, abs(x)))
        if math.isfinite(att):
            assert abs(m.derivative(att)) < 1


def test_divergence_rate_1d():
    assert divergence_rate_1d(MoebiusH.scaling(4)) == pytest.approx(math.log(4), abs=1e-15)
    assert divergence_rate_1d(MoebiusH.translation(1)) == 0.0
    assert divergence_rate_1d(MoebiusH.identity()) == 0.0
    # orbit oracle: k(i, 4^m i)/m
    assert dist_halfplane(1j, 4.0**50 * 1j) / 50 == pytest.approx(math.log(4), rel=1e-13)


def test_divergence_rate_1d_matches_estimator():
    rng = np.random.default_rng(6)
    for kind in ("hyperbolic", "elliptic"):
        for _ in range(5):
            m = random_of_kind(rng, kind)
            est = estimate_divergence_rate(PolydiscAuto.diagonal([m]), m=2000).c_estimate
            assert abs(est - divergence_rate_1d(m)) < 5e-3


def test_linearizer_examples_symbolically():
    assert linearizer_hyperbolic(MoebiusH.scaling(4)).is_identity(1e-15)
    gamma = MoebiusH(5, 3, 3, 5)
    g = linearizer_hyperbolic(gamma)
    assert same_map(g, MoebiusH(1, 1, -1, 1))
    assert sp.simplify(sym(g)(sym(gamma)(Z)) - 4 * sym(g)(Z)) == 0
    gamma = MoebiusH(1, 0, 0, 9)
    g = linearizer_hyperbolic(gamma)
    assert same_map(g, MoebiusH(0, -1, 1, 0))
    assert sp.simplify(sym(g)(sym(gamma)(Z)) - 9 * sym(g)(Z)) == 0
    with pytest.raises(ClassificationError):
        linearizer_hyperbolic(MoebiusH.translation(1))


def test_linearizer_residual_and_positive_multiples():
    rng = np.random.default_rng(7)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0.1, 5, 100)
    for _ in range(30):
        gamma = random_of_kind(rng, "hyperbolic")
        lam = classify(gamma).dilation
        g = linearizer_hyperbolic(gamma)
        assert np.max(dist_halfplane(g(gamma(z)), g(z) / lam)) < 1e-10
        r = rng.uniform(0.1, 10)
        gr = g.scaled(r)
        assert np.max(dist_halfplane(gr(gamma(z)), gr(z) / lam)) < 1e-10


@pytest.mark.parametrize("gamma, k, expected, sign", [
    (MoebiusH.translation(3), 2, MoebiusH.scaling(2 / 3), 1),
    (MoebiusH.translation(-3), 1, MoebiusH.scaling(1 / 3), -1),
    (MoebiusH(1, 0, -1, 1), 1, MoebiusH(0, -1, 1, 0), 1),
])
def test_abel_conjugator_examples(gamma, k, expected, sign):
    g, s = abel_conjugator_parabolic(gamma, k)
    assert same_map(g, expected) and s == sign
    assert sp.simplify(sym(g)(sym(gamma)(Z)) - sym(g)(Z) - s * k) == 0


def test_abel_conjugator_random():
    rng = np.random.default_rng(8)
    z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(0.1, 5, 100)
    for _ in range(30):
        gamma = random_of_kind(rng, "parabolic")
        k = int(rng.integers(1, 6))
        g, s = abel_conjugator_parabolic(gamma, k)
        assert s == classify(gamma).translation_sign
        assert np.max(dist_halfplane(g(gamma(z)), g(z) + s * k)) < 1e-9
    with pytest.raises(ClassificationError):
        abel_conjugator_parabolic(MoebiusH.scaling(2), 1)


def test_schroeder_conjugator():
    g, mult = schroeder_conjugator_elliptic(MoebiusH(0, -1, 1, 0))
    assert g(2j) == pytest.approx(1 / 3)
    assert mult == pytest.approx(-1)
    w = sp.symbols("w")
    gs = (w - sp.I) / (w + sp.I)
    assert sp.simplify(gs.subs(w, -1 / w) + gs) == 0
    rng = np.random.default_rng(9)
    z = rng.uniform(-5, 5, 1000) + 1j * np.exp(rng.uniform(-5, 3, 1000))
    for _ in range(20):
        gamma = random_of_kind(rng, "elliptic")
        g, mult = schroeder_conjugator_elliptic(gamma)
        assert np.all(np.abs(g(z)) < 1)
        assert abs(g(classify(gamma).fixed_point_interior)) < 1e-9
        assert np.max(dist_disc(g(gamma(z[:100])), mult * g(z[:100]))) < 1e-8
    with pytest.raises(ClassificationError):
        schroeder_conjugator_elliptic(MoebiusH.scaling(2))


def test_moebius_h_to_d_rejects_bad_maps():
    MoebiusHtoD.centered_at(1 + 2j)
    with pytest.raises(ValueError):
        MoebiusHtoD(1, 1j, 1, -1j)  # pole at i
    with pytest.raises(ValueError):
        MoebiusHtoD(2, -1j, 1, 1j)  # tends to 2 at infinity
    assert MoebiusHtoD(1, -1j, 1, 1j)(2j) == pytest.approx(1 / 3)


def test_serialization_roundtrip():
    m = MoebiusH(0.3, -1.7, 2.2, 1.1)
    assert MoebiusH.from_dict(m.to_dict()) == m
    g = MoebiusHtoD.centered_at(0.5 + 2j).rotated(cmath.exp(0.3j))
    assert MoebiusHtoD.from_dict(g.to_dict()) == MoebiusHtoD(g.a, g.b, g.c, g.d)
