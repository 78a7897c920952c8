"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from polydyn.dynamics import (
    builtin_intro_example,
    builtin_remark5_example,
    classify_selfmap,
    estimate_divergence_rate,
    estimate_step,
    orbit_stats,
)
from polydyn.funceq import (
    abel_for_auto,
    check_valiron_conditions,
    surjectivity_witness,
    target_grid,
    valiron_for_auto,
    verify_abel,
    verify_valiron,
)
from polydyn.geometry import cayley, cayley_inv, dist_halfplane, dist_poly, random_halfplane_points
from polydyn.normalform import normal_form_cycle, verify_conjugacy
from polydyn.polyauto import CycleAuto, classify_auto, classify_cycle, cycle_decompose
from polydyn.random_maps import random_auto, random_cycle, random_moebius


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_normal_form_conjugacy(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        c = random_cycle(rng, int(rng.integers(1, 6)))
        worst = max(worst, verify_conjugacy(normal_form_cycle(c), c, samples=50))
    elapsed = time.perf_counter() - t0
    report(1, worst < 1e-8 and elapsed < 5.0,
           f"200 random cycles, max conjugacy residual {worst:.2e} (< 1e-8), {elapsed:.2f} s (< 5 s)")


def test_criterion_2_divergence_rate_formula(report):
    rng = np.random.default_rng(102)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        tau = random_auto(rng, int(rng.integers(1, 6)))
        est = estimate_divergence_rate(tau, m=2000).c_estimate
        worst = max(worst, abs(est - classify_auto(tau).divergence_rate))
    elapsed = time.perf_counter() - t0
    report(2, worst < 5e-3 and elapsed < 10.0,
           f"50 random automorphisms, max |formula - estimate| {worst:.2e} (< 5e-3), "
           f"{elapsed:.2f} s (< 10 s)")


def test_criterion_3_valiron(report):
    rng = np.random.default_rng(103)
    grid = target_grid(10, 10)
    res = cond = wit = 0.0
    for _ in range(50):
        tau = random_auto(rng, int(rng.integers(1, 6)), kind="hyperbolic")
        V = valiron_for_auto(tau)
        res = max(res, verify_valiron(V, tau, V.lam, samples=100, m=10)["residual"])
        c = check_valiron_conditions(V, tau, samples=100)
        cond = max(cond, c["homogeneity"], c["invariance"])
        wit = max(wit, surjectivity_witness(V, tau.q, grid))
    ok = res < 1e-9 and cond < 1e-9 and wit < 1e-8 and len(grid) == 100
    report(3, ok, f"50 hyperbolic automorphisms, residual {res:.2e}, conditions {cond:.2e} (< 1e-9), "
                  f"grid witness {wit:.2e} (< 1e-8)")


def test_criterion_4_abel(report):
    rng = np.random.default_rng(104)
    res, margin, sign_stable = 0.0, math.inf, True
    for _ in range(20):
        tau = random_auto(rng, int(rng.integers(1, 6)), kind="parabolic")
        theta = abel_for_auto(tau)
        rep = verify_abel(theta, tau, theta.alpha, samples=100, m=200, step_points=5)
        res = max(res, rep["residual"])
        margin = min(margin, rep["companion_checks"]["min_margin"])
        for blk, pc in zip(cycle_decompose(tau).blocks, classify_auto(tau).per_cycle):
            if pc.kind != "parabolic":
                continue
            g = blk.cycle.gammas
            signs = {normal_form_cycle(CycleAuto(g[r:] + g[:r])).sign for r in range(len(g))}
            sign_stable &= len(signs) == 1
    ok = res < 1e-9 and sign_stable and margin >= -5e-3
    report(4, ok, f"20 parabolic automorphisms, residual {res:.2e} (< 1e-9), sign stable: {sign_stable}, "
                  f"worst step margin {margin:.2e} (>= -5e-3)")


def test_criterion_5_intro_example(report):
    t0 = time.perf_counter()
    f = builtin_intro_example(1j)
    stats = orbit_stats(f, m=10_000)
    cls = classify_selfmap(f, m=10_000, stats=stats)
    zero, half = cayley_inv(0), cayley_inv(0.5)
    s0 = estimate_step(f, [zero, zero], m=10_000).s_estimate
    s1 = estimate_step(f, [half, zero], m=10_000).s_estimate
    elapsed = time.perf_counter() - t0
    ok = (cls.kind == "parabolic" and stats.c_estimate < 1e-2 and s0 < 1e-2 and s1 > 0.5
          and elapsed < 2.0)
    report(5, ok, f"intro map: {cls.kind}, c {stats.c_estimate:.2e} (< 1e-2), s(0,0) {s0:.2e} (< 1e-2), "
                  f"s(1/2,0) {s1:.3f} (> 0.5), {elapsed:.2f} s (< 2 s)")


def test_criterion_6_remark_example(report):
    t0 = time.perf_counter()
    f = builtin_remark5_example(0.3)
    stats = orbit_stats(f, m=5000)
    cls = classify_selfmap(f, m=5000, stats=stats)
    elapsed = time.perf_counter() - t0
    err = abs(stats.c_estimate - 0.3 * math.pi)
    ok = cls.kind == "hyperbolic" and err < 2e-2 and elapsed < 2.0
    report(6, ok, f"remark map: {cls.kind}, |c - 0.3 pi| {err:.2e} (< 2e-2), {elapsed:.2f} s (< 2 s)")


def orbit_oracle(c, m=10_000):
    """Kind read off orbit behaviour only: bounded, unbounded with c = 0, or c > 0."""
    stats = estimate_divergence_rate(c.as_auto(), m=m)
    if stats.c_estimate > 1e-2:
        return "hyperbolic"
    d = stats.dist_to_start
    # elliptic orbits are bounded; parabolic ones drift like 2 log n
    if d[m // 2:].max() - d[: m // 2 + 1].max() < 0.5:
        return "elliptic"
    return "parabolic"


def test_criterion_7_oracle_equivalence(report):
    rng = np.random.default_rng(107)
    kinds = ["elliptic", "parabolic", "hyperbolic"]
    mismatches = []
    for i in range(20):
        c = random_cycle(rng, int(rng.integers(1, 6)), kinds[i % 3])
        by_trace, by_orbit = classify_cycle(c).kind, orbit_oracle(c)
        if by_trace != by_orbit:
            mismatches.append((i, by_trace, by_orbit))
    report(7, not mismatches, f"20 random cycles, trace vs orbit oracle mismatches: {mismatches or 'none'}")


def test_criterion_8_geometry(report):
    rng = np.random.default_rng(108)
    conformal = 0.0
    for _ in range(1000):
        m = random_moebius(rng)
        z, w = random_halfplane_points(rng, (2, 10))
        conformal = max(conformal, float(np.max(np.abs(dist_halfplane(m(z), m(w)) - dist_halfplane(z, w)))))
    z = random_halfplane_points(rng, 10_000)
    roundtrip = float(np.max(np.abs(cayley_inv(cayley(z)) - z) / np.maximum(1.0, np.abs(z))))
    exact = True
    for _ in range(200):
        q = int(rng.integers(1, 7))
        a, b = random_halfplane_points(rng, (2, q))
        exact &= dist_poly(a, b) == max(dist_halfplane(x, y) for x, y in zip(a, b))
    ok = conformal < 1e-10 and roundtrip < 1e-14 and exact
    report(8, ok, f"conformal invariance {conformal:.2e} (< 1e-10) over 1000 maps, Cayley round trip "
                  f"{roundtrip:.2e} (< 1e-14), product-max exact: {exact}")
