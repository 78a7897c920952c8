"""Seeded random automorphisms for property tests and experiments."""

import math

from polydyn.moebius import MoebiusH
from polydyn.polyauto import CycleAuto, CycleBlock, CycleDecomposition

KINDS = ("elliptic", "parabolic", "hyperbolic")


def random_moebius(rng, bound=3.0, min_det=0.25):
    """Entries uniform in [-bound, bound], rejected if |det| < min_det, then normalized."""
    while True:
        a, b, c, d = rng.uniform(-bound, bound, size=4)
        det = a * d - b * c
        if abs(det) < min_det:
            continue
        if det < 0:
            a, b = -a, -b
        return MoebiusH(a, b, c, d)


def canonical_of_kind(rng, kind):
    """z -> kappa z, z -> z +- beta, or a rotation about i, with random parameters."""
    if kind == "hyperbolic":
        return MoebiusH.scaling(math.exp(rng.uniform(0.2, 3.0)) ** rng.choice([-1, 1]))
    if kind == "parabolic":
        return MoebiusH.translation(rng.uniform(0.3, 3.0) * rng.choice([-1, 1]))
    if kind == "elliptic":
        return MoebiusH.rotation(rng.uniform(0.1, math.pi - 0.1))
    raise ValueError(f"unknown kind {kind!r}")


def random_of_kind(rng, kind, bound=3.0):
    h = random_moebius(rng, bound)
    return h @ canonical_of_kind(rng, kind) @ h.inverse()


def random_cycle(rng, k, kind=None, bound=3.0):
    """A cycle automorphism of H^k; with ``kind`` given, Gamma_1 is forced to that type."""
    gammas = [random_moebius(rng, bound) for _ in range(k)]
    if kind is not None:
        head = MoebiusH.identity()
        for g in gammas[:-1]:
            head = head @ g
        gammas[-1] = head.inverse() @ random_of_kind(rng, kind, bound)
    return CycleAuto(tuple(gammas))


def _cycle_kinds(rng, n, kind):
    if kind is None:
        return [None] * n
    if kind == "elliptic":
        return ["elliptic"] * n
    others = KINDS if kind == "hyperbolic" else ("elliptic", "parabolic")
    kinds = [str(rng.choice(others)) for _ in range(n)]
    kinds[int(rng.integers(n))] = kind
    return kinds


def random_auto(rng, q, kind=None, bound=3.0):
    """A random automorphism of H^q; ``kind`` forces the overall type."""
    perm = rng.permutation(q)
    seen = [False] * q
    cycles = []
    for s in range(q):
        if seen[s]:
            continue
        coords = []
        j = s
        while not seen[j]:
            seen[j] = True
            coords.append(j)
            j = int(perm[j])
        cycles.append(coords)
    kinds = _cycle_kinds(rng, len(cycles), kind)
    blocks = tuple(CycleBlock(tuple(cs), random_cycle(rng, len(cs), kd, bound))
                   for cs, kd in zip(cycles, kinds))
    return CycleDecomposition(q, blocks).reassemble()
