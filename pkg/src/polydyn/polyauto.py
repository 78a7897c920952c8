"""Automorphisms of the poly-halfplane H^q.

Every automorphism acts as (tau z)_j = gamma_j(z_{p(j)}) for a permutation p
and automorphisms gamma_j of H. Permutations are stored 0-based; the JSON
form uses 1-based indices.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from polydyn.geometry import DomainError, as_polypoint, dist_poly
from polydyn.moebius import EPS_CLS, MoebiusH, classify, principal_root


def _check_perm(perm):
    perm = tuple(int(i) for i in perm)
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
    return perm


def _apply(perm, gammas, z):
    if isinstance(z, np.ndarray):
        if z.shape[-1] != len(perm):
            raise DomainError(f"expected {len(perm)} coordinates, got {z.shape[-1]}")
        out = np.empty(z.shape, dtype=complex)
        for j, (pj, g) in enumerate(zip(perm, gammas)):
            out[..., j] = g(z[..., pj])
        return out
    if len(z) != len(perm):
        raise DomainError(f"expected {len(perm)} coordinates, got {len(z)}")
    return [g(z[pj]) for pj, g in zip(perm, gammas)]


@dataclass(frozen=True)
class PolydiscAuto:
    perm: Tuple[int, ...]
    gammas: Tuple[MoebiusH, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", _check_perm(self.perm))
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if len(self.gammas) != len(self.perm):
            raise ValueError("need one automorphism of H per coordinate")
        if not self.perm:
            raise ValueError("dimension must be at least 1")

    @property
    def q(self):
        return len(self.perm)

    dim = q

    @classmethod
    def identity(cls, q):
        return cls(tuple(range(q)), (MoebiusH.identity(),) * q)

    @classmethod
    def diagonal(cls, gammas):
        return cls(tuple(range(len(gammas))), tuple(gammas))

    def __call__(self, z):
        """Apply to a point: numpy arrays may carry leading batch axes;
        other sequences (e.g. lists of gmpy2.mpc) return a list."""
        return _apply(self.perm, self.gammas, z)

    def compose(self, other):
        """self o other."""
        if other.q != self.q:
            raise DomainError(f"dimension mismatch: {self.q} vs {other.q}")
        perm = tuple(other.perm[p] for p in self.perm)
        gammas = tuple(g @ other.gammas[p] for g, p in zip(self.gammas, self.perm))
        return PolydiscAuto(perm, gammas)

    __matmul__ = compose

    def inverse(self):
        pinv = [0] * self.q
        for j, p in enumerate(self.perm):
            pinv[p] = j
        return PolydiscAuto(tuple(pinv), tuple(self.gammas[pinv[i]].inverse() for i in range(self.q)))

    def iterate(self, n):
        if n < 0:
            return self.inverse().iterate(-n)
        result, base = PolydiscAuto.identity(self.q), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def is_identity(self, tol=0.0):
        return self.perm == tuple(range(self.q)) and all(g.is_identity(tol) for g in self.gammas)

    def to_dict(self):
        return {"space": "H", "q": self.q, "perm": [p + 1 for p in self.perm],
                "gammas": [g.to_dict() for g in self.gammas]}

    @classmethod
    def from_dict(cls, obj):
        perm = [int(p) - 1 for p in obj["perm"]]
        if "q" in obj and int(obj["q"]) != len(perm):
            raise ValueError("q does not match the permutation length")
        return cls(tuple(perm), tuple(MoebiusH.from_dict(g) for g in obj["gammas"]))


@dataclass(frozen=True)
class CycleAuto:
    """tau(z_1, ..., z_k) = (gamma_1(z_2), gamma_2(z_3), ..., gamma_k(z_1))."""

    gammas: Tuple[MoebiusH, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if not self.gammas:
            raise ValueError("a cycle needs at least one coordinate")

    @property
    def k(self):
        return len(self.gammas)

    def as_auto(self):
        k = self.k
        return PolydiscAuto(tuple((j + 1) % k for j in range(k)), self.gammas)

    def __call__(self, z):
        return self.as_auto()(z)


@dataclass(frozen=True)
class CycleBlock:
    coords: Tuple[int, ...]  # p_nu: the i-th cycle coordinate is z[coords[i]]
    cycle: CycleAuto

    @property
    def anchor(self):
        return self.coords[0]

    def project(self, z):
        return z[..., list(self.coords)]

    def to_dict(self):
        return {"coords": [c + 1 for c in self.coords],
                "gammas": [g.to_dict() for g in self.cycle.gammas]}


@dataclass(frozen=True)
class CycleDecomposition:
    q: int
    blocks: Tuple[CycleBlock, ...]

    def reassemble(self):
        perm = [0] * self.q
        gammas = [None] * self.q
        for blk in self.blocks:
            k = len(blk.coords)
            for i, c in enumerate(blk.coords):
                perm[c] = blk.coords[(i + 1) % k]
                gammas[c] = blk.cycle.gammas[i]
        return PolydiscAuto(tuple(perm), tuple(gammas))

    def to_dict(self):
        return {"q": self.q, "blocks": [b.to_dict() for b in self.blocks]}


def cycle_decompose(tau: PolydiscAuto) -> CycleDecomposition:
    """Split tau into cycle automorphisms, one per cycle of its permutation.

    Each cycle starts at its smallest coordinate and follows the permutation,
    which makes (tau z)[coords[i]] = gamma'_i(z[coords[i+1]]); blocks are
    sorted by anchor.
    """
    seen = [False] * tau.q
    blocks = []
    for start in range(tau.q):
        if seen[start]:
            continue
        coords = []
        j = start
        while not seen[j]:
            seen[j] = True
            coords.append(j)
            j = tau.perm[j]
        blocks.append(CycleBlock(tuple(coords), CycleAuto(tuple(tau.gammas[c] for c in coords))))
    return CycleDecomposition(tau.q, tuple(blocks))


def gamma_products(c: CycleAuto) -> List[MoebiusH]:
    """Coordinate maps (Gamma_1, ..., Gamma_k) of tau^k.

    Gamma_1 = gamma_1 o ... o gamma_k, Gamma_{j+1} = gamma_j^{-1} o Gamma_j o gamma_j.
    """
    g1 = c.gammas[0]
    for g in c.gammas[1:]:
        g1 = g1 @ g
    out = [g1]
    for g in c.gammas[:-1]:
        out.append(g.inverse() @ out[-1] @ g)
    return out


@dataclass(frozen=True)
class CycleClassification:
    kind: str  # elliptic | parabolic | hyperbolic
    k: int
    dilation: float  # lambda_tau for hyperbolic, 1 otherwise
    divergence_rate: float
    multiplier: Optional[complex] = None  # principal k-th root (elliptic)
    gamma1_multiplier: Optional[complex] = None
    translation_sign: Optional[int] = None
    degenerate: bool = False  # tau^k = id

    def to_dict(self):
        out = {"kind": self.kind, "k": self.k, "dilation": self.dilation,
               "divergence_rate": self.divergence_rate}
        if self.multiplier is not None:
            out["multiplier"] = [self.multiplier.real, self.multiplier.imag]
            out["multiplier_choices"] = ("principal root times any k-th root of unity")
        if self.translation_sign is not None:
            out["translation_sign"] = self.translation_sign
        if self.degenerate:
            out["degenerate"] = True
        return out


def classify_cycle(c: CycleAuto, eps_cls=EPS_CLS) -> CycleClassification:
    g1 = gamma_products(c)[0]
    cls = classify(g1, eps_cls)
    k = c.k
    if cls.kind == "hyperbolic":
        rate = -math.log(cls.dilation) / k
        return CycleClassification("hyperbolic", k, math.exp(math.log(cls.dilation) / k), rate)
    if cls.kind == "parabolic":
        return CycleClassification("parabolic", k, 1.0, 0.0, translation_sign=cls.translation_sign)
    if cls.kind == "identity":
        return CycleClassification("elliptic", k, 1.0, 0.0, multiplier=1 + 0j,
                                   gamma1_multiplier=1 + 0j, degenerate=True)
    return CycleClassification("elliptic", k, 1.0, 0.0,
                               multiplier=principal_root(cls.multiplier, k),
                               gamma1_multiplier=cls.multiplier)


@dataclass(frozen=True)
class AutoClassification:
    kind: str
    divergence_rate: float
    dilation: float
    per_cycle: Tuple[CycleClassification, ...] = field(default=())
    blocks: Tuple[Tuple[int, ...], ...] = field(default=())

    def to_dict(self):
        return {"kind": self.kind, "divergence_rate": self.divergence_rate,
                "dilation": self.dilation,
                "per_cycle": [dict(coords=[c + 1 for c in blk], **pc.to_dict())
                              for blk, pc in zip(self.blocks, self.per_cycle)]}


def classify_auto(tau: PolydiscAuto, eps_cls=EPS_CLS) -> AutoClassification:
    """Type and divergence rate of an automorphism from its cycles.

    The divergence rate is the largest cycle rate; the type is elliptic if
    every cycle is, hyperbolic if some cycle is, parabolic otherwise.
    """
    dec = cycle_decompose(tau)
    per = tuple(classify_cycle(b.cycle, eps_cls) for b in dec.blocks)
    rate = max(pc.divergence_rate for pc in per)
    kinds = {pc.kind for pc in per}
    if "hyperbolic" in kinds:
        kind = "hyperbolic"
        dilation = min(pc.dilation for pc in per if pc.kind == "hyperbolic")
    elif "parabolic" in kinds:
        kind, dilation = "parabolic", 1.0
    else:
        kind, dilation = "elliptic", 1.0
    return AutoClassification(kind, rate, dilation, per, tuple(b.coords for b in dec.blocks))


def step_at(tau: PolydiscAuto, x):
    """Step of an automorphism at x. Automorphisms are isometries, so the
    defining sequence is constant and equals k(x, tau x)."""
    x = as_polypoint(x, tau.q)
    return dist_poly(x, tau(x))


def fixed_point(tau: PolydiscAuto, eps_cls=EPS_CLS):
    """A fixed point of tau in H^q, or None when tau is not elliptic."""
    dec = cycle_decompose(tau)
    z = np.empty(tau.q, dtype=complex)
    for blk in dec.blocks:
        g1 = gamma_products(blk.cycle)[0]
        cls = classify(g1, eps_cls)
        if cls.kind == "identity":
            p = 1j
        elif cls.kind == "elliptic":
            p = cls.fixed_point_interior
        else:
            return None
        k = len(blk.coords)
        # z_1 = p, then z_i = gamma_i(z_{i+1}) read backwards from z_k = gamma_k(z_1)
        vals = [0j] * k
        vals[0] = p
        nxt = p
        for i in range(k - 1, 0, -1):
            nxt = complex(blk.cycle.gammas[i](nxt))
            vals[i] = nxt
        for c, v in zip(blk.coords, vals):
            z[c] = v
    return z
