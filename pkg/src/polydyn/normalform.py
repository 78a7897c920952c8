"""Canonical models of cycle automorphisms and of general automorphisms.

A cycle automorphism tau of H^k is conjugated, by a coordinatewise map
g = (g_1, ..., g_k), to

* hyperbolic: L = (1/lam) sigma_k on H^k,
* parabolic:  L = sigma_k + sign * (1, ..., 1) on H^k,
* elliptic:   L = lam * sigma_k on the polydisc, with g_j: H -> disc,

where sigma_k(w_1, ..., w_k) = (w_2, ..., w_k, w_1).
"""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from polydyn.geometry import dist_polydisc, dist_poly, random_halfplane_points
from polydyn.moebius import (
    EPS_CLS,
    MoebiusH,
    MoebiusHtoD,
    abel_conjugator_parabolic,
    linearizer_hyperbolic,
    schroeder_conjugator_elliptic,
)
from polydyn.polyauto import (
    CycleAuto,
    CycleDecomposition,
    PolydiscAuto,
    classify_auto,
    classify_cycle,
    cycle_decompose,
    gamma_products,
)


def shift(w):
    """sigma_k along the last axis: (w_1, ..., w_k) -> (w_2, ..., w_k, w_1)."""
    return np.roll(w, -1, axis=-1)


@dataclass(frozen=True)
class NormalForm:
    kind: str
    k: int
    lam: Union[float, complex, None]
    sign: Optional[int]
    g: Tuple[Union[MoebiusH, MoebiusHtoD], ...]

    def apply_g(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape, dtype=complex)
        for j, gj in enumerate(self.g):
            out[..., j] = gj(z[..., j])
        return out

    def apply_L(self, w):
        w = np.asarray(w, dtype=complex)
        if self.kind == "hyperbolic":
            return shift(w) / self.lam
        if self.kind == "parabolic":
            return shift(w) + self.sign
        return self.lam * shift(w)

    def to_dict(self):
        out = {"kind": self.kind, "k": self.k}
        if self.kind == "hyperbolic":
            out["lambda"] = self.lam
        elif self.kind == "parabolic":
            out["sign"] = self.sign
        else:
            out["lambda"] = [self.lam.real, self.lam.imag]
        out["g"] = [gj.to_dict() for gj in self.g]
        return out

    @classmethod
    def from_dict(cls, obj):
        kind = obj["kind"]
        if kind == "elliptic":
            re, im = obj["lambda"]
            return cls(kind, int(obj["k"]), complex(re, im), None,
                       tuple(MoebiusHtoD.from_dict(g) for g in obj["g"]))
        lam = float(obj["lambda"]) if kind == "hyperbolic" else None
        sign = int(obj["sign"]) if kind == "parabolic" else None
        return cls(kind, int(obj["k"]), lam, sign, tuple(MoebiusH.from_dict(g) for g in obj["g"]))


def normal_form_cycle(c: CycleAuto, eps_cls=EPS_CLS) -> NormalForm:
    k = c.k
    cc = classify_cycle(c, eps_cls)
    g1_map = gamma_products(c)[0]
    if cc.kind == "hyperbolic":
        lam = cc.dilation
        g = [linearizer_hyperbolic(g1_map, eps_cls)]
        for j in range(1, k):
            g.append((g[-1] @ c.gammas[j - 1]).scaled(lam))
        return NormalForm("hyperbolic", k, lam, None, tuple(g))
    if cc.kind == "parabolic":
        first, sign = abel_conjugator_parabolic(g1_map, k, eps_cls)
        g = [first]
        for j in range(1, k):
            g.append((g[-1] @ c.gammas[j - 1]).translated(-sign))
        return NormalForm("parabolic", k, None, sign, tuple(g))
    lam = cc.multiplier
    fixed = None
    if cc.degenerate:
        fixed = 1j
    first, _ = schroeder_conjugator_elliptic(g1_map, eps_cls, fixed_point=fixed)
    g = [first]
    for j in range(1, k):
        g.append(g[-1].compose_h(c.gammas[j - 1]).rotated(1 / lam))
    return NormalForm("elliptic", k, lam, None, tuple(g))


def verify_conjugacy(nf: NormalForm, c: CycleAuto, samples=50, seed=0):
    """Largest distance between g(tau z) and L(g z) over random z in H^k.

    Uses the poly-halfplane distance for hyperbolic/parabolic forms and the
    polydisc distance for elliptic ones.
    """
    rng = np.random.default_rng(seed)
    z = random_halfplane_points(rng, (samples, c.k))
    lhs = nf.apply_g(c(z))
    rhs = nf.apply_L(nf.apply_g(z))
    if nf.kind == "elliptic":
        return float(np.max(dist_polydisc(lhs, rhs)))
    return float(np.max(dist_poly(lhs, rhs)))


@dataclass(frozen=True)
class AutoNormalForm:
    decomposition: CycleDecomposition
    per_cycle: Tuple[NormalForm, ...]
    hyperbolic_split: Optional[Tuple[int, Tuple[int, ...]]] = None  # (m, 0-based reorder)

    def to_dict(self):
        out = {"q": self.decomposition.q, "cycles": []}
        for blk, nf in zip(self.decomposition.blocks, self.per_cycle):
            out["cycles"].append({"coords": [c + 1 for c in blk.coords], "normal_form": nf.to_dict()})
        if self.hyperbolic_split is not None:
            m, reorder = self.hyperbolic_split
            out["hyperbolic_split"] = {"m": m, "reorder": [c + 1 for c in reorder]}
        return out


def minimal_dilation_blocks(tau: PolydiscAuto, eps_cls=EPS_CLS, rtol=1e-9):
    """Indices of the hyperbolic cycles whose dilation equals the dilation of tau."""
    cls = classify_auto(tau, eps_cls)
    if cls.kind != "hyperbolic":
        return []
    lam = cls.dilation
    return [i for i, pc in enumerate(cls.per_cycle)
            if pc.kind == "hyperbolic" and abs(pc.dilation - lam) <= rtol * lam]


def normal_form_auto(tau: PolydiscAuto, eps_cls=EPS_CLS) -> AutoNormalForm:
    dec = cycle_decompose(tau)
    per = tuple(normal_form_cycle(b.cycle, eps_cls) for b in dec.blocks)
    split = None
    active = minimal_dilation_blocks(tau, eps_cls)
    if active:
        first = [c for i in active for c in dec.blocks[i].coords]
        rest = [c for i, b in enumerate(dec.blocks) if i not in active for c in b.coords]
        split = (len(first), tuple(first + rest))
    return AutoNormalForm(dec, per, split)
