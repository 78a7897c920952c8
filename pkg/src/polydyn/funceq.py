"""Valiron and Abel functions of polydisc automorphisms, and residual checks
for functional equations and semi-models of arbitrary maps.

For a hyperbolic automorphism the Valiron function averages the normal-form
conjugators over the coordinates of the cycles of minimal dilation; for a
parabolic one the Abel function averages the conjugators of one parabolic
cycle. The arithmetic mean is 1-homogeneous and invariant under coordinate
permutations, which is all the construction needs.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from polydyn.dynamics import as_selfmap, estimate_divergence_rate, estimate_step
from polydyn.geometry import DomainError, dist_halfplane, dist_poly, random_halfplane_points
from polydyn.moebius import EPS_CLS, MoebiusH
from polydyn.normalform import minimal_dilation_blocks, normal_form_cycle
from polydyn.polyauto import PolydiscAuto, classify_auto, cycle_decompose


class KindError(ValueError):
    """The automorphism has the wrong dynamical type for the requested equation."""


def _mean_of_terms(terms, z):
    z = np.asarray(z, dtype=complex)
    acc = np.zeros(z.shape[:-1], dtype=complex)
    for idx, g in terms:
        acc = acc + g(z[..., idx])
    out = acc / len(terms)
    return complex(out) if out.ndim == 0 else out


def _terms_json(terms):
    return [{"coord": idx + 1, "g": g.to_dict()} for idx, g in terms]


def _terms_from_json(obj):
    return tuple((int(t["coord"]) - 1, MoebiusH.from_dict(t["g"])) for t in obj)


@dataclass(frozen=True)
class ValironFunction:
    """V(z) = (1/m) sum_j g_j(z[index_j]); solves V o tau = V / lam."""

    terms: Tuple[Tuple[int, MoebiusH], ...]
    lam: float

    @property
    def m(self):
        return len(self.terms)

    def __call__(self, z):
        return _mean_of_terms(self.terms, z)

    def preimage(self, t, q):
        """A point of H^q sent to t: the active coordinates solve g_j(z_j) = t."""
        z = np.full(q, 1j)
        for idx, g in self.terms:
            z[idx] = g.inverse()(complex(t))
        return z

    def to_dict(self):
        return {"lambda": self.lam, "m": self.m, "terms": _terms_json(self.terms)}

    @classmethod
    def from_dict(cls, obj):
        return cls(_terms_from_json(obj["terms"]), float(obj["lambda"]))


@dataclass(frozen=True)
class AbelFunction:
    """Theta(z) = (1/k) sum_j g_j(z[index_j]); solves Theta o tau = Theta + alpha."""

    terms: Tuple[Tuple[int, MoebiusH], ...]
    alpha: int

    @property
    def k(self):
        return len(self.terms)

    def __call__(self, z):
        return _mean_of_terms(self.terms, z)

    def preimage(self, t, q):
        z = np.full(q, 1j)
        for idx, g in self.terms:
            z[idx] = g.inverse()(complex(t))
        return z

    def to_dict(self):
        return {"alpha": self.alpha, "k": self.k, "terms": _terms_json(self.terms)}

    @classmethod
    def from_dict(cls, obj):
        return cls(_terms_from_json(obj["terms"]), int(obj["alpha"]))


@dataclass(frozen=True)
class SemiModelTriple:
    """Candidate semi-model: intertwiner ell: H^N -> H^q and automorphism tau of H^q."""

    base_dim: int
    intertwiner: Callable
    base_auto: PolydiscAuto

    def __post_init__(self):
        if self.base_auto.q != self.base_dim:
            raise ValueError("base automorphism dimension differs from base_dim")


def valiron_for_auto(tau: PolydiscAuto, eps_cls=EPS_CLS) -> ValironFunction:
    cls = classify_auto(tau, eps_cls)
    if cls.kind != "hyperbolic":
        raise KindError(f"Valiron functions with values in H need a hyperbolic map, got {cls.kind}")
    dec = cycle_decompose(tau)
    terms = []
    for i in minimal_dilation_blocks(tau, eps_cls):
        blk = dec.blocks[i]
        nf = normal_form_cycle(blk.cycle, eps_cls)
        terms.extend(zip(blk.coords, nf.g))
    return ValironFunction(tuple(terms), cls.dilation)


def abel_for_auto(tau: PolydiscAuto, eps_cls=EPS_CLS) -> AbelFunction:
    cls = classify_auto(tau, eps_cls)
    if cls.kind != "parabolic":
        raise KindError(f"Abel functions with values in H need a parabolic map, got {cls.kind}")
    dec = cycle_decompose(tau)
    blk = next(b for b, pc in zip(dec.blocks, cls.per_cycle) if pc.kind == "parabolic")
    nf = normal_form_cycle(blk.cycle, eps_cls)
    return AbelFunction(tuple(zip(blk.coords, nf.g)), nf.sign)


def _sample(q, samples, seed):
    return random_halfplane_points(np.random.default_rng(seed), (samples, q))


def _require_h(values, what):
    values = np.asarray(values, dtype=complex)
    if not np.all(values.imag > 0) or not np.all(np.isfinite(values)):
        raise DomainError(f"{what} takes values outside the upper half-plane")
    return values


def _eval_rows(fn, z):
    """Evaluate a black box row by row (it may not broadcast)."""
    return np.array([complex(fn(row)) for row in z])


def _map_rows(f, z):
    return np.array([[complex(c) for c in f(list(row))] for row in z])


def check_valiron_conditions(V, tau: PolydiscAuto, samples=100, seed=0, eps_cls=EPS_CLS, h=1e-5):
    """Sample the characterizing conditions of a Valiron function of tau.

    V is read in normal-form coordinates zeta = g(z) on the minimal-dilation
    cycles (other coordinates untouched), where tau acts as (1/lam) sigma-hat.
    Reports the largest violation of
      homogeneity:  k(W(r zeta), r W(zeta)) with r > 0 scaling the active block,
      invariance:   k(W(sigma-hat zeta), W(zeta)),
      independence: |dW / d zeta_j| on the remaining coordinates (central differences).
    """
    cls = classify_auto(tau, eps_cls)
    if cls.kind != "hyperbolic":
        raise KindError(f"expected a hyperbolic automorphism, got {cls.kind}")
    dec = cycle_decompose(tau)
    q = tau.q
    conj = {}
    nxt = {}
    for i in minimal_dilation_blocks(tau, eps_cls):
        blk = dec.blocks[i]
        nf = normal_form_cycle(blk.cycle, eps_cls)
        k = len(blk.coords)
        for j, (c, g) in enumerate(zip(blk.coords, nf.g)):
            conj[c] = g
            nxt[c] = blk.coords[(j + 1) % k]
    active = sorted(conj)
    rest = [c for c in range(q) if c not in conj]

    def to_z(zeta):
        z = zeta.copy()
        for c, g in conj.items():
            z[..., c] = g.inverse()(zeta[..., c])
        return z

    def W(zeta):
        return _require_h(_eval_rows(V, to_z(zeta)), "V")

    rng = np.random.default_rng(seed)
    zeta = random_halfplane_points(rng, (samples, q), re_range=(-2.0, 2.0), im_range=(0.2, 5.0))
    r = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=samples))
    base = W(zeta)

    scaled = zeta.copy()
    scaled[:, active] *= r[:, None]
    homog = float(np.max(dist_halfplane(W(scaled), r * base)))

    permuted = zeta.copy()
    for c in active:
        permuted[:, c] = zeta[:, nxt[c]]
    invariance = float(np.max(dist_halfplane(W(permuted), base)))

    dependence = 0.0
    for c in rest:
        up, down = zeta.copy(), zeta.copy()
        up[:, c] += h
        down[:, c] -= h
        deriv = np.abs(W(up) - W(down)) / (2 * h)
        dependence = max(dependence, float(np.max(deriv)))
    return {"homogeneity": homog, "invariance": invariance, "dependence": dependence,
            "samples": samples, "seed": seed, "active_coords": [c + 1 for c in active]}


def surjectivity_witness(fn, q, targets):
    """Largest |fn(preimage(t)) - t| over the targets, using the diagonal preimages.

    Finite evidence for surjectivity onto H; the full statement is not
    decidable from samples.
    """
    return max(abs(complex(fn(fn.preimage(t, q))) - complex(t)) for t in targets)


def target_grid(n_re=10, n_im=10, re_range=(-2.0, 2.0), im_range=(0.1, 5.0)):
    xs = np.linspace(*re_range, n_re)
    ys = np.geomspace(*im_range, n_im)
    return [complex(x, y) for x in xs for y in ys]


def verify_valiron(V, f, mu, samples=100, seed=0, m=2000, c_tol=5e-3):
    """Residual of V o f = V / mu, plus the divergence-rate bound it implies.

    A solution with values in H forces c(f) >= log(1/mu); the companion
    check compares that with the orbit estimate at horizon m.
    """
    f = as_selfmap(f)
    z = _sample(f.dim, samples, seed)
    vz = _require_h(_eval_rows(V, z), "V")
    vfz = _require_h(_eval_rows(V, _map_rows(f, z)), "V")
    residual = float(np.max(dist_halfplane(vfz, vz / mu)))
    c_est = estimate_divergence_rate(f, m=m).c_estimate
    bound = -math.log(mu)
    return {"residual": residual, "samples": samples, "seed": seed,
            "companion_checks": {"c_estimate": c_est, "m": m, "c_lower_bound": bound,
                                 "tolerance": c_tol, "holds": c_est >= bound - c_tol}}


def verify_abel(theta, f, alpha, samples=100, seed=0, m=200, step_tol=5e-3, step_points=5):
    """Residual of Theta o f = Theta + alpha, plus the step bound it implies.

    A solution with values in H forces s(x) >= k(Theta(x), Theta(x) + alpha);
    the companion check tests this at a few sample points.
    """
    f = as_selfmap(f)
    z = _sample(f.dim, samples, seed)
    tz = _require_h(_eval_rows(theta, z), "Theta")
    tfz = _require_h(_eval_rows(theta, _map_rows(f, z)), "Theta")
    residual = float(np.max(dist_halfplane(tfz, tz + alpha)))
    worst = math.inf
    rows = []
    for x in z[:step_points]:
        s = estimate_step(f, x, m).s_estimate
        t = complex(theta(x))
        lower = dist_halfplane(t, t + alpha)
        worst = min(worst, s - lower)
        rows.append({"step": s, "lower_bound": lower})
    return {"residual": residual, "samples": samples, "seed": seed,
            "companion_checks": {"m": m, "tolerance": step_tol, "points": rows,
                                 "min_margin": worst, "holds": worst >= -step_tol}}


def verify_semimodel(sm: SemiModelTriple, f, samples=100, seed=0):
    """Residual of ell o f = tau o ell in the base distance.

    Only the intertwining identity is checkable; the exhaustion condition
    on the base is reported as not tested.
    """
    f = as_selfmap(f)
    z = _sample(f.dim, samples, seed)
    lz = np.array([np.asarray(sm.intertwiner(row), dtype=complex) for row in z])
    lfz = np.array([np.asarray(sm.intertwiner(row), dtype=complex) for row in _map_rows(f, z)])
    if lz.shape[-1] != sm.base_dim:
        raise DomainError("intertwiner output dimension differs from base_dim")
    _require_h(lz, "ell")
    _require_h(lfz, "ell")
    residual = float(np.max(dist_poly(lfz, sm.base_auto(lz))))
    return {"residual": residual, "samples": samples, "seed": seed,
            "companion_checks": {"exhaustion_condition": "not tested"}}
