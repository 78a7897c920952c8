"""Black-box holomorphic self-maps of H^q: orbits, divergence rate, step.

Orbits are followed in ``gmpy2.mpc`` arithmetic at double precision (53
bits) by default. The mantissa is the same as float64 but the exponent range
is practically unbounded, so hyperbolic orbits can be followed for
thousands of steps even though their coordinates leave [1e-308, 1e308].
Black-box maps receive a list of ``gmpy2.mpc`` and must return a sequence of
numbers; plain arithmetic and gmpy2 functions keep the extended range,
``cmath`` functions fall back to double range.
"""

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import gmpy2
import numpy as np

from polydyn.geometry import (
    DomainError,
    as_polypoint,
    cayley,
    cayley_inv,
    complex_from_json,
    complex_to_json,
    dist_halfplane,
    random_halfplane_points,
)
from polydyn.polyauto import PolydiscAuto

DOUBLE_PRECISION = 53
# cap for the automatic precision increase of step estimates
MAX_PRECISION = 4096
# orbit entries whose step distance is uncertain by more than this are flagged
STEP_RESOLUTION_TOL = 1e-6
# estimate_step recomputes the orbit when any point is worse than this
STEP_ACCURACY = 1e-12
MONOTONE_TOL = 1e-9


class OrbitOverflowError(ArithmeticError):
    """An orbit coordinate stopped being a finite number."""


def _ext(z, precision=None):
    if precision is None:
        return gmpy2.mpc(complex(z)) if not isinstance(z, gmpy2.mpc) else z
    return gmpy2.mpc(z, precision=precision)


def _check_point(w, where):
    for j, c in enumerate(w):
        if not gmpy2.is_finite(c):
            raise OrbitOverflowError(f"coordinate {j + 1} is not finite {where}")
        if not c.imag > 0:
            raise DomainError(f"coordinate {j + 1} left the upper half-plane {where}")


@dataclass
class HoloSelfMap:
    """A holomorphic self-map of H^dim given by a black-box ``eval``.

    Holomorphy is the caller's responsibility; only the range is checked,
    on a few sample points at construction.
    """

    dim: int
    eval: Callable
    description: str = ""
    check: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.check:
            rng = np.random.default_rng(12345)
            for z in random_halfplane_points(rng, (8, self.dim)):
                self(list(z))

    def __call__(self, z):
        out = [_ext(c) for c in self.eval([_ext(c) for c in z])]
        if len(out) != self.dim:
            raise DomainError(f"map returned {len(out)} coordinates, expected {self.dim}")
        _check_point(out, "in the image")
        return out


@dataclass(frozen=True)
class LftProductMap:
    """(f z)_j = (a_j w + b_j)/(c_j w + d_j) with w = z_{perm[j]}, complex coefficients.

    Covers products of linear fractional self-maps, e.g. the maps of
    examples built from disc automorphisms and contractions.
    """

    perm: tuple
    coeffs: tuple  # one (a, b, c, d) tuple of complex numbers per coordinate

    @property
    def dim(self):
        return len(self.perm)

    def __call__(self, z):
        out = []
        for p, (a, b, c, d) in zip(self.perm, self.coeffs):
            w = z[p]
            out.append((a * w + b) / (c * w + d))
        return out

    @classmethod
    def from_disc(cls, perm, coeffs):
        """Conjugate per-coordinate disc maps to H by the Cayley transform."""
        cay = np.array([[1, -1j], [1, 1j]])
        cay_inv = np.array([[1j, 1j], [-1, 1]])
        out = []
        for a, b, c, d in coeffs:
            m = cay_inv @ np.array([[a, b], [c, d]], dtype=complex) @ cay
            out.append(tuple(complex(v) for v in m.ravel()))
        return cls(tuple(perm), tuple(out))

    def to_dict(self):
        return {"space": "H", "perm": [p + 1 for p in self.perm],
                "maps": [{k: complex_to_json(v) for k, v in zip("abcd", cf)} for cf in self.coeffs]}

    @classmethod
    def from_dict(cls, obj):
        perm = [int(p) - 1 for p in obj.get("perm", range(1, len(obj["maps"]) + 1))]
        coeffs = [tuple(complex_from_json(m[k]) for k in "abcd") for m in obj["maps"]]
        if sorted(perm) != list(range(len(coeffs))):
            raise ValueError("perm must be a permutation of the coordinates")
        if obj.get("space", "H") == "D":
            return cls.from_disc(perm, coeffs)
        return cls(tuple(perm), tuple(coeffs))


def as_selfmap(f, description=""):
    if isinstance(f, HoloSelfMap):
        return f
    if isinstance(f, PolydiscAuto):
        return HoloSelfMap(f.q, f, description or "polydisc automorphism", check=False)
    if isinstance(f, LftProductMap):
        return HoloSelfMap(f.dim, f, description or "product of linear fractional maps")
    raise TypeError(f"cannot use {type(f).__name__} as a self-map")


def _default_point(dim):
    return [1j] * dim


def _context(precision):
    return gmpy2.context(gmpy2.get_context(), precision=precision)


def orbit(f, x=None, n=10, precision=DOUBLE_PRECISION):
    """[x, f(x), ..., f^n(x)] as lists of gmpy2.mpc with ``precision`` bits."""
    f = as_selfmap(f)
    x = _default_point(f.dim) if x is None else list(as_polypoint(x, f.dim))
    with _context(precision):
        z = [_ext(c) for c in x]
        out = [z]
        for i in range(n):
            z = f(z)
            _check_point(z, f"at iterate {i + 1}")
            out.append(z)
    return out


def _dist(z, w):
    return max(dist_halfplane(a, b) for a, b in zip(z, w))


def _log2_conditioning(z):
    # a distance evaluated near z carries an absolute error of about 2^-p |z| / Im z
    return max(float(gmpy2.log2(abs(c) / c.imag)) for c in z)


@dataclass
class OrbitStats:
    x: list
    m: int
    dist_to_start: np.ndarray  # k(f^n x, x), n = 0..m
    step_seq: np.ndarray  # k(f^n x, f^{n+1} x), n = 0..m
    c_estimate: float
    s_estimate: float
    diagnostics: dict = field(default_factory=dict)
    points: list = field(default=None, repr=False)  # the orbit, f^0 x .. f^{m+1} x

    def to_dict(self, sequences=True):
        out = {"x": [complex_to_json(c) for c in self.x], "m": self.m,
               "c_estimate": self.c_estimate, "s_estimate": self.s_estimate,
               "diagnostics": self.diagnostics}
        if sequences:
            out["dist_to_start"] = self.dist_to_start.tolist()
            out["step_seq"] = self.step_seq.tolist()
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "dist_to_start", "step"])
        for n in range(self.m + 1):
            w.writerow([n, repr(float(self.dist_to_start[n])), repr(float(self.step_seq[n]))])
        return buf.getvalue()


def orbit_stats(f, x=None, m=1000, precision=DOUBLE_PRECISION):
    """Distance sequences along the orbit of x, up to horizon m.

    The step sequence is monotone in exact arithmetic; entries whose
    evaluation is dominated by rounding (points crowding the real axis at a
    finite boundary point) are excluded from the monotonicity check and
    reported in the diagnostics.
    """
    if m < 1:
        raise ValueError("horizon m must be at least 1")
    f = as_selfmap(f)
    pts = orbit(f, x, m + 1, precision)
    x0 = pts[0]
    with _context(precision):
        dist = np.array([_dist(p, x0) for p in pts[: m + 1]])
        steps = np.array([_dist(pts[n], pts[n + 1]) for n in range(m + 1)])
        cond = np.array([_log2_conditioning(p) for p in pts[: m + 1]])
    unc = np.exp2(np.minimum(cond + 1 - precision, 1000.0))
    resolved = unc < STEP_RESOLUTION_TOL
    inc = np.diff(steps)
    ok = resolved[1:] & resolved[:-1]
    worst_increase = float(np.max(inc[ok], initial=0.0))
    half = m // 2
    diagnostics = {
        "tail_slope": float((dist[m] - dist[half]) / (m - half)),
        "step_monotone": worst_increase <= MONOTONE_TOL,
        "step_max_increase": worst_increase,
        "step_resolved": bool(resolved[m]),
        "step_resolution": float(unc[m]),
        "resolved_steps": int(np.count_nonzero(resolved)),
        "worst_resolution": float(np.max(unc)),
        "precision": precision,
        "required_precision": int(math.ceil(np.max(cond))) + DOUBLE_PRECISION,
    }
    xc = [complex(c) for c in x0]
    return OrbitStats(xc, m, dist, steps, float(dist[m] / m), float(steps[m]), diagnostics, pts)


def estimate_divergence_rate(f, x=None, m=1000):
    """c_estimate = k(f^m x, x) / m, with the full sequences for diagnostics.

    Imaginary parts keep their relative precision along the orbit, so the
    distance to the start is accurate at double precision.
    """
    return orbit_stats(f, x, m)


def estimate_step(f, x=None, m=1000, max_precision=MAX_PRECISION):
    """s_estimate = k(f^m x, f^{m+1} x); the defining sequence is non-increasing.

    Consecutive points converging to a finite boundary point agree in many
    leading digits, so when the double-precision pass cannot resolve the
    step the orbit is recomputed with enough bits (up to ``max_precision``).
    """
    stats = orbit_stats(f, x, m)
    need = stats.diagnostics["required_precision"]
    if stats.diagnostics["worst_resolution"] > STEP_ACCURACY and need <= max_precision:
        stats = orbit_stats(f, x, m, need)
    return stats


@dataclass
class SelfMapClassification:
    kind: str
    c_estimate: float
    orbit_converged: bool
    fixed_point_found: bool
    fixed_point: Optional[List[complex]] = None
    m: int = 0
    eps_c: float = 0.0
    eps_fix: float = 0.0
    heuristic: bool = True
    note: str = ("heuristic: finite-horizon estimates cannot separate c = 0 from small "
                 "positive c, nor detect fixed points far from the sampled orbits")

    def to_dict(self):
        out = {"kind": self.kind, "heuristic": self.heuristic, "c_estimate": self.c_estimate,
               "orbit_converged": self.orbit_converged,
               "fixed_point_found": self.fixed_point_found,
               "m": self.m, "eps_c": self.eps_c, "eps_fix": self.eps_fix, "note": self.note}
        if self.fixed_point is not None:
            out["fixed_point"] = [complex_to_json(c) for c in self.fixed_point]
        return out


def damped_fixed_point(f, x=None, steps=2000, eps_fix=1e-8):
    """Mann iteration z <- (z + f(z))/2; returns the point if k(z, f z) < eps_fix."""
    f = as_selfmap(f)
    z = [_ext(c) for c in (_default_point(f.dim) if x is None else x)]
    for _ in range(steps):
        fz = f(z)
        if _dist(z, fz) < eps_fix:
            return [complex(c) for c in z]
        z = [(a + b) / 2 for a, b in zip(z, fz)]
    return None


def classify_selfmap(f, x=None, m=10000, eps_c=1e-2, eps_fix=1e-8, damped_steps=2000,
                     stats=None):
    """Heuristic type of a self-map from one orbit.

    hyperbolic if the divergence-rate estimate exceeds eps_c; elliptic if
    the orbit settles (k(f^m x, f^{m/2} x) < eps_fix) or damped iteration
    finds a point moved less than eps_fix; parabolic otherwise.
    """
    f = as_selfmap(f)
    if stats is None:
        stats = orbit_stats(f, x, m)
    m = stats.m
    common = dict(m=m, eps_c=eps_c, eps_fix=eps_fix)
    if stats.c_estimate > eps_c:
        return SelfMapClassification("hyperbolic", stats.c_estimate, False, False, **common)
    pts = stats.points if stats.points is not None else orbit(f, stats.x, m)
    if _dist(pts[m], pts[m // 2]) < eps_fix:
        fp = [complex(c) for c in pts[m]]
        return SelfMapClassification("elliptic", stats.c_estimate, True, True, fp, **common)
    fp = damped_fixed_point(f, stats.x, damped_steps, eps_fix)
    if fp is not None:
        return SelfMapClassification("elliptic", stats.c_estimate, False, True, fp, **common)
    return SelfMapClassification("parabolic", stats.c_estimate, False, False, **common)


def builtin_intro_example(lam=1j):
    """(z, w) -> (lam z, (1 + w)/(3 - w)) on the bidisc, in H^2 coordinates.

    Fixed-point free, yet its iterates do not converge. In H coordinates the
    second slot is the translation w -> w + i.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("lambda must have modulus 1")
    f = LftProductMap.from_disc((0, 1), [(lam, 0, 0, 1), (1, 1, -1, 3)])
    return HoloSelfMap(2, f, f"intro example, lambda={lam!r}")


def builtin_remark5_example(alpha=0.3):
    """(z, w) -> (e^{alpha pi} z, (2 + w)/3 * exp(i log z)) on H x disc, in H^2 coordinates.

    ``log`` is the principal branch, with imaginary part in (0, pi) on H.
    The source construction wants alpha irrational; any positive float is
    accepted here since floats cannot tell the difference.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    factor = gmpy2.exp(gmpy2.mpfr(alpha) * gmpy2.const_pi())

    def remark5(z):
        z1, z2 = z
        w = cayley(z2)
        w_next = (2 + w) / 3 * gmpy2.exp(1j * gmpy2.log(z1))
        return [factor * z1, cayley_inv(w_next)]

    return HoloSelfMap(2, remark5, f"remark example, alpha={alpha!r}")


def parse_angle(text):
    """Parse '0.5pi', 'pi/3', '1.2' (radians) into a float."""
    s = text.strip().replace("π", "pi")
    if s.endswith("pi"):
        coef = s[:-2].rstrip("*").strip()
        return (float(coef) if coef else 1.0) * math.pi
    if "pi/" in s:
        coef, den = s.split("pi/")
        coef = coef.rstrip("*").strip()
        return (float(coef) if coef else 1.0) * math.pi / float(den)
    return float(s)


def lambda_from_angle(theta):
    return cmath.exp(1j * theta)
