"""Automorphisms of the upper half-plane as normalized real 2x2 matrices.

A map z -> (az + b)/(cz + d) is stored with ad - bc = 1 and the sign of
the matrix fixed by a + d >= 0 (ties: a > 0, then c > 0), so the trace
decides the dynamical type without projective ambiguity.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from polydyn.geometry import complex_from_json, complex_to_json

EPS_CLS = 1e-9
INF = math.inf


class ClassificationError(ValueError):
    """The map does not have the dynamical type an operation requires."""


@dataclass(frozen=True)
class MoebiusH:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if not (det > 0 and math.isfinite(det)):
            raise ValueError(f"not an automorphism of H: det = {det!r}")
        if abs(det - 1.0) > 4e-16:  # keeps normalization idempotent
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        tr = a + d
        if tr < 0 or (tr == 0 and (a < 0 or (a == 0 and c < 0))):
            a, b, c, d = -a, -b, -c, -d
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v + 0.0)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def scaling(cls, r):
        """z -> r z for r > 0."""
        return cls(r, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t):
        return cls(1.0, t, 0.0, 1.0)

    @classmethod
    def rotation(cls, theta):
        """Elliptic map fixing i with derivative exp(-2i theta) there."""
        co, si = math.cos(theta), math.sin(theta)
        return cls(co, -si, si, co)

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self):
        return self.a + self.d

    def __call__(self, z):
        # generic arithmetic so numpy arrays and gmpy2.mpc both work
        if self.c == 0:
            return (self.a * z + self.b) / self.d
        return (self.a * z + self.b) / (self.c * z + self.d)

    def apply_boundary(self, x):
        """Action on the extended real line (math.inf stands for the point at infinity)."""
        if math.isinf(x):
            return INF if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        if den == 0:
            return INF
        return (self.a * x + self.b) / den

    def derivative(self, z):
        return 1.0 / (self.c * z + self.d) ** 2

    def compose(self, other):
        """self o other."""
        return MoebiusH.from_matrix(self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self):
        return MoebiusH(self.d, -self.b, -self.c, self.a)

    def iterate(self, n):
        if n < 0:
            return self.inverse().iterate(-n)
        return MoebiusH.from_matrix(np.linalg.matrix_power(self.matrix, n))

    def scaled(self, r):
        """The map z -> r * self(z), r > 0."""
        return MoebiusH(r * self.a, r * self.b, self.c, self.d)

    def translated(self, t):
        """The map z -> self(z) + t, t real."""
        return MoebiusH(self.a + t * self.c, self.b + t * self.d, self.c, self.d)

    def is_identity(self, tol=0.0):
        return (abs(self.a - 1) <= tol and abs(self.b) <= tol
                and abs(self.c) <= tol and abs(self.d - 1) <= tol)

    def to_dict(self):
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, obj):
        return cls(float(obj["a"]), float(obj["b"]), float(obj["c"]), float(obj["d"]))

    def __repr__(self):
        return f"MoebiusH({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


@dataclass(frozen=True)
class MoebiusHtoD:
    """A biholomorphism H -> disc, z -> (az + b)/(cz + d) with complex entries."""

    a: complex
    b: complex
    c: complex
    d: complex
    check: bool = True

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.check:
            self._verify()

    def _verify(self, tol=1e-9):
        a, b, c, d = self.a, self.b, self.c, self.d
        if a * d - b * c == 0 or c == 0:
            raise ValueError("degenerate map: cannot send H onto the disc")
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if abs(abs(a) - abs(c)) > tol * scale:
            raise ValueError("infinity is not sent to the unit circle")
        pole = -d / c
        if not pole.imag < 0:
            raise ValueError("pole is not in the lower half-plane")
        xs = np.array([-1e3, -10.0, -1.0, -0.1, 0.0, 0.3, 1.0, 7.0, 1e3])
        if np.max(np.abs(np.abs(self(xs + 0j)) - 1.0)) > 1e-8:
            raise ValueError("real axis is not sent to the unit circle")
        zs = np.array([1j, 2 + 0.5j, -3 + 4j, 0.01 + 0.01j])
        if not np.all(np.abs(self(zs)) < 1):
            raise ValueError("interior points are not sent into the disc")

    @classmethod
    def centered_at(cls, p):
        """z -> (z - p)/(z - conj p), sending p to 0."""
        p = complex(p)
        return cls(1.0, -p, 1.0, -p.conjugate())

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse_apply(self, w):
        return (self.d * w - self.b) / (-self.c * w + self.a)

    def compose_h(self, m: MoebiusH):
        """self o m for an automorphism m of H."""
        a, b, c, d = self.a, self.b, self.c, self.d
        return MoebiusHtoD(a * m.a + b * m.c, a * m.b + b * m.d,
                           c * m.a + d * m.c, c * m.b + d * m.d, check=False)

    def rotated(self, u):
        """The map z -> u * self(z) for |u| = 1."""
        u = complex(u)
        return MoebiusHtoD(u * self.a, u * self.b, self.c, self.d, check=False)

    def to_dict(self):
        return {k: complex_to_json(getattr(self, k)) for k in "abcd"}

    @classmethod
    def from_dict(cls, obj):
        return cls(*(complex_from_json(obj[k]) for k in "abcd"))


@dataclass(frozen=True)
class DiscAutoClassification:
    kind: str
    fixed_point_interior: Optional[complex] = None
    multiplier: Optional[complex] = None
    boundary_fixed: Optional[Tuple[float, ...]] = None
    dilation: Optional[float] = None
    translation_sign: Optional[int] = None

    def __post_init__(self):
        if self.boundary_fixed is not None:  # no negative zeros in reports
            object.__setattr__(self, "boundary_fixed", tuple(x + 0.0 for x in self.boundary_fixed))

    def to_dict(self):
        out = {"kind": self.kind}
        if self.fixed_point_interior is not None:
            out["fixed_point_interior"] = complex_to_json(self.fixed_point_interior)
        if self.multiplier is not None:
            out["multiplier"] = complex_to_json(self.multiplier)
        if self.boundary_fixed is not None:
            out["boundary_fixed"] = [_ext_real_json(x) for x in self.boundary_fixed]
        if self.dilation is not None:
            out["dilation"] = self.dilation
        if self.translation_sign is not None:
            out["translation_sign"] = self.translation_sign
        return out


def _ext_real_json(x):
    if math.isinf(x):
        return "inf"
    return x


def _hyperbolic_fixed_points(m):
    """(attracting, repelling) boundary fixed points of a hyperbolic map."""
    a, b, c, d = m.a, m.b, m.c, m.d
    if c == 0:
        finite = b / (d - a)
        return (INF, finite) if abs(a) > abs(d) else (finite, INF)
    sq = math.sqrt(max((a + d) ** 2 - 4.0, 0.0))
    s = d - a
    q = -0.5 * (s + math.copysign(sq, s if s != 0 else 1.0))
    r1 = q / c
    r2 = -b / q if q != 0 else (a - d) / (2 * c)
    if abs(c * r1 + d) > abs(c * r2 + d):
        return r1, r2
    return r2, r1


def _parabolic_fixed_point(m):
    if m.c == 0:
        return INF
    return (m.a - m.d) / (2.0 * m.c)


def _to_infinity(x0):
    """Automorphism of H sending the boundary point x0 to infinity."""
    if math.isinf(x0):
        return MoebiusH.identity()
    return MoebiusH(0.0, -1.0, 1.0, -x0)


def _parabolic_translation(m):
    """(fixed point, beta) with m conjugate to z -> z + beta."""
    x0 = _parabolic_fixed_point(m)
    h = _to_infinity(x0)
    t = h @ m @ h.inverse()
    return x0, t.b / t.d


def _elliptic_fixed_point(m):
    a, d, c = m.a, m.d, m.c
    tr = a + d
    return complex((a - d) / (2 * c), math.sqrt(max(4.0 - tr * tr, 0.0)) / (2 * abs(c)))


def classify(m: MoebiusH, eps_cls=EPS_CLS) -> DiscAutoClassification:
    """Dynamical type of an automorphism of H, decided by |trace| against 2.

    Maps whose trace lies within ``eps_cls`` of 2 are reported parabolic,
    including slightly hyperbolic or elliptic ones.
    """
    if m.is_identity(eps_cls):
        return DiscAutoClassification("identity")
    tr = abs(m.trace)
    if tr < 2.0 - eps_cls:
        p = _elliptic_fixed_point(m)
        mult = complex(m.derivative(p))
        return DiscAutoClassification("elliptic", fixed_point_interior=p, multiplier=mult)
    if tr <= 2.0 + eps_cls:
        x0, beta = _parabolic_translation(m)
        return DiscAutoClassification("parabolic", boundary_fixed=(x0,),
                                      translation_sign=1 if beta > 0 else -1)
    mu = 0.5 * (tr + math.sqrt(tr * tr - 4.0))
    att, rep = _hyperbolic_fixed_points(m)
    return DiscAutoClassification("hyperbolic", boundary_fixed=(att, rep), dilation=1.0 / mu**2)


def divergence_rate_1d(m: MoebiusH, eps_cls=EPS_CLS):
    cls = classify(m, eps_cls)
    if cls.kind != "hyperbolic":
        return 0.0
    return -math.log(cls.dilation)


def linearizer_hyperbolic(gamma: MoebiusH, eps_cls=EPS_CLS) -> MoebiusH:
    """g with g o gamma = g / dilation: attracting point to infinity, repelling to 0."""
    cls = classify(gamma, eps_cls)
    if cls.kind != "hyperbolic":
        raise ClassificationError(f"expected a hyperbolic map, got {cls.kind}")
    att, rep = cls.boundary_fixed
    if math.isinf(att):
        return MoebiusH(1.0, -rep, 0.0, 1.0)
    if math.isinf(rep):
        return MoebiusH(0.0, -1.0, 1.0, -att)
    eps = 1.0 if rep > att else -1.0
    return MoebiusH(eps, -eps * rep, 1.0, -att)


def abel_conjugator_parabolic(gamma: MoebiusH, k=1, eps_cls=EPS_CLS):
    """(g, sign) with g o gamma = g + sign * k."""
    cls = classify(gamma, eps_cls)
    if cls.kind != "parabolic":
        raise ClassificationError(f"expected a parabolic map, got {cls.kind}")
    x0, beta = _parabolic_translation(gamma)
    g = _to_infinity(x0).scaled(k / abs(beta))
    return g, (1 if beta > 0 else -1)


def schroeder_conjugator_elliptic(gamma: MoebiusH, eps_cls=EPS_CLS, fixed_point=None):
    """(g, multiplier) with g: H -> disc, g(p) = 0 and g o gamma = multiplier * g.

    For the identity map pass ``fixed_point``; every point is fixed and the
    multiplier is 1.
    """
    cls = classify(gamma, eps_cls)
    if cls.kind == "identity":
        if fixed_point is None:
            raise ClassificationError("identity has no distinguished fixed point")
        return MoebiusHtoD.centered_at(fixed_point), 1 + 0j
    if cls.kind != "elliptic":
        raise ClassificationError(f"expected an elliptic map, got {cls.kind}")
    p = cls.fixed_point_interior
    mult = cls.multiplier
    return MoebiusHtoD.centered_at(p), mult / abs(mult)


def principal_root(u, k):
    """Principal k-th root of a unit complex number."""
    return cmath.exp(1j * cmath.phase(u) / k)
