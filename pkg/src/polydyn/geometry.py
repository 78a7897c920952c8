"""Points of the upper half-plane, the disc and their products, with the
invariant (Kobayashi/Poincare) distances.

Normalization: the disc distance from 0 to r is log((1+r)/(1-r)), i.e.
curvature -1. The half-plane distance is the push-forward under the Cayley
transform.

Scalars are plain Python/numpy complex numbers; product points are 1-D
complex arrays (or arrays of shape (..., q) for batches). The distance
functions also accept ``gmpy2.mpc`` scalars, which the orbit machinery uses
to follow orbits whose coordinates leave the float64 exponent range.
"""

import math

import gmpy2
import numpy as np

BOUNDARY_TOL = 1e-12


class DomainError(ValueError):
    """A point lies outside the domain it was supposed to belong to."""


def as_halfplane_point(z):
    z = complex(z)
    if not z.imag > 0 or not math.isfinite(z.real) or not math.isfinite(z.imag):
        raise DomainError(f"{z!r} is not in the upper half-plane")
    return z


def as_disc_point(w):
    w = complex(w)
    if not abs(w) < 1:
        raise DomainError(f"{w!r} is not in the unit disc")
    return w


def as_polypoint(coords, dim=None):
    z = np.asarray(coords, dtype=complex)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("a product point needs a non-empty 1-D coordinate list")
    if dim is not None and z.size != dim:
        raise DomainError(f"expected {dim} coordinates, got {z.size}")
    if not np.all(z.imag > 0) or not np.all(np.isfinite(z)):
        raise DomainError(f"{z!r} is not in the poly-halfplane")
    return z


def near_boundary(z, tol=BOUNDARY_TOL):
    """True if a half-plane point is within ``tol`` of the real axis.

    Such points are accepted everywhere, but distances computed from them
    carry fewer significant digits.
    """
    return bool(np.any(np.asarray(z).imag < tol))


def _is_ext(*xs):
    return any(isinstance(x, (gmpy2.mpc, gmpy2.mpfr)) for x in xs)


_LOG_SWITCH = 1e300


def _dist_halfplane_ext(z, w):
    if not isinstance(z, gmpy2.mpc):
        z = gmpy2.mpc(z)
    if not isinstance(w, gmpy2.mpc):
        w = gmpy2.mpc(w)
    # u = sinh(d/2)^2; past the float range asinh(sqrt(u)) = log(4u)/2 to double precision
    u = gmpy2.norm(z - w) / (4 * z.imag * w.imag)
    if u < _LOG_SWITCH:
        return 2.0 * math.asinh(math.sqrt(float(u)))
    return float(gmpy2.log(4 * u))


def dist_halfplane(z, w):
    """Invariant distance on the upper half-plane.

    Equals log((|z - conj w| + |z - w|) / (|z - conj w| - |z - w|)); evaluated
    as 2 asinh(|z - w| / (2 sqrt(Im z Im w))) which keeps full relative
    precision for both very small and very large separations. Broadcasts
    over numpy arrays.
    """
    if _is_ext(z, w):
        return _dist_halfplane_ext(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    d = 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))
    return float(d) if d.ndim == 0 else d


def dist_disc(z, w):
    """Invariant distance on the unit disc, log((1+rho)/(1-rho)) with
    rho = |z-w| / |1 - conj(z) w|."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    den = np.sqrt((1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2))
    d = 2.0 * np.arcsinh(np.abs(z - w) / den)
    return float(d) if d.ndim == 0 else d


def dist_poly(z, w):
    """Kobayashi distance of the poly-halfplane: max of coordinate distances.

    ``z`` and ``w`` have shape (..., q); the reduction is over the last axis.
    """
    if isinstance(z, (list, tuple)) and _is_ext(*z):
        if len(z) != len(w):
            raise DomainError(f"dimension mismatch: {len(z)} vs {len(w)}")
        return max(_dist_halfplane_ext(a, b) for a, b in zip(z, w))
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1:] != w.shape[-1:]:
        raise DomainError(f"dimension mismatch: {z.shape} vs {w.shape}")
    d = np.max(dist_halfplane(z, w), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def dist_polydisc(z, w):
    """Coordinatewise max of disc distances on the polydisc."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1:] != w.shape[-1:]:
        raise DomainError(f"dimension mismatch: {z.shape} vs {w.shape}")
    d = np.max(dist_disc(z, w), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def cayley(z):
    """Cayley transform z -> (z - i)/(z + i), from H onto the disc."""
    if _is_ext(z):
        return (z - 1j) / (z + 1j)
    z = np.asarray(z, dtype=complex)
    out = (z - 1j) / (z + 1j)
    return complex(out) if out.ndim == 0 else out


def cayley_inv(w):
    """Inverse Cayley transform w -> i(1 + w)/(1 - w), from the disc onto H."""
    if _is_ext(w):
        return 1j * (1 + w) / (1 - w)
    w = np.asarray(w, dtype=complex)
    out = 1j * (1.0 + w) / (1.0 - w)
    return complex(out) if out.ndim == 0 else out


def random_halfplane_points(rng, shape, re_range=(-3.0, 3.0), im_range=(0.1, 10.0)):
    """Sample points of H: uniform real part, log-uniform imaginary part."""
    x = rng.uniform(*re_range, size=shape)
    y = np.exp(rng.uniform(math.log(im_range[0]), math.log(im_range[1]), size=shape))
    return x + 1j * y


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v):
    if isinstance(v, (int, float)):
        return complex(v)
    re, im = v
    return complex(float(re), float(im))
