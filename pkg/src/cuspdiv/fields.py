"""Evaluable scalar and vector fields.

Coordinates are flat arrays ``[x, y_1..y_k, z_1..z_m]``; every callable takes
an ``(..., n)`` array and evaluates vectorized. Fields optionally carry an
analytic gradient and a compact-support descriptor; both are trusted by the
consumers (and spot-checked where the contracts require it).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CompactSupport:
    """Axis-aligned ellipsoidal support: |(p - center)/radii| < 1."""

    center: tuple
    radii: tuple

    def scaled_sq_dist(self, pts):
        c = np.asarray(self.center)
        r = np.asarray(self.radii)
        return (((pts - c) / r) ** 2).sum(axis=-1)

    def contains(self, pts):
        return self.scaled_sq_dist(pts) < 1.0

    def bounding_box(self):
        c = np.asarray(self.center)
        r = np.asarray(self.radii)
        return c - r, c + r


class ScalarField:
    def __init__(self, fn, grad=None, support=None, name=""):
        self._fn = fn
        self._grad = grad
        self.support = support
        self.name = name

    def __call__(self, pts):
        return self._fn(np.asarray(pts, dtype=float))

    @property
    def has_gradient(self):
        return self._grad is not None

    def gradient(self, pts):
        if self._grad is None:
            raise ValueError(f"field {self.name!r} has no analytic gradient")
        return self._grad(np.asarray(pts, dtype=float))

    # linear field algebra; compactness survives sums of compact fields only
    # when the supports coincide, so the result conservatively drops it
    def __add__(self, other):
        if isinstance(other, ScalarField):
            grad = None
            if self._grad is not None and other._grad is not None:
                grad = lambda p: self.gradient(p) + other.gradient(p)
            return ScalarField(lambda p: self(p) + other(p), grad,
                               name=f"({self.name}+{other.name})")
        return self._shift(float(other))

    def __radd__(self, other):
        return self._shift(float(other))

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            return self + (-1.0) * other
        return self._shift(-float(other))

    def __mul__(self, c):
        c = float(c)
        grad = None if self._grad is None else (lambda p: c * self.gradient(p))
        return ScalarField(lambda p: c * self(p), grad,
                           support=self.support, name=f"{c}*{self.name}")

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def _shift(self, c):
        grad = None if self._grad is None else self._grad
        return ScalarField(lambda p: self(p) + c, grad,
                           name=f"({self.name}{c:+g})")


class VectorField:
    def __init__(self, fn, n_components, jacobian=None, name=""):
        self._fn = fn
        self.n_components = n_components
        self._jac = jacobian
        self.name = name

    def __call__(self, pts):
        return self._fn(np.asarray(pts, dtype=float))

    @property
    def has_jacobian(self):
        return self._jac is not None

    def jacobian(self, pts):
        """(..., n_components, n) array of d u_j / d x_i as [..., j, i]."""
        if self._jac is None:
            raise ValueError(f"field {self.name!r} has no analytic jacobian")
        return self._jac(np.asarray(pts, dtype=float))

    def divergence(self, pts):
        jac = self.jacobian(pts)
        return np.trace(jac, axis1=-2, axis2=-1)

    def component(self, j):
        return ScalarField(lambda p: self(p)[..., j], name=f"{self.name}[{j}]")


def constant_field(c, n=None):
    c = float(c)
    grad = None
    if n is not None:
        grad = lambda p: np.zeros(p.shape)
    return ScalarField(lambda p: np.full(p.shape[:-1], c), grad, name=f"const{c:g}")


def coordinate_field(i):
    def grad(p):
        g = np.zeros(p.shape)
        g[..., i] = 1.0
        return g
    return ScalarField(lambda p: p[..., i], grad, name=f"coord{i}")


def bump_field(center, radii, amplitude=1.0):
    """C-infinity bump exp(-1/(1 - s^2)) on the ellipsoid s < 1, analytic gradient."""
    center = np.asarray(center, dtype=float)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), center.shape).copy()
    amplitude = float(amplitude)
    sup = CompactSupport(tuple(center), tuple(radii))

    def fn(pts):
        s2 = sup.scaled_sq_dist(pts)
        out = np.zeros(s2.shape)
        inside = s2 < 1.0
        out[inside] = amplitude * np.exp(-1.0 / (1.0 - s2[inside]))
        return out

    def grad(pts):
        s2 = sup.scaled_sq_dist(pts)
        out = np.zeros(pts.shape)
        inside = s2 < 1.0
        if inside.any():
            g = 1.0 - s2[inside]
            val = amplitude * np.exp(-1.0 / g)
            coef = -2.0 * val / (g * g)
            out[inside] = coef[..., None] * (pts[inside] - center) / radii ** 2
        return out

    return ScalarField(fn, grad, support=sup, name="bump")


def zero_extend(field, domain):
    """Restrict a field to a domain, evaluating as 0 outside.

    The wrapped callable is only invoked at inside points, so formulas that
    blow up off-domain (negative powers of x, logs) stay safe.
    """
    def fn(pts):
        inside = domain.contains(pts)
        out = np.zeros(pts.shape[:-1])
        if np.any(inside):
            out[inside] = field(pts[inside])
        return out

    return ScalarField(fn, support=field.support,
                       name=f"{field.name}|domain")
