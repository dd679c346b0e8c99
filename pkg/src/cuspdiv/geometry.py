"""Cusp domains, the distance to the cusp set, the power change of variables
and the divergence-compatible (Piola) push-forward.

The domain is {(x, y, z) in (0,1) x R^k x (0,1)^m : |y| < x^gamma} with
ambient dimension n = m + k + 1. gamma = 1 gives the convex reference domain;
gamma > 1 an external cusp whose singular boundary set is {0} x [0,1]^m.

All types are immutable and every operation is pure, so concurrent
evaluation is safe.
"""

from dataclasses import dataclass

import numpy as np

from .fields import VectorField


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class CuspDomain:
    gamma: float
    k: int = 1
    m: int = 0

    def __post_init__(self):
        if self.gamma < 1.0:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.m < 0:
            raise DomainError(f"m must be >= 0, got {self.m}")

    @property
    def n(self):
        return self.m + self.k + 1

    @property
    def alpha(self):
        return 1.0 / self.gamma

    @property
    def volume(self):
        """|Omega| = vol(B_1^k) integral_0^1 x^(gamma k) dx, closed form."""
        return _unit_ball_volume(self.k) / (self.gamma * self.k + 1.0)

    def reference(self):
        return CuspDomain(1.0, self.k, self.m)

    # ---- coordinate handling -------------------------------------------
    def check_shape(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.n:
            raise DimensionError(
                f"point has {pts.shape[-1]} coordinates, domain needs {self.n}")
        return pts

    def split(self, pts):
        pts = self.check_shape(pts)
        return pts[..., 0], pts[..., 1:1 + self.k], pts[..., 1 + self.k:]

    def join(self, x, y, z=None):
        parts = [np.asarray(x)[..., None], np.asarray(y)]
        if self.m:
            parts.append(np.asarray(z))
        return np.concatenate(parts, axis=-1)

    # ---- predicates and distances --------------------------------------
    def contains(self, pts):
        """Strict interior test; boundary points count as outside."""
        x, y, z = self.split(pts)
        ok = (x > 0.0) & (x < 1.0)
        ok &= np.linalg.norm(y, axis=-1) < x ** self.gamma
        for i in range(self.m):
            ok &= (z[..., i] > 0.0) & (z[..., i] < 1.0)
        return ok

    def dist_to_cusp(self, pts):
        """Euclidean distance to M = {0} x [0,1]^m, defined on all of R^n.

        The z-part is clamped onto [0,1]^m coordinate-wise; on the domain
        itself this is the identity and d_M = |(x, y)|.
        """
        x, y, z = self.split(pts)
        d2 = x * x + (y * y).sum(axis=-1)
        if self.m:
            zc = np.clip(z, 0.0, 1.0)
            d2 = d2 + ((z - zc) ** 2).sum(axis=-1)
        return np.sqrt(d2)

    def boundary_distance(self, pts):
        """Approximate distance to the boundary (positive inside).

        The cusp face uses the tangent-plane estimate
        (x^gamma - |y|) / sqrt(1 + gamma^2 x^(2 gamma - 2)), exact for
        gamma = 1; good enough for probe placement and patch sizing.
        """
        x, y, z = self.split(pts)
        ay = np.linalg.norm(y, axis=-1)
        slope = self.gamma * x ** (self.gamma - 1.0)
        d = (x ** self.gamma - ay) / np.sqrt(1.0 + slope * slope)
        d = np.minimum(d, 1.0 - x)
        for i in range(self.m):
            d = np.minimum(d, np.minimum(z[..., i], 1.0 - z[..., i]))
        return d

    # ---- change of variables F(x^, y^, z^) = (x^^alpha, y^, z^) ---------
    def map_from_reference(self, pts_hat):
        pts_hat = self.check_shape(pts_hat)
        x_hat = pts_hat[..., 0]
        if np.any(x_hat <= 0.0):
            raise DomainError("change of variables needs x > 0")
        out = pts_hat.copy()
        out[..., 0] = x_hat ** self.alpha
        return out

    def map_to_reference(self, pts):
        pts = self.check_shape(pts)
        x = pts[..., 0]
        if np.any(x <= 0.0):
            raise DomainError("change of variables needs x > 0")
        out = pts.copy()
        out[..., 0] = x ** self.gamma
        return out

    def det_jacobian(self, pts_hat):
        """det DF at reference points: alpha * x^^(alpha - 1)."""
        pts_hat = self.check_shape(pts_hat)
        return self.alpha * pts_hat[..., 0] ** (self.alpha - 1.0)

    def det_jacobian_inverse(self, pts):
        """det DF^-1 at physical points: gamma * x^(gamma - 1)."""
        pts = self.check_shape(pts)
        return self.gamma * pts[..., 0] ** (self.gamma - 1.0)

    def sample_interior(self, rng, size, margin=0.0):
        """Rejection-sample interior points with boundary_distance > margin."""
        out = np.empty((size, self.n))
        got = 0
        while got < size:
            batch = max(4 * (size - got), 64)
            x = rng.uniform(0.0, 1.0, batch)
            y = rng.uniform(-1.0, 1.0, (batch, self.k)) * (x ** self.gamma)[:, None]
            cols = [x[:, None], y]
            if self.m:
                cols.append(rng.uniform(0.0, 1.0, (batch, self.m)))
            pts = np.concatenate(cols, axis=1)
            keep = self.contains(pts) & (self.boundary_distance(pts) > margin)
            take = pts[keep][: size - got]
            out[got:got + len(take)] = take
            got += len(take)
        return out


@dataclass(frozen=True)
class Point:
    """Convenience wrapper for a single coordinate tuple."""

    x: float
    y: tuple = ()
    z: tuple = ()

    def array(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        z = np.atleast_1d(np.asarray(self.z, dtype=float)) if len(np.atleast_1d(self.z)) else np.empty(0)
        return np.concatenate([[self.x], y, z])


@dataclass(frozen=True)
class LiftedDomain:
    """Base cusp domain extended by an n'-dimensional cross-section |z'| < x^s."""

    base: CuspDomain
    n_prime: int
    s: float

    def __post_init__(self):
        if self.n_prime < 0:
            raise DomainError("n_prime must be >= 0")
        if not (0.0 < self.s <= self.base.gamma):
            raise DomainError(f"s must lie in (0, gamma], got {self.s}")


def _unit_ball_volume(d):
    from math import gamma as _g, pi
    return pi ** (d / 2.0) / _g(d / 2.0 + 1.0)


def contains(domain, pt):
    """True iff the point is strictly interior."""
    res = domain.contains(np.asarray(pt, dtype=float))
    return bool(res) if np.ndim(res) == 0 else res


def dist_to_cusp(domain, pt):
    res = domain.dist_to_cusp(np.asarray(pt, dtype=float))
    return float(res) if np.ndim(res) == 0 else res


def cusp_map(domain, pt_hat):
    """Map a reference point through F and return (image, det DF)."""
    pt_hat = np.asarray(pt_hat, dtype=float)
    mapped = domain.map_from_reference(pt_hat)
    det = domain.det_jacobian(pt_hat)
    if np.ndim(det) == 0:
        return mapped, float(det)
    return mapped, det


def piola_pushforward(domain, v_hat):
    """Push a vector field on the reference domain forward to the cusp domain.

    u_1(x, y, z) = v^_1(x^gamma, y, z) and
    u_j(x, y, z) = gamma x^(gamma-1) v^_j(x^gamma, y, z) for j >= 2,
    which is (det DF)^-1 DF v^ composed with F^-1. The composed closed form
    is evaluated directly (single x^gamma per call) rather than chaining the
    three callbacks.

    Satisfies div u (F(x^)) = det DF(x^)^-1 div v^(x^).
    """
    gamma = domain.gamma

    def fn(pts):
        pts = domain.check_shape(pts)
        squeeze = pts.ndim == 1
        if squeeze:
            pts = pts[None, :]
        x = pts[..., 0]
        if np.any(x <= 0.0):
            raise DomainError("Piola push-forward needs x > 0")
        hat = pts.copy()
        hat[..., 0] = x ** gamma
        vals = np.asarray(v_hat(hat), dtype=float)
        out = vals.copy()
        out[..., 1:] *= (gamma * x ** (gamma - 1.0))[..., None]
        return out[0] if squeeze else out

    return VectorField(fn, domain.n, name=f"piola({getattr(v_hat, 'name', 'v')})")


def lifted_integral_identity(lifted, g, rule):
    """Integrate g over the lifted domain two ways.

    lhs uses an explicit product rule on Omega^{n', s} (base rule times a
    cross-section rule on the |z'| < x^s ball); rhs is
    vol(B_1^{n'}) * integral_Omega g * x^(s n') on the base rule alone.
    g must depend on the base coordinates only.
    """
    from .quadrature import integrate  # deferred to avoid import cycle

    n_prime, s = lifted.n_prime, lifted.s
    base = lifted.base
    if n_prime == 0:
        val = integrate(rule, g)
        return val, val

    x = rule.nodes[:, 0]
    gv = np.asarray(g(rule.nodes), dtype=float)
    radii = x ** s
    if n_prime == 1:
        _, wq = np.polynomial.legendre.leggauss(8)
        # Gauss rule on z' in (-x^s, x^s); g is z'-independent so only the
        # weight sum (= 2 x^s) survives the inner reduction
        cross = radii * wq.sum()
    elif n_prime == 2:
        q, wq = np.polynomial.legendre.leggauss(8)
        r = 0.5 * (q + 1.0)
        wr = 0.5 * wq
        # polar rule on the disc of radius x^s: radial Gauss x uniform angle
        cross = radii ** 2 * (2.0 * np.pi * (wr * r).sum())
    else:
        raise DomainError("lifted cross-sections implemented for n' <= 2")
    lhs = float((rule.weights * gv * cross).sum())

    vol = _unit_ball_volume(n_prime)
    weighted = rule.weights * gv * x ** (s * n_prime)
    rhs = float(vol * weighted.sum())
    return lhs, rhs
