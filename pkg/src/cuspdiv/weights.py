"""Power weights d_M^mu: Muckenhoupt class membership and the admissible
exponent range for the weighted divergence estimate.

The A_p test is the exact analytic criterion -(n-m) < mu < (n-m)(p-1); no
numerical A_p-constant estimator is provided (the sup over balls would be
expensive and noisy for no gain). All comparisons are strict: endpoints are
excluded.
"""

from dataclasses import dataclass

import numpy as np

from .fields import ScalarField
from .quadrature import ParameterError


def _check_pnm(p, n, m):
    if p <= 1.0:
        raise ParameterError(f"Lebesgue exponent must exceed 1, got p={p}")
    if not (n > m >= 0):
        raise ParameterError(f"need n > m >= 0, got n={n}, m={m}")


def is_muckenhoupt_ap(mu, p, n, m):
    """True iff d_M^mu lies in A_p, i.e. -(n-m) < mu < (n-m)(p-1) strictly."""
    _check_pnm(p, n, m)
    return bool(-(n - m) < mu < (n - m) * (p - 1.0))


def conjugate_exponent(p):
    return p / (p - 1.0)


def admissible_beta_interval(gamma, p, n, m):
    """Open interval of exponents beta for which the divergence estimate holds.

    (-gamma(n-m)/p - (gamma-1)/p', gamma(n-m)/p' - (gamma-1)/p') with
    p' = p/(p-1). Membership queries must use strict comparison.
    """
    if gamma < 1.0:
        raise ParameterError(f"gamma must be >= 1, got {gamma}")
    _check_pnm(p, n, m)
    pp = conjugate_exponent(p)
    lo = -gamma * (n - m) / p - (gamma - 1.0) / pp
    hi = gamma * (n - m) / pp - (gamma - 1.0) / pp
    return lo, hi


def beta_hat(beta, gamma, p):
    """Exponent transport to the reference domain: (beta + (gamma-1)/p') / gamma.

    beta inside the admissible interval iff d_M^(p beta_hat) passes the A_p
    test; that equivalence is exactly what makes the interval what it is.
    """
    if gamma < 1.0:
        raise ParameterError(f"gamma must be >= 1, got {gamma}")
    if p <= 1.0:
        raise ParameterError(f"Lebesgue exponent must exceed 1, got p={p}")
    return (beta + (gamma - 1.0) / conjugate_exponent(p)) / gamma


@dataclass(frozen=True)
class PowerWeight:
    """d_M^mu serving L^p on a domain with ambient/cusp dimensions (n, m)."""

    mu: float
    p: float
    n: int
    m: int

    def __post_init__(self):
        _check_pnm(self.p, self.n, self.m)

    @property
    def in_ap(self):
        return is_muckenhoupt_ap(self.mu, self.p, self.n, self.m)

    @property
    def conjugate(self):
        return conjugate_exponent(self.p)


def integrability_witness(gamma, n, m):
    """(1 - log x)^-1 x^(gamma - 1 - gamma(n-m)): the built-in test density
    showing that above the upper beta endpoint the weighted L^p space is no
    longer inside L^1, so mean-zero data stops making sense."""
    expo = gamma - 1.0 - gamma * (n - m)

    def fn(pts):
        x = pts[..., 0]
        return x ** expo / (1.0 - np.log(x))

    return ScalarField(fn, name="log_witness")
