"""Abel/Bernoulli reduction of the y-equation, the last-multiplier first
integral of the x-equation, its position-dependent-mass reading, and
level-surface quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate as _quad

from .errors import DomainError, InadmissibleError, SingularityError, TurningPointError
from .params import ModelParams

__all__ = [
    "AbelState",
    "BernoulliBranch",
    "FirstIntegral",
    "LevelBranch",
    "abel_coefficient",
    "yz_coefficient",
    "y2_coefficient",
    "bernoulli_gate",
    "abel_rhs",
    "transformed_rhs",
    "reduced_rhs",
    "bernoulli_rhs",
    "first_integral",
    "pdm_mass",
    "pdm_potential",
    "level_surface_radicand",
    "level_surface_time",
]

_BRANCH_TOL = 1e-12
_SING_TOL = 1e-12


# -- Abel chain --------------------------------------------------------------


def abel_coefficient(p: ModelParams) -> float:
    """The shift ``a = -(2/3)(2mu + b)`` in ``w = y z + a y^2``."""
    return -2.0 * (2.0 * p.mu + p.b) / 3.0


def yz_coefficient(p: ModelParams, a: Optional[float] = None) -> float:
    """Coefficient ``3a + 2(2mu + b)`` of ``y z`` after substituting ``w = yz + ay^2``.

    Zero for the default ``a`` from :func:`abel_coefficient`.
    """
    if a is None:
        a = abel_coefficient(p)
    return 3.0 * a + 2.0 * (2.0 * p.mu + p.b)


def y2_coefficient(p: ModelParams, a: Optional[float] = None) -> float:
    """Net ``y^2`` coefficient on the right of the transformed equation.

    Collects ``-2a^2 - 2(2mu + b) a - 2 mu (mu + b)``; for the default ``a``
    it coincides with :func:`bernoulli_gate`.
    """
    if a is None:
        a = abel_coefficient(p)
    mu, b = p.mu, p.b
    return -2.0 * a * a - 2.0 * (2.0 * mu + b) * a - 2.0 * mu * (mu + b)


def bernoulli_gate(p: ModelParams) -> float:
    """``(4/9)(b + mu/2)(b - mu)``; vanishes exactly on the two Bernoulli branches."""
    return 4.0 / 9.0 * (p.b + 0.5 * p.mu) * (p.b - p.mu)


@dataclass(frozen=True)
class AbelState:
    """Point ``(y, w, z)`` with ``w = dy/dt`` and ``w = y z + a y^2``."""

    y: float
    w: float
    z: float

    @classmethod
    def from_yw(cls, p: ModelParams, y: float, w: float) -> "AbelState":
        if y == 0:
            raise SingularityError("z = (w - a y^2) / y is undefined at y = 0", location=0.0)
        a = abel_coefficient(p)
        return cls(y, w, (w - a * y * y) / y)

    def residual(self, p: ModelParams) -> float:
        return self.w - (self.y * self.z + abel_coefficient(p) * self.y ** 2)


def abel_rhs(p: ModelParams, y, w):
    """Right side of the Abel form, i.e. ``w dw/dy`` with ``w = dy/dt``."""
    mu, b, N = p.mu, p.b, p.N
    k = 2.0 * mu * (mu + b)
    return -2.0 * (2.0 * mu + b) * y * w - k * y**3 + k * N * N * y


def transformed_rhs(p: ModelParams, y, z, a: Optional[float] = None):
    """``dz/dy`` of the Abel equation after ``w = y z + a y^2`` (any ``a``)."""
    if a is None:
        a = abel_coefficient(p)
    mu, b, N = p.mu, p.b, p.N
    num = (
        2.0 * mu * (mu + b) * N * N
        + y2_coefficient(p, a) * y * y
        - yz_coefficient(p, a) * y * z
        - z * z
    )
    den = y * z + a * y * y
    if np.any(np.abs(den) < _SING_TOL):
        raise SingularityError("y z + a y^2 vanishes", location=(y, z))
    return num / den


def reduced_rhs(p: ModelParams, y, z):
    """``dy/dz`` after the ``yz`` term is eliminated (general ``b``)."""
    a = abel_coefficient(p)
    den = -z * z + 2.0 * p.mu * (p.mu + p.b) * p.N ** 2 + bernoulli_gate(p) * y * y
    if np.any(np.abs(den) < _SING_TOL):
        raise SingularityError("reduced equation denominator vanishes", location=(y, z))
    return (y * z + a * y * y) / den


class BernoulliBranch(str, Enum):
    MINUS_HALF_MU = "b-eq-minus-half-mu"
    MU = "b-eq-mu"


def bernoulli_rhs(p: ModelParams, branch, y, z):
    """``dy/dz`` on one of the two Bernoulli branches.

    ``b = -mu/2``: ``(yz - mu y^2) / (mu^2 N^2 - z^2)``;
    ``b = mu``: ``(yz - 2 mu y^2) / (4 mu^2 N^2 - z^2)``.
    """
    branch = BernoulliBranch(branch)
    mu, N = p.mu, p.N
    if branch is BernoulliBranch.MINUS_HALF_MU:
        if abs(p.b + 0.5 * mu) > _BRANCH_TOL:
            raise InadmissibleError("Bernoulli branch requires b = -mu/2")
        s = mu
    else:
        if abs(p.b - mu) > _BRANCH_TOL:
            raise InadmissibleError("Bernoulli branch requires b = mu")
        s = 2.0 * mu
    den = -z * z + s * s * N * N
    if np.any(np.abs(den) < _SING_TOL):
        raise SingularityError(f"Bernoulli denominator vanishes at z = +/-{abs(s) * N:.17g}", location=z)
    return (y * z - s * y * y) / den


# -- first integral and PDM reading -----------------------------------------


def _check_x(p, x):
    p.lambda_exp
    if np.any(np.asarray(x) <= 0):
        raise DomainError("x must be positive (fractional powers of x)")


def pdm_mass(p: ModelParams, x):
    """Position-dependent mass ``M(x) = x^(-2 Lambda)``."""
    _check_x(p, x)
    return np.power(x, -2.0 * p.lambda_exp)


def pdm_potential(p: ModelParams, x):
    """``V(x) = -2 (mu + b)^2 [N^2 x^(-mu/(mu+b)) - 4 x^(b/(mu+b))]``."""
    _check_x(p, x)
    s = p.mu + p.b
    return -2.0 * s * s * (p.N ** 2 * np.power(x, -p.mu / s) - 4.0 * np.power(x, p.b / s))


def first_integral(p: ModelParams, x, xdot):
    """Conserved quantity of the Levinson-Smith x-equation.

    ``E = M(x) xdot^2 / 2 + V(x)`` where ``M(x) = x^(-2 Lambda)`` is the
    Jacobi last multiplier of the equation.
    """
    return 0.5 * pdm_mass(p, x) * xdot * xdot + pdm_potential(p, x)


@dataclass(frozen=True)
class FirstIntegral:
    """First integral bound to a parameter set (``b + mu != 0``)."""

    params: ModelParams

    def __post_init__(self):
        self.params.lambda_exp

    @property
    def lambda_exp(self) -> float:
        return self.params.lambda_exp

    def value_at(self, x, xdot):
        return first_integral(self.params, x, xdot)

    __call__ = value_at


# -- level surface -----------------------------------------------------------


class LevelBranch(str, Enum):
    GENERAL = "general"
    B0 = "b0"
    MU0 = "mu0"


def _check_level_branch(p, branch):
    if branch is LevelBranch.B0:
        if p.b != 0 or p.mu == 0:
            raise InadmissibleError("b0 branch requires b = 0 and mu != 0")
    elif branch is LevelBranch.MU0:
        if p.mu != 0 or p.b == 0:
            raise InadmissibleError("mu0 branch requires mu = 0 and b != 0")
    elif p.b + p.mu == 0:
        raise InadmissibleError("general branch requires b + mu != 0")


def level_surface_radicand(p: ModelParams, E: float, branch, x):
    """``(dx/dt)^2`` on the level surface ``first_integral = E``.

    general: ``2E x^((3mu+2b)/(mu+b)) + 4 (mu+b)^2 N^2 x^2 - 16 (mu+b)^2 x^3``;
    b0: ``4 mu^2 N^2 x^2 + (2E - 16 mu^2) x^3``;
    mu0: ``(2E + 4 b^2 N^2) x^2 - 16 b^2 x^3``.
    """
    branch = LevelBranch(branch)
    _check_level_branch(p, branch)
    mu, b, N = p.mu, p.b, p.N
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("level surface requires x > 0")
    if branch is LevelBranch.B0:
        return x * x * (4.0 * mu * mu * N * N + (2.0 * E - 16.0 * mu * mu) * x)
    if branch is LevelBranch.MU0:
        return x * x * ((2.0 * E + 4.0 * b * b * N * N) - 16.0 * b * b * x)
    s = mu + b
    return 2.0 * E * np.power(x, (3.0 * mu + 2.0 * b) / s) + x * x * (4.0 * s * s * N * N - 16.0 * s * s * x)


def level_surface_time(p: ModelParams, E: Optional[float], branch, x_from: float, x_to: float) -> float:
    """Time for ``x`` to decrease from ``x_from`` to ``x_to`` on a level surface.

    Evaluates ``t = -int_{x_from}^{x_to} dx / sqrt(R(x))`` with ``R`` from
    :func:`level_surface_radicand`; the result is positive.  Either endpoint
    may be a turning point (``R = 0``): the substitution
    ``x = x_to + (x_from - x_to) sin^2(theta)`` removes the inverse square
    root singularity there, after which adaptive Gauss-Kronrod quadrature is
    applied.

    Raises
    ------
    TurningPointError
        If ``R <= 0`` strictly inside the interval.
    """
    branch = LevelBranch(branch)
    if E is None:
        E = p.require_E()
    _check_level_branch(p, branch)
    if not (x_from >= x_to > 0):
        raise DomainError("requires x_from >= x_to > 0 (x decreasing along the orbit)")
    if x_from == x_to:
        return 0.0
    width = x_from - x_to

    theta = np.linspace(0.0, 0.5 * math.pi, 1025)[1:-1]
    xs = x_to + width * np.sin(theta) ** 2
    rs = level_surface_radicand(p, E, branch, xs)
    if np.any(rs <= 0):
        bad = float(xs[np.argmax(rs <= 0)])
        raise TurningPointError(f"radicand non-positive at x = {bad:.17g}", location=bad)

    def integrand(th):
        s, c = math.sin(th), math.cos(th)
        x = x_to + width * s * s
        r = float(level_surface_radicand(p, E, branch, x))
        if r <= 0:
            # rounding right at a turning point; the regularised integrand is
            # bounded there so dropping the node is harmless
            if min(s, c) < 1e-6:
                return 0.0
            raise TurningPointError(f"radicand non-positive at x = {x:.17g}", location=x)
        return 2.0 * width * s * c / math.sqrt(r)

    value, _ = _quad.quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-10, epsrel=1e-12, limit=200)
    return value
