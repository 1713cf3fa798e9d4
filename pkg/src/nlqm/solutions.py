"""Closed-form solution families and an ODE-residual harness.

Families
--------
``sn-family``
    ``b = -2mu``, ``0 < mu < 1``, ``N^2 = (mu^2 + 1) / (2 mu^2)``:
    ``y = sn(t, mu)`` and
    ``x = (mu^2 + 1)/(16 mu^2) - sn^2/8 - cn dn / (8 mu)``.
``abel-bernoulli``
    ``y(xi) = N / (xi + B |xi^2 - 1|^(1/2))`` with ``xi = z / (mu N)``, a
    solution of the Bernoulli reduction on ``b = -mu/2`` (and, with
    ``mu -> 2 mu``, on ``b = mu``).  Lives in ``xi``, not in time.
``soliton-b0``, ``soliton-mu0``, ``soliton-general``
    ``x = A sech^2(kappa t)`` solving the Levinson-Smith x-equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _fd
from .dynamics import SystemForm, coupled_field, rhs_levinson_x, rhs_lienard_y
from .elliptic import sncndn
from .errors import DomainError, InadmissibleError, SingularityError
from .params import ModelParams, sn_constraint_N2, validate_params
from .transforms import BernoulliBranch, bernoulli_rhs

__all__ = [
    "Family",
    "SolutionFamily",
    "ResidualReport",
    "eval_sn_family",
    "sn_family_derivatives",
    "eval_abel_solution",
    "abel_poles",
    "abel_grid",
    "soliton_shape",
    "eval_soliton",
    "sech2",
    "verify_residual",
    "residual_report",
    "closed_form_initial_state",
    "ANALYTIC_TOL",
    "FD_TOL",
]

ANALYTIC_TOL = 1e-8
FD_TOL = 1e-6
POLE_TOL = 1e-12


class Family(str, Enum):
    SN = "sn-family"
    ABEL = "abel-bernoulli"
    SOLITON_B0 = "soliton-b0"
    SOLITON_MU0 = "soliton-mu0"
    SOLITON_GENERAL = "soliton-general"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        aliases = {"sn": cls.SN, "abel": cls.ABEL}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown family {value!r}; expected one of {names}") from None

    @property
    def is_soliton(self) -> bool:
        return self.value.startswith("soliton")


@dataclass(frozen=True)
class SolutionFamily:
    """A tagged closed-form solution bound to its parameters.

    Use the class-method constructors; they fill in the parameter values
    each family fixes (``b = -2mu`` for ``sn``, ``b = 0`` for ``soliton_b0``
    and so on).  :meth:`check` raises when the family's validity condition
    fails.
    """

    tag: Family
    params: ModelParams
    B: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Family.parse(self.tag))

    @classmethod
    def sn(cls, mu: float) -> "SolutionFamily":
        return cls(Family.SN, ModelParams(mu, -2.0 * mu, math.sqrt(sn_constraint_N2(mu))))

    @classmethod
    def abel(cls, N: float, B: float, mu: float = 1.0, branch=BernoulliBranch.MINUS_HALF_MU) -> "SolutionFamily":
        branch = BernoulliBranch(branch)
        b = -0.5 * mu if branch is BernoulliBranch.MINUS_HALF_MU else mu
        return cls(Family.ABEL, ModelParams(mu, b, N), B)

    @classmethod
    def soliton_b0(cls, mu: float, N: float, E: float) -> "SolutionFamily":
        return cls(Family.SOLITON_B0, ModelParams(mu, 0.0, N, E))

    @classmethod
    def soliton_mu0(cls, b: float, N: float, E: float) -> "SolutionFamily":
        return cls(Family.SOLITON_MU0, ModelParams(0.0, b, N, E))

    @classmethod
    def soliton_general(cls, mu: float, b: float, N: float) -> "SolutionFamily":
        return cls(Family.SOLITON_GENERAL, ModelParams(mu, b, N))

    @property
    def bernoulli_branch(self) -> BernoulliBranch:
        p = self.params
        if abs(p.b + 0.5 * p.mu) <= 1e-12:
            return BernoulliBranch.MINUS_HALF_MU
        if abs(p.b - p.mu) <= 1e-12:
            return BernoulliBranch.MU
        raise InadmissibleError("abel-bernoulli family requires b = -mu/2 or b = mu")

    def check(self) -> None:
        """Raise :class:`InadmissibleError` naming the violated constraint."""
        p = self.params
        if self.tag is Family.ABEL:
            if self.B is None or not math.isfinite(self.B):
                raise InadmissibleError("abel-bernoulli family requires a finite constant B")
            if p.mu == 0:
                raise InadmissibleError("abel-bernoulli family requires mu != 0 (xi = z / (mu N))")
            self.bernoulli_branch
            return
        report = validate_params(p)
        key = self.tag.value.replace("-family", "_family").replace("-", "_")
        if not getattr(report, key):
            raise InadmissibleError(f"{self.tag.value}: {report.reasons[key]}")

    @property
    def is_valid(self) -> bool:
        try:
            self.check()
        except InadmissibleError:
            return False
        return True


# -- evaluators ---------------------------------------------------------------


def _require(f, *tags):
    if f.tag not in tags:
        raise InadmissibleError(f"expected family {[t.value for t in tags]}, got {f.tag.value}")
    f.check()


def eval_sn_family(f: SolutionFamily, t):
    """``(y, x)`` of the sn-family at time(s) ``t``."""
    _require(f, Family.SN)
    mu = f.params.mu
    sn, cn, dn = sncndn(t, mu)
    x = (mu * mu + 1.0) / (16.0 * mu * mu) - sn * sn / 8.0 - cn * dn / (8.0 * mu)
    if np.ndim(t) == 0:
        return float(sn), float(x)
    return sn, x


def sn_family_derivatives(f: SolutionFamily, t):
    """Analytic ``(y, y', y'', x, x')`` of the sn-family."""
    _require(f, Family.SN)
    k = f.params.mu
    sn, cn, dn = sncndn(t, k)
    y = sn
    yp = cn * dn
    ypp = -sn * dn * dn - k * k * sn * cn * cn
    x = (k * k + 1.0) / (16.0 * k * k) - sn * sn / 8.0 - cn * dn / (8.0 * k)
    xp = -sn * cn * dn / 4.0 - ypp / (8.0 * k)
    return y, yp, ypp, x, xp


def abel_poles(N: float, B: float) -> list:
    """Sorted real zeros of ``xi + B |xi^2 - 1|^(1/2)``."""
    if B == 0:
        return [0.0]
    sgn = -math.copysign(1.0, B)
    poles = [sgn * abs(B) / math.sqrt(1.0 + B * B)]
    if abs(B) > 1:
        poles.append(sgn * abs(B) / math.sqrt(B * B - 1.0))
    return sorted(poles)


def eval_abel_solution(N: float, B: float, xi):
    """``N / (xi + B |xi^2 - 1|^(1/2))``.

    At the cusps ``xi = +/-1`` the square root vanishes and the value is
    ``N / xi``.

    Raises
    ------
    SingularityError
        At a pole (vanishing denominator); ``location`` holds the ``xi``.
    """
    xi_arr = np.asarray(xi, dtype=float)
    den = xi_arr + B * np.sqrt(np.abs(xi_arr * xi_arr - 1.0))
    bad = np.abs(den) < POLE_TOL
    if np.any(bad):
        where = float(np.atleast_1d(xi_arr)[np.argmax(np.atleast_1d(bad))])
        raise SingularityError(f"pole of the Abel solution at xi = {where:.17g}", location=where)
    y = N / den
    return float(y) if np.ndim(xi) == 0 else y


def abel_grid(N: float, B: float, lo=-3.0, hi=3.0, n=1201, exclude=1e-3) -> np.ndarray:
    """Uniform ``xi`` grid with ``exclude``-neighbourhoods of cusps and poles removed."""
    xi = np.linspace(lo, hi, n)
    special = [-1.0, 1.0] + abel_poles(N, B)
    keep = np.ones_like(xi, dtype=bool)
    for s in special:
        keep &= np.abs(xi - s) > exclude
    return xi[keep]


def sech2(arg):
    """``sech(arg)^2`` without overflow; exactly even in ``arg``."""
    a = np.abs(np.asarray(arg, dtype=float))
    e = np.exp(-2.0 * a)
    out = 4.0 * e / (1.0 + e) ** 2
    return float(out) if np.ndim(arg) == 0 else out


def soliton_shape(f: SolutionFamily) -> tuple:
    """Amplitude and rate ``(A, kappa)`` with ``x(t) = A sech^2(kappa t)``."""
    _require(f, Family.SOLITON_B0, Family.SOLITON_MU0, Family.SOLITON_GENERAL)
    p = f.params
    mu, b, N = p.mu, p.b, p.N
    if f.tag is Family.SOLITON_B0:
        return 2.0 * mu * mu * N * N / (8.0 * mu * mu - p.E), N * mu
    if f.tag is Family.SOLITON_MU0:
        return (p.E + 2.0 * b * b * N * N) / (8.0 * b * b), math.sqrt(0.5 * p.E + b * b * N * N)
    return 0.25 * N * N, (mu + b) * N


def eval_soliton(f: SolutionFamily, t):
    """``x(t) = A sech^2(kappa t)`` for a soliton family."""
    A, kappa = soliton_shape(f)
    return A * sech2(kappa * np.asarray(t, dtype=float)) if np.ndim(t) else A * sech2(kappa * t)


def _soliton_derivatives(f, t):
    A, kappa = soliton_shape(f)
    arg = kappa * t
    s2 = sech2(arg)
    th = np.tanh(arg)
    x = A * s2
    xp = -2.0 * kappa * x * th
    xpp = 2.0 * kappa * kappa * x * (2.0 - 3.0 * s2)
    return x, xp, xpp


def closed_form_initial_state(f: SolutionFamily, form, t0: float = 0.0) -> tuple:
    """Native initial state for integrating ``form`` from the closed form at ``t0``."""
    form = SystemForm.parse(form)
    if f.tag is Family.SN:
        y, yp, _, x, xp = sn_family_derivatives(f, np.array([t0]))
        if form is SystemForm.COUPLED:
            return (float(y[0]), float(x[0]))
        if form is SystemForm.LIENARD:
            return (float(y[0]), float(yp[0]))
        return (float(x[0]), float(xp[0]))
    if f.tag.is_soliton:
        if form is not SystemForm.LEVINSON:
            raise DomainError("soliton families are x-profiles; use the levinson-smith-x form")
        x, xp, _ = _soliton_derivatives(f, np.array([t0]))
        return (float(x[0]), float(xp[0]))
    raise DomainError("the abel-bernoulli family is not a time-domain solution")


# -- residual harness --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Outcome of an ODE residual check on a grid.

    ``max_abs_residual`` is the plain absolute residual.  For the Abel family,
    whose solution has poles, ``max_scaled_residual`` divides each residual
    by ``max(1, |dy/dz|)``; elsewhere the two coincide.
    """

    family: str
    form: str
    grid: np.ndarray
    max_abs_residual: float
    derivative_method: str
    max_scaled_residual: float
    tolerance: float
    residuals: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.max_scaled_residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "form": self.form,
            "grid": [float(v) for v in self.grid],
            "max_abs_residual": float(self.max_abs_residual),
            "max_scaled_residual": float(self.max_scaled_residual),
            "derivative_method": self.derivative_method,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def residual_report(label, form, grid, residuals, method, scale=None) -> ResidualReport:
    residuals = np.abs(np.asarray(residuals, dtype=float))
    scaled = residuals if scale is None else residuals / np.maximum(1.0, np.abs(scale))
    tol = ANALYTIC_TOL if method == "analytic" else FD_TOL
    return ResidualReport(
        family=label,
        form=form,
        grid=np.asarray(grid, dtype=float),
        max_abs_residual=float(residuals.max()) if residuals.size else 0.0,
        derivative_method=method,
        max_scaled_residual=float(scaled.max()) if scaled.size else 0.0,
        tolerance=tol,
        residuals=residuals,
    )


def _default_form(f):
    if f.tag is Family.SN:
        return SystemForm.LIENARD
    if f.tag is Family.ABEL:
        return None
    return SystemForm.LEVINSON


def verify_residual(f: SolutionFamily, grid, form=None) -> ResidualReport:
    """Residual of the governing ODE of ``f`` over ``grid``.

    ``form`` defaults to the family's natural equation (``lienard-y`` for the
    sn-family, ``levinson-smith-x`` for solitons).  The abel-bernoulli family
    is always checked against its Bernoulli equation in ``z = s mu N xi``
    (``s = 1`` on ``b = -mu/2``, ``s = 2`` on ``b = mu``) using five-point
    central differences; the others use analytic derivatives, except the
    sn-family against ``levinson-smith-x``, which differentiates numerically.

    Raises
    ------
    SingularityError
        When a grid point (or its difference stencil) touches a singularity.
    """
    f.check()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-d sequence")
    p = f.params

    if f.tag is Family.ABEL:
        if form is not None:
            raise DomainError("the abel-bernoulli family is verified against its Bernoulli equation only")
        return _verify_abel(f, grid)

    form = _default_form(f) if form is None else SystemForm.parse(form)

    if f.tag is Family.SN:
        if form is SystemForm.LIENARD:
            y, yp, ypp, _, _ = sn_family_derivatives(f, grid)
            res = ypp - rhs_lienard_y(p, y, yp)
            return residual_report(f.tag.value, form.value, grid, res, "analytic")
        if form is SystemForm.COUPLED:
            y, yp, _, x, xp = sn_family_derivatives(f, grid)
            dy, dx = coupled_field(p, y, x)
            res = np.maximum(np.abs(yp - dy), np.abs(xp - dx))
            return residual_report(f.tag.value, form.value, grid, res, "analytic")
        x = lambda t: eval_sn_family(f, t)[1]
        xv = x(grid)
        _positive_or_raise(grid, xv)
        res = _fd.d2(x, grid) - rhs_levinson_x(p, xv, _fd.d1(x, grid))
        return residual_report(f.tag.value, form.value, grid, res, "central-difference")

    if form is not SystemForm.LEVINSON:
        raise DomainError("soliton families are checked against the levinson-smith-x form")
    x, xp, xpp = _soliton_derivatives(f, grid)
    _positive_or_raise(grid, x)
    res = xpp - rhs_levinson_x(p, x, xp)
    return residual_report(f.tag.value, form.value, grid, res, "analytic")


def _positive_or_raise(grid, x):
    bad = np.asarray(x) <= 0
    if np.any(bad):
        t = float(grid[np.argmax(bad)])
        raise SingularityError(f"x underflows to 0 at grid point t = {t:.17g}", location=t)


def _verify_abel(f, grid):
    p = f.params
    N, B = p.N, f.B
    s = p.mu if f.bernoulli_branch is BernoulliBranch.MINUS_HALF_MU else 2.0 * p.mu
    h = _fd.FIRST_STEP
    reach = 2.0 * h
    for c in [-1.0, 1.0] + abel_poles(N, B):
        near = np.abs(grid - c) <= reach
        if np.any(near):
            where = float(grid[np.argmax(near)])
            raise SingularityError(
                f"grid point xi = {where:.17g} lies on the difference stencil of the cusp/pole at {c:.17g}",
                location=where,
            )
    y = eval_abel_solution(N, B, grid)
    dy_dz = _fd.d1(lambda xi: eval_abel_solution(N, B, xi), grid, h) / (s * N)
    rhs = bernoulli_rhs(p, f.bernoulli_branch, y, s * N * grid)
    res = dy_dz - rhs
    return residual_report(f.tag.value, "bernoulli", grid, res, "central-difference", scale=dy_dz)
