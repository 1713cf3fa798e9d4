"""Model parameters, phase-space states and trajectories.

The reduced two-state system is governed by the tuple ``(mu, b, N)`` and,
on a level surface of the first integral, an energy ``E``.  Everything in
this module is an immutable value.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InadmissibleError

__all__ = [
    "ModelParams",
    "PhaseState",
    "StepStats",
    "Trajectory",
    "ValidationReport",
    "validate_params",
    "BoundsWarning",
]

# exact comparisons against zero are intended: the branch conditions
# b = 0, mu = 0, b + mu = 0 are structural, not numerical
_SN_CONSTRAINT_TOL = 1e-12


class BoundsWarning(UserWarning):
    """A state has |y| > N (transient overshoot, reported but accepted)."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the coupled system.

    Parameters
    ----------
    mu : float
        Coefficient of the ``N**2 - y**2`` drive.
    b : float
        Imaginary part of the coupling ``g``.
    N : float
        Conserved norm, must be positive.
    E : float, optional
        Level-surface energy.  Operations that need it raise when absent.
    """

    mu: float
    b: float
    N: float = 1.0
    E: Optional[float] = None

    def __post_init__(self):
        for name in ("mu", "b", "N"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not self.N > 0:
            raise DomainError(f"N must be positive, got {self.N!r}")
        if self.E is not None and not math.isfinite(self.E):
            raise DomainError(f"E must be finite, got {self.E!r}")

    @property
    def levinson_admissible(self) -> bool:
        """True when ``b + mu != 0`` so the x-equation can be formed."""
        return self.b + self.mu != 0

    @property
    def lambda_exp(self) -> float:
        """Exponent ``(2b + 3mu) / (2(b + mu))`` of the last multiplier."""
        if not self.levinson_admissible:
            raise InadmissibleError("Lambda undefined: requires b + mu != 0")
        return (2 * self.b + 3 * self.mu) / (2 * (self.b + self.mu))

    def require_E(self) -> float:
        if self.E is None:
            raise InadmissibleError("energy E is required but was not given")
        return self.E

    def replace(self, **changes) -> "ModelParams":
        data = self.to_dict()
        data.setdefault("E", None)
        data.update(changes)
        return ModelParams(**data)

    def to_dict(self) -> dict:
        data = {"mu": self.mu, "b": self.b, "N": self.N}
        if self.E is not None:
            data["E"] = self.E
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        unknown = set(data) - {"mu", "b", "N", "E"}
        if unknown:
            raise DomainError(f"unknown parameter keys: {sorted(unknown)}")
        E = data.get("E")
        return cls(
            mu=float(data["mu"]),
            b=float(data["b"]),
            N=float(data.get("N", 1.0)),
            E=None if E is None else float(E),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PhaseState:
    """Point ``(t, x, y)`` of the coupled system; ``x = |gamma|**2 >= 0``."""

    t: float
    x: float
    y: float

    def __post_init__(self):
        if self.x < 0:
            raise DomainError(f"x = |gamma|^2 must be non-negative, got {self.x!r}")

    def check_bounds(self, N: float) -> bool:
        """Warn (never raise) when ``|y| > N``; return whether the bound holds."""
        ok = abs(self.y) <= N
        if not ok:
            warnings.warn(
                f"|y| = {abs(self.y):.17g} exceeds N = {N:.17g} at t = {self.t:.17g}",
                BoundsWarning,
                stacklevel=2,
            )
        return ok


@dataclass(frozen=True)
class StepStats:
    accepted: int = 0
    rejected: int = 0
    max_local_error: float = 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time series produced by :func:`nlqm.dynamics.integrate`.

    ``states`` has shape ``(n, 2)`` in the form's native ordering: ``(y, x)``
    for the coupled system, ``(u, du/dt)`` for the second-order forms.
    ``labels`` names the two columns.
    """

    t: np.ndarray
    states: np.ndarray
    labels: tuple
    method: str
    stats: StepStats = field(default_factory=StepStats)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        states = np.asarray(self.states, dtype=float).reshape(len(t), 2)
        if len(t) == 0:
            raise DomainError("a trajectory must contain at least one point")
        if np.any(np.diff(t) <= 0):
            raise DomainError("trajectory times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return len(self.t)

    def column(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def points(self) -> list:
        """The trajectory as :class:`PhaseState` values (coupled form only)."""
        if self.labels != ("y", "x"):
            raise DomainError("points are only defined for the coupled (y, x) form")
        return [PhaseState(float(t), float(x), float(y)) for t, (y, x) in zip(self.t, self.states)]


@dataclass(frozen=True)
class ValidationReport:
    """Which equation branches a parameter set admits.

    ``reasons`` maps every inadmissible branch to a human-readable
    description of the violated condition.
    """

    levinson_smith: bool
    soliton_b0: bool
    soliton_mu0: bool
    soliton_general: bool
    sn_family: bool
    reasons: dict

    def as_dict(self) -> dict:
        return {
            "levinson_smith": self.levinson_smith,
            "soliton_b0": self.soliton_b0,
            "soliton_mu0": self.soliton_mu0,
            "soliton_general": self.soliton_general,
            "sn_family": self.sn_family,
            "reasons": dict(self.reasons),
        }


def sn_constraint_N2(mu: float) -> float:
    """``N**2`` required for ``y = sn(t, mu)`` to solve the undamped y-equation."""
    return (mu * mu + 1) / (2 * mu * mu)


def validate_params(p: ModelParams) -> ValidationReport:
    """Report which branches are admissible for ``p``; never raises."""
    reasons = {}

    if p.b + p.mu == 0:
        reasons["levinson_smith"] = "b + mu != 0 required"

    b0 = []
    if p.b != 0:
        b0.append("b = 0 required")
    if p.mu == 0:
        b0.append("mu != 0 required")
    if p.E is None:
        b0.append("E required")
    elif not p.E < 8 * p.mu**2:
        b0.append("E < 8mu^2 required")
    if b0:
        reasons["soliton_b0"] = "; ".join(b0)

    mu0 = []
    if p.mu != 0:
        mu0.append("mu = 0 required")
    if p.b == 0:
        mu0.append("b != 0 required")
    if p.E is None:
        mu0.append("E required")
    elif not p.E > 0:
        mu0.append("E > 0 required")
    if mu0:
        reasons["soliton_mu0"] = "; ".join(mu0)

    if p.b + p.mu == 0:
        reasons["soliton_general"] = "b + mu != 0 required"

    sn = []
    if p.b != -2 * p.mu:
        sn.append("b = -2mu required")
    if not 0 < p.mu < 1:
        sn.append("0 < mu < 1 required")
    elif p.mu * p.mu == 0 or abs(p.N**2 - sn_constraint_N2(p.mu)) > _SN_CONSTRAINT_TOL:
        sn.append("N^2 = (mu^2+1)/(2mu^2) required")
    if sn:
        reasons["sn_family"] = "; ".join(sn)

    return ValidationReport(
        levinson_smith="levinson_smith" not in reasons,
        soliton_b0="soliton_b0" not in reasons,
        soliton_mu0="soliton_mu0" not in reasons,
        soliton_general="soliton_general" not in reasons,
        sn_family="sn_family" not in reasons,
        reasons=reasons,
    )
