"""Fixed points of the coupled system and their linear stability.

Jacobians use the state ordering ``(y, x)``, so the top-right entry is
``d(dy/dt)/dx = 4b``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .dynamics import coupled_field
from .errors import DomainError
from .params import ModelParams

__all__ = ["EquilibriumReport", "find_equilibria", "jacobian", "classify", "classify_matrix", "STATE_ORDER"]

STATE_ORDER = ("y", "x")
EQUILIBRIUM_TOL = 1e-9
DEGENERATE_TOL = 1e-9

STABLE_NODE = "stable-node"
UNSTABLE_NODE = "unstable-node"
SADDLE = "saddle"
STABLE_SPIRAL = "stable-spiral"
UNSTABLE_SPIRAL = "unstable-spiral"
CENTER = "center"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class EquilibriumReport:
    point: tuple
    jacobian: tuple
    trace: float
    det: float
    eigenvalues: tuple
    classification: str

    @property
    def stable(self) -> bool:
        return self.classification in (STABLE_NODE, STABLE_SPIRAL)

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "state_order": list(STATE_ORDER),
            "jacobian": [list(row) for row in self.jacobian],
            "trace": self.trace,
            "det": self.det,
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "class": self.classification,
        }


def find_equilibria(p: ModelParams) -> list:
    """Fixed points ``(x*, y*)``: ``(0, N)``, ``(0, -N)`` and, for ``b != 0``,
    ``(-mu N^2 / (4b), 0)``."""
    points = [(0.0, p.N), (0.0, -p.N)]
    if p.b != 0:
        points.append((-p.mu * p.N ** 2 / (4.0 * p.b), 0.0))
    return points


def jacobian(p: ModelParams, point) -> np.ndarray:
    """Analytic Jacobian at ``point = (x, y)`` in ``(y, x)`` ordering."""
    x, y = point
    s = p.b + p.mu
    return np.array([
        [-2.0 * p.mu * y, 4.0 * p.b],
        [-2.0 * s * x, -2.0 * s * y],
    ])


def classify_matrix(J) -> tuple:
    """Return ``(trace, det, eigenvalues, classification)`` of a 2x2 matrix."""
    J = np.asarray(J, dtype=float)
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    disc = tr * tr - 4.0 * det
    root = cmath.sqrt(disc)
    # larger-magnitude root first, the other from the product to avoid cancellation
    big = 0.5 * (tr + root) if tr >= 0 else 0.5 * (tr - root)
    small = det / big if big != 0 else 0.5 * (tr - root)
    eig = (complex(big), complex(small))

    if abs(det) < DEGENERATE_TOL or abs(disc) < DEGENERATE_TOL:
        cls = DEGENERATE
    elif det < 0:
        cls = SADDLE
    elif disc > 0:
        cls = STABLE_NODE if tr < 0 else UNSTABLE_NODE
    elif abs(tr) < DEGENERATE_TOL:
        cls = CENTER
    else:
        cls = STABLE_SPIRAL if tr < 0 else UNSTABLE_SPIRAL
    return tr, det, eig, cls


def classify(p: ModelParams, point) -> EquilibriumReport:
    """Linearise the coupled system at an equilibrium and classify it.

    Raises
    ------
    DomainError
        If ``point`` does not zero the vector field to within 1e-9.
    """
    x, y = (float(v) for v in point)
    dy, dx = coupled_field(p, y, x)
    residual = max(abs(dy), abs(dx))
    if residual > EQUILIBRIUM_TOL:
        raise DomainError(f"({x!r}, {y!r}) is not an equilibrium: residual {residual:.3e}")
    J = jacobian(p, (x, y))
    tr, det, eig, cls = classify_matrix(J)
    return EquilibriumReport(
        point=(x, y),
        jacobian=tuple(tuple(float(v) for v in row) for row in J),
        trace=tr,
        det=det,
        eigenvalues=eig,
        classification=cls,
    )


def analyse(p: ModelParams) -> list:
    """Reports for every equilibrium returned by :func:`find_equilibria`."""
    return [classify(p, pt) for pt in find_equilibria(p)]
