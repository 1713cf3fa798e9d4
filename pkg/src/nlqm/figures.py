"""Data tables behind the two published figures."""
from __future__ import annotations

import numpy as np

from .solutions import SolutionFamily, abel_poles, eval_abel_solution, eval_soliton

FIG1_B = (1.0, 2.0)
FIG1_N = (1.0, 2.0)
FIG2_DEFAULTS = {"E": 10.0, "N": 1.0, "mu": 1.0, "b": -2.0}
POLE_NEIGHBOURHOOD = 1e-3
STEP_DENOM = 200  # grid step 1/200 = 0.005, built from integers so 0 and +/-1 are exact


def fig1_table(N: float, Bs=FIG1_B, lo=-3.0, hi=3.0):
    """Rows ``(xi, y_B1, y_B2, ...)``; cells within 1e-3 of a pole are ``None``.

    Returns ``(header, rows, poles)`` where ``poles`` maps each ``B`` to its
    pole locations.
    """
    ks = np.arange(round(lo * STEP_DENOM), round(hi * STEP_DENOM) + 1)
    xi = ks / STEP_DENOM
    poles = {B: abel_poles(N, B) for B in Bs}
    cols = []
    for B in Bs:
        near = np.zeros_like(xi, dtype=bool)
        for pole in poles[B]:
            near |= np.abs(xi - pole) <= POLE_NEIGHBOURHOOD
        vals = np.full_like(xi, np.nan)
        vals[~near] = eval_abel_solution(N, B, xi[~near])
        cols.append([None if np.isnan(v) else float(v) for v in vals])
    header = ("xi",) + tuple(f"y_B{B:g}" for B in Bs)
    rows = [(float(x),) + tuple(c[i] for c in cols) for i, x in enumerate(xi)]
    return header, rows, poles


def fig2_table(E=10.0, N=1.0, mu=1.0, b=-2.0, t_max=6.0):
    """Rows ``(t, x_eq30, x_eq32, x_eq33)`` and a list of warnings.

    The b = 0 soliton needs ``E < 8 mu^2``; when the requested energy breaks
    that, ``E = 4 mu^2`` is used for that column and a warning is returned.
    The mu = 0 soliton uses ``(E, b, N)``, the general one ``(mu, b, N)``.
    """
    warnings = []
    E30 = E
    if not E < 8 * mu * mu:
        E30 = 4.0 * mu * mu
        warnings.append(
            f"fig2: E={E:g} violates E < 8mu^2 = {8 * mu * mu:g} required by the b=0 soliton; "
            f"x_eq30 uses substituted E={E30:g}"
        )
    fam30 = SolutionFamily.soliton_b0(mu, N, E30)
    fam32 = SolutionFamily.soliton_mu0(b, N, E)
    fam33 = SolutionFamily.soliton_general(mu, b, N)

    t = np.arange(0, round(t_max * STEP_DENOM) + 1) / STEP_DENOM
    cols = [eval_soliton(f, t) for f in (fam30, fam32, fam33)]
    rows = [tuple(float(v) for v in r) for r in zip(t, *cols)]
    return ("t", "x_eq30", "x_eq32", "x_eq33"), rows, warnings
