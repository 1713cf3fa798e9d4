"""Jacobi elliptic functions and the complete elliptic integral K.

Modulus convention: ``k`` (not the parameter ``m = k**2``), so that

    dn(u, k)**2 + k**2 * sn(u, k)**2 = 1

and ``w = sn(u, k)`` solves ``w'' + (1 + k**2) w - 2 k**2 w**3 = 0``.
Note that ``scipy.special.ellipj`` and ``ellipk`` take ``m = k**2``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = ["EllipticTriple", "complete_K", "jacobi_sncndn", "sncndn", "MAX_ITER", "TOL"]

MAX_ITER = 64
TOL = 1e-14


class EllipticTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def _check_modulus(k):
    if not (math.isfinite(k) and 0.0 <= k <= 1.0):
        raise DomainError(f"elliptic modulus must lie in [0, 1], got {k!r}")


def _agm(a, g):
    for _ in range(MAX_ITER):
        if abs(a - g) <= TOL * a:
            return 0.5 * (a + g)
        a, g = 0.5 * (a + g), math.sqrt(a * g)
    raise ConvergenceError(f"AGM did not converge in {MAX_ITER} iterations")


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, ``K(k) = pi / (2 agm(1, k'))``.

    Raises
    ------
    DomainError
        If ``k`` is outside ``[0, 1)``; ``k = 1`` is reported as divergent.
    """
    _check_modulus(k)
    if k == 1.0:
        raise DomainError("K diverges at k = 1")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, kp))


def _landen_scales(k):
    # descending Landen / AGM sequence (Bulirsch); em holds the arithmetic
    # means, en the geometric ones
    em, en = [], []
    a = 1.0
    emc = (1.0 - k) * (1.0 + k)
    for _ in range(MAX_ITER):
        em.append(a)
        emc = math.sqrt(emc)
        en.append(emc)
        c = 0.5 * (a + emc)
        if abs(a - emc) <= TOL * a:
            return em, en, c
        emc *= a
        a = c
    raise ConvergenceError(f"Landen recursion did not converge in {MAX_ITER} iterations")


def sncndn(u, k: float):
    """Vectorised ``(sn, cn, dn)`` for an array of arguments and one modulus.

    Returns three arrays shaped like ``u``.
    """
    _check_modulus(k)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("elliptic argument must be finite")

    if k == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if k == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()

    em, en, c = _landen_scales(k)
    phase = u * c
    sn0 = np.sin(phase)
    cn0 = np.cos(phase)

    # near a zero of sn the cotangent recursion overflows; there the
    # first-order value sin(uc)/c is exact to rounding
    regular = np.abs(sn0) > 1e-150
    safe = np.where(regular, sn0, 1.0)

    ratio = np.where(regular, cn0 / safe, 0.0)
    cc = c * ratio
    dn = np.ones_like(u)
    for b_, e_ in zip(reversed(em), reversed(en)):
        ratio = ratio * cc
        cc = cc * dn
        dn = (e_ + ratio) / (b_ + ratio)
        ratio = cc / b_
    mag = 1.0 / np.sqrt(cc * cc + 1.0)
    sn = np.copysign(mag, sn0)
    cn = cc * sn

    sn = np.where(regular, sn, sn0 / c)
    cn = np.where(regular, cn, cn0)
    dn = np.where(regular, dn, 1.0)
    return sn, cn, dn


def jacobi_sncndn(u: float, k: float) -> EllipticTriple:
    """Jacobi elliptic functions ``sn, cn, dn`` at argument ``u``, modulus ``k``.

    ``k = 0`` gives ``(sin u, cos u, 1)`` and ``k = 1`` gives
    ``(tanh u, sech u, sech u)`` exactly; interior moduli use the descending
    Landen transformation.
    """
    if not math.isfinite(u):
        raise DomainError(f"elliptic argument must be finite, got {u!r}")
    _check_modulus(k)
    if k == 0.0:
        return EllipticTriple(math.sin(u), math.cos(u), 1.0)
    if k == 1.0:
        sech = 1.0 / math.cosh(u)
        return EllipticTriple(math.tanh(u), sech, sech)
    sn, cn, dn = sncndn(np.array([u]), k)
    return EllipticTriple(float(sn[0]), float(cn[0]), float(dn[0]))
