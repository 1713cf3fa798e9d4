"""Vector fields of the coupled (x, y) system and its second-order reductions.

Three equivalent descriptions are available:

* ``coupled-xy``: ``y' = mu (N^2 - y^2) + 4 b x``, ``x' = -2 (b + mu) y x``,
  state ordering ``(y, x)``;
* ``lienard-y``: ``y'' + 2 (2mu + b) y y' + 2 mu (mu + b) y (y^2 - N^2) = 0``,
  state ``(y, y')``;
* ``levinson-smith-x``: ``x'' - Lambda x'^2 / x + (mu + b)(2 mu N^2 x + 8 b x^2) = 0``,
  state ``(x, x')``, defined for ``b + mu != 0`` and ``x > 0``.

Second-order forms are integrated as first-order pairs with the same
steppers as the coupled system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, InadmissibleError, IntegrationError, SingularityError
from .params import ModelParams, PhaseState, StepStats, Trajectory

__all__ = [
    "SystemForm",
    "IntegratorConfig",
    "rhs_coupled",
    "coupled_field",
    "rhs_lienard_y",
    "rhs_levinson_x",
    "initial_state",
    "integrate",
]


class SystemForm(str, Enum):
    COUPLED = "coupled-xy"
    LIENARD = "lienard-y"
    LEVINSON = "levinson-smith-x"

    @property
    def labels(self) -> tuple:
        return {"coupled-xy": ("y", "x"), "lienard-y": ("u", "du"), "levinson-smith-x": ("u", "du")}[self.value]

    @property
    def positive_index(self) -> Optional[int]:
        """Index of the state component that must stay positive, if any."""
        return {"coupled-xy": 1, "lienard-y": None, "levinson-smith-x": 0}[self.value]

    @classmethod
    def parse(cls, value) -> "SystemForm":
        if isinstance(value, cls):
            return value
        aliases = {"coupled": cls.COUPLED, "lienard": cls.LIENARD, "levinson": cls.LEVINSON}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown form {value!r}; expected one of {names}") from None


# -- vector fields -----------------------------------------------------------


def coupled_field(p: ModelParams, y, x):
    """``(dy/dt, dx/dt)``; works elementwise on arrays."""
    dy = p.mu * (p.N * p.N - y * y) + 4.0 * p.b * x
    dx = -2.0 * (p.b + p.mu) * y * x
    return dy, dx


def rhs_coupled(p: ModelParams, s: PhaseState):
    """Right-hand side of the coupled system at a :class:`PhaseState`.

    Returns ``(dy_dt, dx_dt)``.
    """
    return coupled_field(p, s.y, s.x)


def rhs_lienard_y(p: ModelParams, y, yp):
    """``y''`` from the Liénard form, valid for every parameter set."""
    mu, b, N = p.mu, p.b, p.N
    return -2.0 * (2.0 * mu + b) * y * yp - 2.0 * mu * (mu + b) * y * (y * y - N * N)


def rhs_levinson_x(p: ModelParams, x, xp):
    """``x''`` from the Levinson-Smith form.

    Raises
    ------
    InadmissibleError
        If ``b + mu == 0``.
    SingularityError
        If any ``x <= 0`` (the ``x'^2 / x`` coefficient is singular).
    """
    lam = p.lambda_exp
    if np.any(np.asarray(x) <= 0):
        raise SingularityError("Levinson-Smith form is singular for x <= 0", location=x)
    mu, b, N = p.mu, p.b, p.N
    return lam * xp * xp / x - (mu + b) * (2.0 * mu * N * N * x + 8.0 * b * x * x)


def _vector_field(form: SystemForm, p: ModelParams):
    if form is SystemForm.COUPLED:
        def f(state):
            dy, dx = coupled_field(p, state[0], state[1])
            return np.array([dy, dx])
    elif form is SystemForm.LIENARD:
        def f(state):
            return np.array([state[1], rhs_lienard_y(p, state[0], state[1])])
    else:
        p.lambda_exp  # raises for b + mu == 0

        def f(state):
            return np.array([state[1], rhs_levinson_x(p, state[0], state[1])])
    return f


def initial_state(form, p: ModelParams, x0: float, y0: float, v0: Optional[float] = None) -> tuple:
    """Native initial state of ``form`` from a coupled-system point ``(x0, y0)``.

    For the second-order forms the initial derivative is taken from the
    coupled equations unless ``v0`` is given.
    """
    form = SystemForm.parse(form)
    if form is SystemForm.COUPLED:
        return (y0, x0)
    dy, dx = coupled_field(p, y0, x0)
    if form is SystemForm.LIENARD:
        return (y0, dy if v0 is None else v0)
    return (x0, dx if v0 is None else v0)


# -- integrators -------------------------------------------------------------


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    ``method`` is ``"rk4"`` (fixed step ``dt``) or ``"adaptive"``
    (Dormand-Prince 5(4) with ``abs_tol``/``rel_tol``).
    """

    t_end: float
    method: str = "adaptive"
    dt: float = 1e-3
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 1_000_000
    t_start: float = 0.0
    first_step: Optional[float] = None

    def __post_init__(self):
        if self.method not in ("rk4", "adaptive"):
            raise DomainError(f"unknown method {self.method!r}; use 'rk4' or 'adaptive'")
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)) or self.t_end <= self.t_start:
            raise DomainError("t_end must be finite and greater than t_start")
        if not self.dt > 0 or not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("dt and tolerances must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be a positive integer")


# Dormand-Prince 5(4)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class _Rejected(Exception):
    pass


def _guarded(f, pos):
    # stage evaluations at x <= 0 become step rejections, not failures
    def g(state):
        if pos is not None and state[pos] <= 0:
            raise _Rejected
        try:
            return f(state)
        except SingularityError:
            raise _Rejected from None
    return g


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _dp_step(f, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(f(yi))
    y_new = y + h * sum(b * k for b, k in zip(_B, ks[:6]))
    err = h * sum(e * k for e, k in zip(_E, ks))
    return y_new, err, ks[6]


def _initial_step(f, y0, f0, atol, rtol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    try:
        f1 = f(y0 + h0 * f0)
    except _Rejected:
        return h0
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def _trajectory(ts, ys, form, method, stats):
    return Trajectory(np.array(ts), np.array(ys), form.labels, method, stats)


def integrate(form, p: ModelParams, init, cfg: IntegratorConfig) -> Trajectory:
    """Integrate ``form`` from ``init`` over ``[cfg.t_start, cfg.t_end]``.

    ``init`` is a :class:`PhaseState` (coupled form only) or a pair in the
    form's native ordering, see :class:`SystemForm`.  When the positive
    component (``x``) starts positive, any trial step producing ``x <= 0`` is
    rejected and retried with half the step; values are never clamped.

    Raises
    ------
    IntegrationError
        When ``max_steps`` is exceeded or the step size underflows; the
        exception's ``partial`` attribute carries the trajectory so far.
    """
    form = SystemForm.parse(form)
    if isinstance(init, PhaseState):
        if form is not SystemForm.COUPLED:
            raise DomainError("a PhaseState initial condition requires the coupled form")
        y0 = np.array([init.y, init.x], dtype=float)
    else:
        y0 = np.array(init, dtype=float).reshape(2)
    if not np.all(np.isfinite(y0)):
        raise DomainError("initial state must be finite")

    if form is SystemForm.COUPLED and y0[1] < 0:
        raise DomainError("x = |gamma|^2 must be non-negative")
    if form is SystemForm.LEVINSON:
        p.lambda_exp
        if y0[0] <= 0:
            raise SingularityError("Levinson-Smith form requires x(t0) > 0", location=y0[0])

    pos = form.positive_index
    if pos is not None and not y0[pos] > 0:
        pos = None
    f = _guarded(_vector_field(form, p), pos)

    # overflowing trial steps are rejected below, so silence numpy about them
    with np.errstate(over="ignore", invalid="ignore"):
        if cfg.method == "rk4":
            return _integrate_rk4(f, form, y0, cfg, pos)
        return _integrate_adaptive(f, form, y0, cfg, pos)


def _integrate_rk4(f, form, y0, cfg, pos):
    t0, t_end = cfg.t_start, cfg.t_end
    n = max(1, math.ceil((t_end - t0) / cfg.dt - 1e-9))
    ts, ys = [t0], [y0]
    accepted = rejected = 0
    y = y0

    def fail(msg):
        stats = StepStats(accepted, rejected, float("nan"))
        raise IntegrationError(msg, partial=_trajectory(ts, ys, form, "rk4-fixed", stats))

    for k in range(1, n + 1):
        t_target = t_end if k == n else t0 + k * cfg.dt
        # substeps are halved on positivity violations until they pass
        pending = [t_target]
        t = ts[-1]
        while pending:
            t_next = pending[-1]
            h = t_next - t
            if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
                fail(f"step size underflow at t = {t:.17g}")
            try:
                y_new = _rk4_step(f, y, h)
                if pos is not None and y_new[pos] <= 0:
                    raise _Rejected
                if not np.all(np.isfinite(y_new)):
                    fail(f"non-finite state at t = {t_next:.17g}")
            except _Rejected:
                rejected += 1
                pending.append(t + 0.5 * h)
                continue
            pending.pop()
            t, y = t_next, y_new
            ts.append(t)
            ys.append(y)
            accepted += 1
            if accepted >= cfg.max_steps and (pending or k < n):
                fail(f"max_steps = {cfg.max_steps} exceeded at t = {t:.17g}")
    return _trajectory(ts, ys, form, "rk4-fixed", StepStats(accepted, rejected, float("nan")))


def _integrate_adaptive(f, form, y0, cfg, pos):
    atol, rtol = cfg.abs_tol, cfg.rel_tol
    t, t_end = cfg.t_start, cfg.t_end
    y = y0
    ts, ys = [t], [y]
    accepted = rejected = 0
    max_err = 0.0

    def stats():
        return StepStats(accepted, rejected, max_err)

    def fail(msg):
        raise IntegrationError(msg, partial=_trajectory(ts, ys, form, "adaptive", stats()))

    k1 = f(y)
    h = cfg.first_step or _initial_step(f, y, k1, atol, rtol)
    h = min(h, t_end - t)
    just_rejected = False

    while t < t_end:
        if accepted >= cfg.max_steps:
            fail(f"max_steps = {cfg.max_steps} exceeded at t = {t:.17g}")
        if h <= 16 * np.finfo(float).eps * max(1.0, abs(t)):
            fail(f"step size underflow at t = {t:.17g}")
        last = t + h >= t_end
        if last:
            h = t_end - t
        try:
            y_new, err_vec, k_last = _dp_step(f, y, h, k1)
            if pos is not None and y_new[pos] <= 0:
                raise _Rejected
        except _Rejected:
            rejected += 1
            h *= 0.5
            just_rejected = True
            continue
        if not np.all(np.isfinite(y_new)):
            rejected += 1
            h *= 0.5
            just_rejected = True
            continue

        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t = t_end if last else t + h
            y = y_new
            k1 = k_last
            ts.append(t)
            ys.append(y)
            accepted += 1
            max_err = max(max_err, float(np.max(np.abs(err_vec))))
            factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            if just_rejected:
                factor = min(1.0, factor)
            just_rejected = False
            h *= factor
        else:
            rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            just_rejected = True
    return _trajectory(ts, ys, form, "adaptive", stats())
