"""Five-point central difference stencils."""
import numpy as np

FIRST_STEP = 1e-5
SECOND_STEP = 1e-3


def d1(f, t, h=FIRST_STEP):
    t = np.asarray(t, dtype=float)
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def d2(f, t, h=SECOND_STEP):
    t = np.asarray(t, dtype=float)
    return (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h)
