"""Small shared numerical kernels: fixed-step RK4 and cumulative trapezoid."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import StepFailure


def rk4_integrate(rhs: Callable, t_grid, y0, substeps: int = 1) -> np.ndarray:
    """Integrate y' = rhs(t, y) over t_grid with fixed-step RK4.

    Returns the state at every grid point, shape (len(t_grid), len(y0)).
    Each grid interval is split into `substeps` equal RK4 steps.  Raises
    StepFailure if the state goes non-finite.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    y = np.array(y0, dtype=float)
    out = np.empty((len(t_grid), y.size))
    out[0] = y
    for i in range(len(t_grid) - 1):
        dt = (t_grid[i + 1] - t_grid[i]) / substeps
        t = t_grid[i]
        for _ in range(substeps):
            k1 = np.asarray(rhs(t, y))
            k2 = np.asarray(rhs(t + 0.5 * dt, y + 0.5 * dt * k1))
            k3 = np.asarray(rhs(t + 0.5 * dt, y + 0.5 * dt * k2))
            k4 = np.asarray(rhs(t + dt, y + dt * k3))
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
        if not np.all(np.isfinite(y)):
            raise StepFailure(f"state went non-finite near t = {t_grid[i + 1]!r}")
        out[i + 1] = y
    return out


def cumtrapz(y: np.ndarray, x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Cumulative trapezoid of samples y over x, zero at the first point."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    dx = np.diff(x)
    shape = [1] * y.ndim
    shape[axis] = len(dx)
    dx = dx.reshape(shape)
    ya = np.take(y, range(0, y.shape[axis] - 1), axis=axis)
    yb = np.take(y, range(1, y.shape[axis]), axis=axis)
    seg = 0.5 * (ya + yb) * dx
    out_shape = list(y.shape)
    out = np.zeros(out_shape)
    idx = [slice(None)] * y.ndim
    idx[axis] = slice(1, None)
    out[tuple(idx)] = np.cumsum(seg, axis=axis)
    return out
