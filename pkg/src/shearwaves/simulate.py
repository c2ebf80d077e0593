"""Conservative finite-volume evolution for the three 1D systems.

Two schemes share one kernel: first-order local Lax-Friedrichs (Rusanov
interface flux) and second-order MUSCL-Hancock with minmod-limited slopes.
All systems are advanced in conservation form w_t + f(w)_x = 0 with local
wave-speed bounds feeding the CFL step; a gradient monitor watches for loss
of smoothness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constitutive import ShearModulus
from .errors import BlowupDetected, HyperbolicityLoss
from .exact import FullState, StrainState
from .profiles import ProfileFunction

STEP_FLOOR_FACTOR = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D cell grid on [a, b] with periodic or outflow boundaries."""

    n: int
    a: float
    b: float
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 cells")
        if not self.b > self.a:
            raise ValueError("need b > a")
        if self.boundary not in ("periodic", "outflow"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.n) + 0.5) * self.h


@dataclass(frozen=True)
class SimulationConfig:
    """End coordinate, scheme selection, and stability/monitoring knobs."""

    end: float
    scheme: str = "muscl_minmod"
    cfl: float = 0.4
    snapshot_stride: int = 0
    blowup_factor: float = 50.0
    max_steps: int = 5_000_000

    def __post_init__(self):
        if not self.end >= 0.0:
            raise ValueError("end coordinate must be nonnegative")
        if self.scheme not in ("lax_friedrichs", "muscl_minmod"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.cfl <= 0.9:
            raise ValueError("cfl must lie in (0, 0.9]")
        if self.blowup_factor <= 1.0:
            raise ValueError("blowup_factor must exceed 1")


@dataclass
class Trajectory:
    """Snapshots plus per-step diagnostics of one evolution run."""

    grid: Grid1D
    field_names: tuple
    coords: np.ndarray          # snapshot coordinates, shape (n_snap,)
    states: np.ndarray          # shape (n_snap, n_fields, n_cells)
    tv: np.ndarray              # total variation per snapshot/field
    step_coords: np.ndarray
    step_max_speed: np.ndarray
    step_max_gradient: np.ndarray
    initial_gradient: float
    blowup_coordinate: Optional[float] = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def masses(self) -> np.ndarray:
        """Cell-sum conserved totals per snapshot/field (times h)."""
        return self.states.sum(axis=2) * self.grid.h

    def gradient_crossing(self, factor: float) -> Optional[float]:
        """First coordinate where the max gradient exceeded factor * initial."""
        hits = np.nonzero(self.step_max_gradient > factor * self.initial_gradient)[0]
        if len(hits) == 0:
            return None
        return float(self.step_coords[hits[0]])


def cfl_step(max_speed: float, h: float, cfl: float, remaining: float = math.inf) -> float:
    """CFL-limited step cfl*h/max_speed, capped by the remaining interval.

    A (numerically) zero speed cannot bound the step, so the remaining
    interval is used whole.
    """
    if max_speed <= 1e-300:
        return remaining
    return min(cfl * h / max_speed, remaining)


def _minmod(a, b):
    return np.where(a * b <= 0.0, 0.0, np.where(np.abs(a) < np.abs(b), a, b))


def _pad(w: np.ndarray, ng: int, boundary: str) -> np.ndarray:
    if boundary == "periodic":
        return np.concatenate([w[:, -ng:], w, w[:, :ng]], axis=1)
    left = np.repeat(w[:, :1], ng, axis=1)
    right = np.repeat(w[:, -1:], ng, axis=1)
    return np.concatenate([left, w, right], axis=1)


def _rusanov(flux, speed, a, b):
    alpha = np.maximum(speed(a), speed(b))
    return 0.5 * (flux(a) + flux(b)) - 0.5 * alpha * (b - a)


def _step_lf(w, dt, h, boundary, flux, speed):
    wp = _pad(w, 1, boundary)
    F = _rusanov(flux, speed, wp[:, :-1], wp[:, 1:])
    return w - (dt / h) * (F[:, 1:] - F[:, :-1])


def _step_muscl(w, dt, h, boundary, flux, speed):
    wp = _pad(w, 2, boundary)
    dm = wp[:, 1:-1] - wp[:, :-2]
    dp = wp[:, 2:] - wp[:, 1:-1]
    slope = _minmod(dm, dp)
    wc = wp[:, 1:-1]
    wl = wc - 0.5 * slope
    wr = wc + 0.5 * slope
    shift = -(dt / (2.0 * h)) * (flux(wr) - flux(wl))
    wl = wl + shift
    wr = wr + shift
    F = _rusanov(flux, speed, wr[:, :-1], wl[:, 1:])
    return w - (dt / h) * (F[:, 1:] - F[:, :-1])


def _max_gradient(w: np.ndarray, h: float) -> float:
    if w.shape[1] < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(w, axis=1)))) / h


def _total_variation(w: np.ndarray, boundary: str) -> np.ndarray:
    tv = np.sum(np.abs(np.diff(w, axis=1)), axis=1)
    if boundary == "periodic":
        tv = tv + np.abs(w[:, 0] - w[:, -1])
    return tv


def _evolve(w0: np.ndarray, grid: Grid1D, config: SimulationConfig,
            flux: Callable, speed: Callable, field_names: tuple,
            raise_on_blowup: bool) -> Trajectory:
    w = np.array(w0, dtype=float)
    h = grid.h
    end = config.end
    stepper = _step_lf if config.scheme == "lax_friedrichs" else _step_muscl
    g0 = max(_max_gradient(w, h), 1e-8)
    step_floor = STEP_FLOOR_FACTOR * (grid.b - grid.a)

    coords = [0.0]
    states = [w.copy()]
    step_coords, step_speed, step_grad = [], [], []
    blowup_at = None

    t = 0.0
    n_steps = 0
    while t < end - 1e-14 * max(1.0, abs(end)):
        amax = float(np.max(speed(w)))
        dt = cfl_step(amax, h, config.cfl, end - t)
        w = stepper(w, dt, h, grid.boundary, flux, speed)
        if not np.all(np.isfinite(w)):
            raise BlowupDetected(f"non-finite state at coordinate {t + dt!r}", coordinate=t + dt)
        t += dt
        n_steps += 1
        g = _max_gradient(w, h)
        step_coords.append(t)
        step_speed.append(amax)
        step_grad.append(g)
        tripped = g > config.blowup_factor * g0 or dt < step_floor
        if tripped and blowup_at is None:
            blowup_at = t
            if raise_on_blowup:
                raise BlowupDetected(
                    f"gradient monitor tripped at coordinate {t!r} "
                    f"(gradient {g:.3e} vs initial {g0:.3e}, step {dt:.3e})",
                    coordinate=t,
                )
        if config.snapshot_stride > 0 and n_steps % config.snapshot_stride == 0 and t < end:
            coords.append(t)
            states.append(w.copy())
        if n_steps >= config.max_steps:
            raise RuntimeError(f"exceeded max_steps = {config.max_steps}")
    if coords[-1] != t:
        coords.append(t)
        states.append(w.copy())

    states_arr = np.array(states)
    return Trajectory(
        grid=grid,
        field_names=field_names,
        coords=np.array(coords),
        states=states_arr,
        tv=np.array([_total_variation(s, grid.boundary) for s in states_arr]),
        step_coords=np.array(step_coords),
        step_max_speed=np.array(step_speed),
        step_max_gradient=np.array(step_grad),
        initial_gradient=g0,
        blowup_coordinate=blowup_at,
    )


# ---------------------------------------------------------------------------
# the three systems


def evolve_full(m: ShearModulus, grid: Grid1D, init: FullState,
                config: SimulationConfig) -> Trajectory:
    """Evolve the 4-field system (U, V, M, N) in conservation form.

    U_t = M_x, V_t = N_x, M_t = [Qt(s) U]_x, N_t = [Qt(s) V]_x with
    Qt = Q/rho and s = U^2 + V^2.  Squared wave speeds are Qt and
    Qt + 2 s Qt'(s); both must stay positive (else HyperbolicityLoss).
    When no analytic Q' is available the speed bound carries a 1.2 safety
    factor.  The gradient monitor raises BlowupDetected.
    """
    safety = 1.2 if m.dq is None else 1.0

    def _speeds_sq(w):
        U, V = w[0], w[1]
        s = U * U + V * V
        qt = m.qtilde(s)
        fast = qt + 2.0 * s * m.dqtilde(s)
        return qt, fast

    def flux(w):
        U, V, M, N = w
        s = U * U + V * V
        qt = m.qtilde(s)
        return -np.stack([M, N, qt * U, qt * V])

    def speed(w):
        slow, fast = _speeds_sq(w)
        lam2 = np.maximum(slow, fast)
        if np.any(slow <= 0.0) or np.any(fast <= 0.0):
            raise HyperbolicityLoss(
                f"squared wave speed went non-positive (min {min(np.min(slow), np.min(fast)):.3e})"
            )
        return safety * np.sqrt(lam2)

    w0 = np.stack([np.asarray(c, dtype=float) for c in (init.U, init.V, init.M, init.N)])
    return _evolve(w0, grid, config, flux, speed,
                   ("U", "V", "M", "N"), raise_on_blowup=True)


def evolve_asymptotic(beta: float, grid: Grid1D, init: StrainState,
                      config: SimulationConfig) -> Trajectory:
    """Evolve the weakly nonlinear system U_X = beta[(U^2+V^2)U]_tau (and V).

    The grid axis is tau, the evolution coordinate is X.  Plane-polarized
    data (V = 0) reduces to the scalar cubic law.  The gradient monitor
    raises BlowupDetected when smoothness is lost.
    """
    beta = float(beta)

    def flux(w):
        U, V = w
        s = U * U + V * V
        return -beta * np.stack([s * U, s * V])

    def speed(w):
        U, V = w
        return 3.0 * abs(beta) * (U * U + V * V)

    w0 = np.stack([np.asarray(c, dtype=float) for c in (init.U, init.V)])
    return _evolve(w0, grid, config, flux, speed, ("U", "V"), raise_on_blowup=True)


def evolve_scalar(beta: float, grid: Grid1D, rho0,
                  config: SimulationConfig) -> Trajectory:
    """Shock-capturing evolution of the scalar cubic law rho_X = beta (rho^3)_tau.

    Weak solutions continue past breaking, so the blowup monitor only records
    the crossing coordinate in the diagnostics and never raises.
    """
    beta = float(beta)

    def flux(w):
        return -beta * w**3

    def speed(w):
        return 3.0 * abs(beta) * w * w

    w0 = np.asarray(rho0, dtype=float)[None, :]
    return _evolve(w0, grid, config, flux, speed, ("rho",), raise_on_blowup=False)


def breaking_estimate(beta: float, rho0: ProfileFunction, tau_grid) -> float:
    """Gradient-catastrophe coordinate of the scalar law from characteristics.

    Characteristics launched from tau with speed -3*beta*rho0(tau)^2 first
    cross at X* = 1 / max_tau (d/dtau)[3 beta rho0^2]^+; monotone data of the
    harmless orientation (or constant data) never break: X* = inf.  Doubling
    beta halves X*.
    """
    tau = np.asarray(tau_grid, dtype=float)
    slope = 6.0 * float(beta) * np.asarray(rho0(tau)) * np.asarray(rho0.deriv(tau))
    mx = float(np.max(slope))
    if mx <= 0.0:
        return math.inf
    return 1.0 / mx
