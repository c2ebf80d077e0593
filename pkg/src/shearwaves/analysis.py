"""Eigenstructure and degeneracy analysis of the 2x2 flux system.

The system u_t = [P u]_x, v_t = [P v]_x has speeds lambda1 = P + u P_u + v P_v
(genuinely nonlinear direction d1 = (1, v/u)) and lambda2 = P (direction
d2 = (1, -P_u/P_v), along which lambda2 is constant: the second family is
always linearly degenerate).  Classification measures how far a given P sits
from the special subfamilies (coinciding speeds, complete exceptionality,
Hamiltonian structure, decoupling in a Riemann-invariant chart).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .constitutive import TempleFlux
from .errors import (
    ChartFailure,
    CoincidenceOfSpeeds,
    DegenerateConstraint,
    DegenerateDirection,
)
from .numerics import rk4_integrate
from .profiles import ProfileFunction, _fd_step

FLAG_SET_TOL = 1e-8
FLAG_CLEAR_TOL = 1e-4
DIRECTION_TOL = 1e-14
SPEED_GAP_TOL = 1e-12


@dataclass(frozen=True)
class ScalarField2D:
    """A scalar field of (u, v) with partial derivatives.

    Missing partials fall back to central differences
    (step 1e-6 * max(1, |arg|); second differences use 1e-4).
    """

    f: Callable
    fu: Optional[Callable] = None
    fv: Optional[Callable] = None
    fuu: Optional[Callable] = None
    fuv: Optional[Callable] = None
    fvv: Optional[Callable] = None
    name: str = "field"

    def __call__(self, u, v):
        return self.f(u, v)

    def d_u(self, u, v):
        if self.fu is not None:
            return self.fu(u, v)
        h = _fd_step(u)
        return (self.f(u + h, v) - self.f(u - h, v)) / (2.0 * h)

    def d_v(self, u, v):
        if self.fv is not None:
            return self.fv(u, v)
        h = _fd_step(v)
        return (self.f(u, v + h) - self.f(u, v - h)) / (2.0 * h)

    def d_uu(self, u, v):
        if self.fuu is not None:
            return self.fuu(u, v)
        h = 1e-4 * np.maximum(1.0, np.abs(u))
        return (self.f(u + h, v) - 2.0 * self.f(u, v) + self.f(u - h, v)) / (h * h)

    def d_vv(self, u, v):
        if self.fvv is not None:
            return self.fvv(u, v)
        h = 1e-4 * np.maximum(1.0, np.abs(v))
        return (self.f(u, v + h) - 2.0 * self.f(u, v) + self.f(u, v - h)) / (h * h)

    def d_uv(self, u, v):
        if self.fuv is not None:
            return self.fuv(u, v)
        hu = 1e-4 * np.maximum(1.0, np.abs(u))
        hv = 1e-4 * np.maximum(1.0, np.abs(v))
        return (
            self.f(u + hu, v + hv)
            - self.f(u + hu, v - hv)
            - self.f(u - hu, v + hv)
            + self.f(u - hu, v - hv)
        ) / (4.0 * hu * hv)

    @classmethod
    def from_flux(cls, flux: TempleFlux) -> "ScalarField2D":
        return cls(
            f=flux.p,
            fu=flux.p_u,
            fv=flux.p_v,
            fuu=flux.p_uu,
            fuv=flux.p_uv,
            fvv=flux.p_vv,
            name=flux.name,
        )


@dataclass(frozen=True)
class EigenReport:
    """Wave speeds, characteristic directions and degeneracy products at a state."""

    u: float
    v: float
    lambda1: float
    lambda2: float
    d1: tuple
    d2: tuple
    grad1_dot_d1: float
    grad2_dot_d2: float


def temple_eigen(f: TempleFlux, u: float, v: float) -> EigenReport:
    """Eigenstructure of the 2x2 flux Jacobian at (u, v).

    Raises DegenerateDirection when P_v = 0 (d2 undefined) or u = 0 (d1
    undefined).
    """
    u, v = float(u), float(v)
    P = float(f.p(u, v))
    Pu = float(f.p_u(u, v))
    Pv = float(f.p_v(u, v))
    scale = max(1.0, abs(P), abs(Pu))
    if abs(Pv) <= DIRECTION_TOL * scale:
        raise DegenerateDirection(f"P_v = {Pv!r} at ({u}, {v}): d2 undefined")
    if u == 0.0:
        raise DegenerateDirection(f"u = 0: d1 = (1, v/u) undefined")
    lam1 = P + u * Pu + v * Pv
    lam2 = P
    d1 = (1.0, v / u)
    d2 = (1.0, -Pu / Pv)
    Puu = float(f.p_uu(u, v))
    Puv = float(f.p_uv(u, v))
    Pvv = float(f.p_vv(u, v))
    grad1 = (2.0 * Pu + u * Puu + v * Puv, 2.0 * Pv + u * Puv + v * Pvv)
    ld1 = grad1[0] * d1[0] + grad1[1] * d1[1]
    # grad(lambda2) = (P_u, P_v); the product with d2 cancels exactly
    ld2 = Pu * d2[0] + Pv * d2[1]
    return EigenReport(u, v, lam1, lam2, d1, d2, ld1, ld2)


@dataclass(frozen=True)
class ClassificationReport:
    """Tri-state structure flags with the residuals that produced them.

    Flags are True when the residual stays <= 1e-8 on all samples, False when
    it reaches >= 1e-4 somewhere, and None (indeterminate) in between.
    """

    equal_eigenvalues: Optional[bool]
    completely_exceptional: Optional[bool]
    hamiltonian: Optional[bool]
    decouples: Optional[bool]
    residuals: dict = field(default_factory=dict)
    n_samples: int = 0


def _flag(residual_max: float) -> Optional[bool]:
    if residual_max <= FLAG_SET_TOL:
        return True
    if residual_max >= FLAG_CLEAR_TOL:
        return False
    return None


def _decoupling_residual(alpha: ScalarField2D, u, v):
    """Residual of d(alpha_u u + alpha_v v)/d(u/v) = 0 in the (alpha, u/v) chart."""
    au = alpha.d_u(u, v)
    av = alpha.d_v(u, v)
    bu = 1.0 / v
    bv = -u / (v * v)
    det = au * bv - av * bu
    scale = np.abs(au * bv) + np.abs(av * bu)
    if np.any(np.abs(det) <= 1e-12 * np.maximum(scale, 1e-300)):
        raise ChartFailure("(alpha, u/v) change of variables is singular at a sample")
    du_db = -av / det
    dv_db = au / det
    Eu = alpha.d_uu(u, v) * u + alpha.d_u(u, v) + alpha.d_uv(u, v) * v
    Ev = alpha.d_uv(u, v) * u + alpha.d_vv(u, v) * v + alpha.d_v(u, v)
    return du_db * Eu + dv_db * Ev


def classify(f: TempleFlux, samples, alpha: Optional[ScalarField2D] = None) -> ClassificationReport:
    """Two-threshold structure classification over an array of (u, v) samples.

    samples: array-like of shape (n, 2).  The decoupling test runs in the
    (alpha, u/v) chart; when no chart is supplied, alpha = P itself is used
    (a valid Riemann-invariant chart wherever the change of variables is
    regular).  An explicitly supplied chart that degenerates at a sample
    raises ChartFailure; if the default chart degenerates (e.g. any
    P = P(u/v)) the decoupling flag is left indeterminate instead.  Raises
    DegenerateDirection if any sample has u = 0 or P_v = 0.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must have shape (n, 2)")
    u = pts[:, 0]
    v = pts[:, 1]
    if np.any(u == 0.0) or np.any(v == 0.0):
        raise DegenerateDirection("samples must avoid the axes u = 0 and v = 0")
    Pu = np.asarray(f.p_u(u, v), dtype=float)
    Pv = np.asarray(f.p_v(u, v), dtype=float)
    scale = np.maximum(1.0, np.abs(np.asarray(f.p(u, v))))
    if np.any(np.abs(Pv) <= DIRECTION_TOL * np.maximum(scale, np.abs(Pu))):
        raise DegenerateDirection("P_v = 0 at a sample: d2 undefined")

    res_equal = np.abs(u * Pu + v * Pv)
    ld1 = np.empty(len(u))
    for i in range(len(u)):
        ld1[i] = temple_eigen(f, u[i], v[i]).grad1_dot_d1
    res_ce = np.abs(ld1)
    res_ham = np.abs(v * Pv - u * Pu)
    chart = alpha if alpha is not None else ScalarField2D.from_flux(f)
    try:
        dec_max = float(np.max(np.abs(_decoupling_residual(chart, u, v))))
        dec_flag = _flag(dec_max)
    except ChartFailure:
        if alpha is not None:
            # the caller asked for this chart explicitly
            raise
        dec_max = float("nan")
        dec_flag = None

    residuals = {
        "equal_eigenvalues": float(np.max(res_equal)),
        "completely_exceptional": float(np.max(res_ce)),
        "hamiltonian": float(np.max(res_ham)),
        "decouples": dec_max,
    }
    return ClassificationReport(
        equal_eigenvalues=_flag(residuals["equal_eigenvalues"]),
        completely_exceptional=_flag(residuals["completely_exceptional"]),
        hamiltonian=_flag(residuals["hamiltonian"]),
        decouples=dec_flag,
        residuals=residuals,
        n_samples=len(u),
    )


# ---------------------------------------------------------------------------
# compatibility of a conservative pair with a level-set constraint


class CompatibilityResiduals(NamedTuple):
    g4: np.ndarray
    g5: float


def compatibility_residuals(A: ScalarField2D, B: ScalarField2D, phi: ScalarField2D,
                            u, v) -> CompatibilityResiduals:
    """Residuals of restricting u_t = [A]_x, v_t = [B]_x to a level set of phi.

    Along phi(u, v) = const the two equations reduce to a single transport
    equation; consistency requires

        g4 = B_u phi_v^2 + (A_u - B_v) phi_u phi_v - A_v phi_u^2 = 0

    pointwise, and the reduced speed k = A_u - A_v phi_u/phi_v must be
    constant on the level set; g5 is the variance of k over the samples.
    Raises DegenerateConstraint when phi_v vanishes at a sample.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    pu = np.asarray(phi.d_u(u, v), dtype=float)
    pv = np.asarray(phi.d_v(u, v), dtype=float)
    if np.any(np.abs(pv) <= 1e-14 * np.maximum(1.0, np.abs(pu))):
        raise DegenerateConstraint("phi_v = 0 at a sample: level set is not a v-graph")
    Au = np.asarray(A.d_u(u, v), dtype=float)
    Av = np.asarray(A.d_v(u, v), dtype=float)
    Bu = np.asarray(B.d_u(u, v), dtype=float)
    Bv = np.asarray(B.d_v(u, v), dtype=float)
    g4 = Bu * pv**2 + (Au - Bv) * pu * pv - Av * pu**2
    k = Au - Av * pu / pv
    g5 = float(np.var(np.atleast_1d(k)))
    return CompatibilityResiduals(g4 if g4.ndim else float(g4), g5)


@dataclass(frozen=True)
class FluxPair:
    """Conservative pair (A, B) compatible with every level set of phi."""

    A: ScalarField2D
    B: ScalarField2D
    phi: ScalarField2D


def construct_temple_flux(H: ProfileFunction, Phi: ProfileFunction, Psi: ProfileFunction,
                          phi: ScalarField2D, check_points=None) -> FluxPair:
    """Build the compatible pair A = H(phi) u + Phi(phi), B = H(phi) v + Psi(phi).

    The constructed pair satisfies the g4 compatibility residual identically;
    this is verified numerically at construction on a small lattice of states
    (or the provided check_points).  With Phi = Psi = 0 and H the flux
    coefficient seen through phi, the pair reduces to (P u, P v).
    """

    def make_field(extra: ProfileFunction, carrier: str) -> ScalarField2D:
        def value(u, v):
            w = u if carrier == "u" else v
            s = phi(u, v)
            return H(s) * w + extra(s)

        def d_u(u, v):
            w = u if carrier == "u" else v
            s = phi(u, v)
            base = H.deriv(s) * phi.d_u(u, v) * w + extra.deriv(s) * phi.d_u(u, v)
            return base + (H(s) if carrier == "u" else 0.0)

        def d_v(u, v):
            w = u if carrier == "u" else v
            s = phi(u, v)
            base = H.deriv(s) * phi.d_v(u, v) * w + extra.deriv(s) * phi.d_v(u, v)
            return base + (H(s) if carrier == "v" else 0.0)

        return ScalarField2D(f=value, fu=d_u, fv=d_v, name=f"H*{carrier}+{extra.name}")

    A = make_field(Phi, "u")
    B = make_field(Psi, "v")
    pair = FluxPair(A, B, phi)
    if check_points is None:
        g = np.linspace(0.6, 1.4, 5)
        uu, vv = np.meshgrid(g, g, indexing="ij")
        check_points = np.column_stack([uu.ravel(), vv.ravel()])
    pts = np.asarray(check_points, dtype=float)
    g4, _ = compatibility_residuals(A, B, phi, pts[:, 0], pts[:, 1])
    worst = float(np.max(np.abs(g4)))
    if worst > 1e-10:
        raise AssertionError(f"constructed pair failed its own compatibility check: {worst:.3e}")
    return pair


# ---------------------------------------------------------------------------
# diagonal (Riemann-invariant) form


@dataclass(frozen=True)
class DiagonalForm:
    """The system rewritten in the chart (alpha, u/v) with P = R(alpha).

    alpha rides at speed R'(alpha)(alpha_u u + alpha_v v) + R(alpha); the
    ratio u/v rides at speed R(alpha).
    """

    flux: TempleFlux
    alpha: ScalarField2D
    R: ProfileFunction

    def alpha_speed(self, u, v):
        a = self.alpha(u, v)
        stretch = self.alpha.d_u(u, v) * u + self.alpha.d_v(u, v) * v
        return self.R.deriv(a) * stretch + self.R(a)

    def ratio_speed(self, u, v):
        return self.R(self.alpha(u, v))


def diagonal_form(f: TempleFlux, alpha: ScalarField2D, R: ProfileFunction,
                  samples=None, rtol: float = 1e-10) -> DiagonalForm:
    """Validate P = R(alpha) on samples and return the diagonal-form bundle."""
    if samples is None:
        g = np.linspace(0.6, 1.4, 5)
        uu, vv = np.meshgrid(g, g, indexing="ij")
        samples = np.column_stack([uu.ravel(), vv.ravel()])
    pts = np.asarray(samples, dtype=float)
    u, v = pts[:, 0], pts[:, 1]
    P = np.asarray(f.p(u, v), dtype=float)
    Ra = np.asarray(R(alpha(u, v)), dtype=float)
    err = np.max(np.abs(P - Ra) / np.maximum(1.0, np.abs(P)))
    if err > rtol:
        raise ValueError(f"P != R(alpha) on samples (relative error {err:.3e})")
    return DiagonalForm(f, alpha, R)


def symmetry_coefficient_s2(s1: ProfileFunction, R: ProfileFunction, f: Callable,
                            alpha_grid, s2_init: float = 1.0,
                            substeps: int = 4) -> np.ndarray:
    """Second symmetry coefficient from the decoupled first one.

    Integrates  R'(alpha) (s2 - s1) + s2'(alpha) (f(alpha) - R(alpha)) = 0
    for s2(alpha) along alpha_grid with s2(alpha_grid[0]) = s2_init, by RK4.
    For the product chart (f - R = 2 alpha R') this is equivalent to
    s2 - s1 + 2 alpha s2' = 0.  Raises CoincidenceOfSpeeds when |f - R|
    drops below 1e-12 anywhere on the grid.
    """
    grid = np.asarray(alpha_grid, dtype=float)
    gap = np.abs(np.asarray(f(grid), dtype=float) - np.asarray(R(grid), dtype=float))
    if np.min(gap) < SPEED_GAP_TOL:
        raise CoincidenceOfSpeeds(
            f"|f - R| = {np.min(gap):.3e} on the grid; the s2 equation is singular"
        )

    def rhs(a, y):
        return np.array([float(R.deriv(a)) * (float(s1(a)) - y[0]) / (float(f(a)) - float(R(a)))])

    out = rk4_integrate(rhs, grid, [float(s2_init)], substeps=substeps)
    return out[:, 0]
