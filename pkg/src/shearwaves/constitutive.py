"""Constitutive inputs: shear modulus functions and 2x2 flux families.

The modulus Q acts on the squared strain magnitude s = U^2 + V^2; the flux
P(u, v) multiplies both components of the reduced 2x2 system.  Both carry
optional analytic derivatives with central-difference fallbacks
(step 1e-6 * max(1, |arg|)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NoBracket, NoConvergence, NonPositiveModulus
from .profiles import _fd_step

LEVEL_SET_TOL = 1e-12
LEVEL_SET_MAX_ITER = 100


@dataclass(frozen=True)
class ShearModulus:
    """Shear modulus Q(s), s = squared strain magnitude, with density rho.

    mu0 = Q(0) and mu1 = Q'(0) are derived at construction; Q' falls back to
    central differences when dq is not supplied.
    """

    q: Callable
    dq: Optional[Callable] = None
    rho: float = 1.0
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")

    def dq_eval(self, s):
        if self.dq is not None:
            return self.dq(np.asarray(s, dtype=float)) if np.ndim(s) else float(self.dq(s))
        s = np.asarray(s, dtype=float)
        h = _fd_step(s)
        out = (self.q(s + h) - self.q(s - h)) / (2.0 * h)
        return out if out.ndim else float(out)

    @property
    def mu0(self) -> float:
        return float(self.q(0.0))

    @property
    def mu1(self) -> float:
        return float(self.dq_eval(0.0))

    def qtilde(self, s):
        """Q(s)/rho, the squared slow wave speed."""
        return eval_Q(self, s) / self.rho

    def dqtilde(self, s):
        return self.dq_eval(s) / self.rho


def eval_Q(m: ShearModulus, s):
    """Evaluate Q(s) for s >= 0; raise NonPositiveModulus if Q <= 0 anywhere."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("squared strain magnitude must be non-negative")
    out = np.asarray(m.q(s), dtype=float)
    if np.any(out <= 0.0):
        bad = s.flat[int(np.argmax(np.asarray(out <= 0.0)))] if out.ndim else float(s)
        raise NonPositiveModulus(f"Q({bad!r}) <= 0 for modulus {m.name!r}")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TempleFlux:
    """Flux coefficient P(u, v) of the reduced system u_t = [P u]_x, v_t = [P v]_x.

    First (and optionally second) partial derivatives may be supplied; missing
    ones fall back to central differences.
    """

    p: Callable
    pu: Optional[Callable] = None
    pv: Optional[Callable] = None
    puu: Optional[Callable] = None
    puv: Optional[Callable] = None
    pvv: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, u, v):
        return self.p(u, v)

    def p_u(self, u, v):
        if self.pu is not None:
            return self.pu(u, v)
        h = _fd_step(u)
        return (self.p(u + h, v) - self.p(u - h, v)) / (2.0 * h)

    def p_v(self, u, v):
        if self.pv is not None:
            return self.pv(u, v)
        h = _fd_step(v)
        return (self.p(u, v + h) - self.p(u, v - h)) / (2.0 * h)

    def _second_step(self, w):
        return 1e-4 * np.maximum(1.0, np.abs(w))

    def p_uu(self, u, v):
        if self.puu is not None:
            return self.puu(u, v)
        if self.pu is not None:
            h = _fd_step(u)
            return (self.pu(u + h, v) - self.pu(u - h, v)) / (2.0 * h)
        h = self._second_step(u)
        return (self.p(u + h, v) - 2.0 * self.p(u, v) + self.p(u - h, v)) / (h * h)

    def p_vv(self, u, v):
        if self.pvv is not None:
            return self.pvv(u, v)
        if self.pv is not None:
            h = _fd_step(v)
            return (self.pv(u, v + h) - self.pv(u, v - h)) / (2.0 * h)
        h = self._second_step(v)
        return (self.p(u, v + h) - 2.0 * self.p(u, v) + self.p(u, v - h)) / (h * h)

    def p_uv(self, u, v):
        if self.puv is not None:
            return self.puv(u, v)
        if self.pu is not None:
            h = _fd_step(v)
            return (self.pu(u, v + h) - self.pu(u, v - h)) / (2.0 * h)
        if self.pv is not None:
            h = _fd_step(u)
            return (self.pv(u + h, v) - self.pv(u - h, v)) / (2.0 * h)
        hu = self._second_step(u)
        hv = self._second_step(v)
        return (
            self.p(u + hu, v + hv)
            - self.p(u + hu, v - hv)
            - self.p(u - hu, v + hv)
            + self.p(u - hu, v - hv)
        ) / (4.0 * hu * hv)


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Weak-nonlinearity coefficient beta with its derivation record."""

    beta: float
    mu0: Optional[float] = None
    mu1: Optional[float] = None
    rho: Optional[float] = None
    convention: str = "speed"

    @classmethod
    def from_moduli(cls, mu0, mu1, rho, convention: str = "speed"):
        return cls(
            beta=beta_from_moduli(mu0, mu1, rho, convention),
            mu0=float(mu0),
            mu1=float(mu1),
            rho=float(rho),
            convention=convention,
        )


def beta_from_moduli(mu0: float, mu1: float, rho: float, convention: str = "speed") -> float:
    """Nonlinearity coefficient from the leading moduli.

    With c1 = mu1/rho the coefficient is beta = c1 / (2 c0^2).  Under the
    default "speed" convention the background speed is c0 = sqrt(mu0/rho),
    giving beta = mu1 / (2 mu0).  The alternative "squared" convention takes
    c0 = mu0/rho itself, giving beta = mu1 * rho / (2 mu0^2).
    """
    mu0, mu1, rho = float(mu0), float(mu1), float(rho)
    if mu0 <= 0.0 or rho <= 0.0:
        raise ValueError("mu0 and rho must be positive")
    c1 = mu1 / rho
    if convention == "speed":
        c0sq = mu0 / rho
    elif convention == "squared":
        c0sq = (mu0 / rho) ** 2
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return c1 / (2.0 * c0sq)


def solve_level_set(f: TempleFlux, a: float, u: float, v_bracket) -> float:
    """Solve P(u, v) = a for v inside v_bracket.

    Bisection-safeguarded Newton: the bracket must enclose a sign change of
    P(u, .) - a (else NoBracket); Newton steps that leave the bracket or stall
    are replaced by bisection.  Converged when |P(u, v) - a| <= 1e-12 *
    max(1, |a|) within 100 iterations (else NoConvergence).
    """
    lo, hi = float(v_bracket[0]), float(v_bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    a = float(a)
    u = float(u)
    tol = LEVEL_SET_TOL * max(1.0, abs(a))

    def g(v):
        return float(f.p(u, v)) - a

    glo, ghi = g(lo), g(hi)
    if abs(glo) <= tol:
        return lo
    if abs(ghi) <= tol:
        return hi
    if glo * ghi > 0.0:
        raise NoBracket(
            f"P(u,.)-a has no sign change on [{lo}, {hi}] (values {glo:.3e}, {ghi:.3e})"
        )

    v = 0.5 * (lo + hi)
    for _ in range(LEVEL_SET_MAX_ITER):
        gv = g(v)
        if abs(gv) <= tol:
            return v
        if gv * glo < 0.0:
            hi = v
        else:
            lo, glo = v, gv
        dg = float(f.p_v(u, v))
        if dg != 0.0 and np.isfinite(dg):
            v_new = v - gv / dg
            v = v_new if lo < v_new < hi else 0.5 * (lo + hi)
        else:
            v = 0.5 * (lo + hi)
    raise NoConvergence(f"level-set solve did not reach {tol:.1e} in {LEVEL_SET_MAX_ITER} iterations")


# ---------------------------------------------------------------------------
# builtin modulus families


def mooney_rivlin(mu: float, rho: float = 1.0) -> ShearModulus:
    """Constant modulus Q(s) = mu: linear shear response."""
    mu = float(mu)
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return ShearModulus(
        q=lambda s: mu * np.ones_like(np.asarray(s, dtype=float)),
        dq=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        rho=rho,
        name="mooney_rivlin",
        params={"mu": mu},
    )


def cubic_modulus(mu0: float, mu1: float, rho: float = 1.0) -> ShearModulus:
    """Q(s) = mu0 + mu1*s, the leading two-term (cubic-stress) law."""
    mu0, mu1 = float(mu0), float(mu1)
    return ShearModulus(
        q=lambda s: mu0 + mu1 * np.asarray(s, dtype=float),
        dq=lambda s: mu1 * np.ones_like(np.asarray(s, dtype=float)),
        rho=rho,
        name="cubic",
        params={"mu0": mu0, "mu1": mu1},
    )


def power_modulus(mu: float, n: float, rho: float = 1.0) -> ShearModulus:
    """Q(s) = mu * (1 + s)**n, positive at rest with Q'(0) = mu*n."""
    mu, n = float(mu), float(n)
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    return ShearModulus(
        q=lambda s: mu * (1.0 + np.asarray(s, dtype=float)) ** n,
        dq=lambda s: mu * n * (1.0 + np.asarray(s, dtype=float)) ** (n - 1.0),
        rho=rho,
        name="power",
        params={"mu": mu, "n": n},
    )


def poly_modulus(coeffs, rho: float = 1.0) -> ShearModulus:
    """Q(s) = sum_k coeffs[k] * s**k."""
    c = np.asarray(coeffs, dtype=float)
    dc = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.array([0.0])
    pv = np.polynomial.polynomial.polyval
    return ShearModulus(
        q=lambda s: pv(s, c),
        dq=lambda s: pv(s, dc),
        rho=rho,
        name="poly",
        params={"coeffs": [float(x) for x in c]},
    )


MODULUS_BUILTINS = {
    "mooney_rivlin": lambda cfg: mooney_rivlin(cfg["mu"], cfg.get("rho", 1.0)),
    "cubic": lambda cfg: cubic_modulus(cfg["mu0"], cfg["mu1"], cfg.get("rho", 1.0)),
    "power": lambda cfg: power_modulus(cfg["mu"], cfg["n"], cfg.get("rho", 1.0)),
    "poly": lambda cfg: poly_modulus(cfg["coeffs"], cfg.get("rho", 1.0)),
}


def modulus_from_config(cfg: dict) -> ShearModulus:
    kind = cfg.get("kind")
    if kind not in MODULUS_BUILTINS:
        raise KeyError(f"unknown modulus kind: {kind!r}")
    return MODULUS_BUILTINS[kind](cfg)


# ---------------------------------------------------------------------------
# builtin flux families


def product_flux() -> TempleFlux:
    """P(u, v) = u*v."""
    z = lambda u, v: np.zeros(np.broadcast(u, v).shape) if np.ndim(u) or np.ndim(v) else 0.0
    one = lambda u, v: np.ones(np.broadcast(u, v).shape) if np.ndim(u) or np.ndim(v) else 1.0
    return TempleFlux(
        p=lambda u, v: u * v,
        pu=lambda u, v: v + 0.0 * u,
        pv=lambda u, v: u + 0.0 * v,
        puu=z,
        puv=one,
        pvv=z,
        name="product",
    )


def ratio_flux() -> TempleFlux:
    """P(u, v) = u/v."""
    return TempleFlux(
        p=lambda u, v: u / v,
        pu=lambda u, v: 1.0 / v + 0.0 * u,
        pv=lambda u, v: -u / v**2,
        puu=lambda u, v: 0.0 * u * v,
        puv=lambda u, v: -1.0 / v**2 + 0.0 * u,
        pvv=lambda u, v: 2.0 * u / v**3,
        name="ratio",
    )


def poly_flux(coeffs) -> TempleFlux:
    """P(u, v) = sum_{i,j} coeffs[i][j] * u**i * v**j."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 2:
        raise ValueError("coeffs must be a 2D array [i][j] -> u**i v**j")
    pv2 = np.polynomial.polynomial.polyval2d
    cu = np.zeros_like(c)
    if c.shape[0] > 1:
        cu[:-1, :] = c[1:, :] * np.arange(1, c.shape[0])[:, None]
    cv = np.zeros_like(c)
    if c.shape[1] > 1:
        cv[:, :-1] = c[:, 1:] * np.arange(1, c.shape[1])[None, :]
    cuu = np.zeros_like(c)
    if c.shape[0] > 1:
        cuu[:-1, :] = cu[1:, :] * np.arange(1, c.shape[0])[:, None]
    cvv = np.zeros_like(c)
    if c.shape[1] > 1:
        cvv[:, :-1] = cv[:, 1:] * np.arange(1, c.shape[1])[None, :]
    cuv = np.zeros_like(c)
    if c.shape[1] > 1:
        cuv[:, :-1] = cu[:, 1:] * np.arange(1, c.shape[1])[None, :]
    return TempleFlux(
        p=lambda u, v: pv2(u, v, c),
        pu=lambda u, v: pv2(u, v, cu),
        pv=lambda u, v: pv2(u, v, cv),
        puu=lambda u, v: pv2(u, v, cuu),
        puv=lambda u, v: pv2(u, v, cuv),
        pvv=lambda u, v: pv2(u, v, cvv),
        name="poly",
        params={"coeffs": [[float(x) for x in row] for row in c]},
    )


def sum_squares_flux(scale: float = 1.0) -> TempleFlux:
    """P(u, v) = scale * (u**2 + v**2), the weakly nonlinear flux."""
    return poly_flux([[0.0, 0.0, scale], [0.0, 0.0, 0.0], [scale, 0.0, 0.0]])


def modulus_flux(m: ShearModulus) -> TempleFlux:
    """P(u, v) = Q(u^2 + v^2)/rho, the full-system coefficient seen as a flux."""
    return TempleFlux(
        p=lambda u, v: m.qtilde(u * u + v * v),
        pu=lambda u, v: 2.0 * u * m.dqtilde(u * u + v * v),
        pv=lambda u, v: 2.0 * v * m.dqtilde(u * u + v * v),
        name="modulus",
        params={"modulus": m.name, **m.params},
    )


FLUX_BUILTINS = {
    "product": lambda cfg: product_flux(),
    "ratio": lambda cfg: ratio_flux(),
    "poly": lambda cfg: poly_flux(cfg["coeffs"]),
    "sum_squares": lambda cfg: sum_squares_flux(cfg.get("scale", 1.0)),
    "modulus": lambda cfg: modulus_flux(modulus_from_config(cfg["modulus"])),
}


def flux_from_config(cfg: dict) -> TempleFlux:
    kind = cfg.get("kind")
    if kind not in FLUX_BUILTINS:
        raise KeyError(f"unknown flux kind: {kind!r}")
    return FLUX_BUILTINS[kind](cfg)
