"""Scalar profile functions with derivatives.

A ProfileFunction bundles a scalar callable with (optionally analytic)
first and second derivatives.  When an analytic derivative is missing it
falls back to central differences with step h = 1e-6 * max(1, |s|).

Builtin families: linear, sine, poly, const.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

FD_REL_STEP = 1e-6


def _fd_step(s):
    return FD_REL_STEP * np.maximum(1.0, np.abs(s))


@dataclass(frozen=True)
class ProfileFunction:
    """A scalar function s -> f(s) with first/second derivatives.

    Parameters
    ----------
    f : callable
        Vectorized scalar function.
    df, d2f : callable, optional
        Analytic derivatives.  Central differences are used when absent.
    name : str
        Short label used in manifests.
    """

    f: Callable
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        return self.f(np.asarray(s, dtype=float)) if np.ndim(s) else float(self.f(s))

    def deriv(self, s):
        if self.df is not None:
            return self.df(np.asarray(s, dtype=float)) if np.ndim(s) else float(self.df(s))
        s = np.asarray(s, dtype=float)
        h = _fd_step(s)
        out = (self.f(s + h) - self.f(s - h)) / (2.0 * h)
        return out if out.ndim else float(out)

    def deriv2(self, s):
        if self.d2f is not None:
            return self.d2f(np.asarray(s, dtype=float)) if np.ndim(s) else float(self.d2f(s))
        # difference the (possibly analytic) first derivative; a slightly larger
        # step keeps the noise floor acceptable when deriv is itself FD
        s = np.asarray(s, dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(s))
        out = (np.asarray(self.deriv(s + h)) - np.asarray(self.deriv(s - h))) / (2.0 * h)
        return out if out.ndim else float(out)


def linear_profile(k: float) -> ProfileFunction:
    """f(s) = k*s."""
    k = float(k)
    return ProfileFunction(
        f=lambda s: k * s,
        df=lambda s: k * np.ones_like(np.asarray(s, dtype=float)),
        d2f=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        name="linear",
        params={"k": k},
    )


def sine_profile(amp: float, freq: float, offset: float = 0.0) -> ProfileFunction:
    """f(s) = amp*sin(freq*s) + offset."""
    amp, freq, offset = float(amp), float(freq), float(offset)
    return ProfileFunction(
        f=lambda s: amp * np.sin(freq * s) + offset,
        df=lambda s: amp * freq * np.cos(freq * s),
        d2f=lambda s: -amp * freq * freq * np.sin(freq * s),
        name="sine",
        params={"amp": amp, "freq": freq, "offset": offset},
    )


def poly_profile(coeffs) -> ProfileFunction:
    """f(s) = sum_k coeffs[k] * s**k."""
    c = np.asarray(coeffs, dtype=float)
    dc = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.array([0.0])
    d2c = np.polynomial.polynomial.polyder(dc) if len(dc) > 1 else np.array([0.0])
    pv = np.polynomial.polynomial.polyval
    return ProfileFunction(
        f=lambda s: pv(s, c),
        df=lambda s: pv(s, dc),
        d2f=lambda s: pv(s, d2c),
        name="poly",
        params={"coeffs": [float(x) for x in c]},
    )


def const_profile(c: float) -> ProfileFunction:
    """f(s) = c."""
    c = float(c)
    return ProfileFunction(
        f=lambda s: c * np.ones_like(np.asarray(s, dtype=float)),
        df=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        d2f=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
        name="const",
        params={"c": c},
    )


PROFILE_BUILTINS = {
    "linear": lambda cfg: linear_profile(cfg["k"]),
    "sine": lambda cfg: sine_profile(cfg["amp"], cfg["freq"], cfg.get("offset", 0.0)),
    "poly": lambda cfg: poly_profile(cfg["coeffs"]),
    "const": lambda cfg: const_profile(cfg["c"]),
}


def profile_from_config(cfg: dict) -> ProfileFunction:
    kind = cfg.get("kind")
    if kind not in PROFILE_BUILTINS:
        raise KeyError(f"unknown profile kind: {kind!r}")
    return PROFILE_BUILTINS[kind](cfg)
