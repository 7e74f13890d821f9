"""Closed-form large-n spectrum of the fractional Brownian bridge.

Frequencies ``nu_n = pi n + pi gamma~_H`` and eigenfunctions built from the
shifted oscillation plus boundary-layer integrals. Near t = 1 the layer involves
two explicit kernels::

    f1~(u) = (2H+1)/pi * sqrt(2) * Re{ exp(-i pi (eta + gamma)) / ((iu)^(2H+1) - 1) }
    g1~(x) = (2H+1)/pi * Im{ int_0^inf exp(-isx) / ((is)^(2H+1) - 1) ds }
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate

from .base_asymptotics import AsymptoticEigenvalue, BoundaryLayerProfile
from .errors import DomainError
from .quadrature import algebraic_halfline, integral_halfline, oscillatory_halfline
from .special import SpectralConstants, as_hurst, compute_constants

__all__ = [
    "BridgeBoundaryKernel",
    "bridge_eigenvalue",
    "bridge_eigenvalues",
    "bridge_frequency",
    "f1_tilde",
    "g1_tilde",
    "integral_halfline",
    "bridge_eigenfunction",
]


def _denominator_inverse(h: float, s):
    """1 / ((is)^(2H+1) - 1) on the principal branch, s >= 0 (array)."""
    p = 2.0 * h + 1.0
    rot = cmath.exp(0.5j * math.pi * p)
    s = np.asarray(s, dtype=float)
    return 1.0 / (s**p * rot - 1.0)


@dataclass(frozen=True)
class BridgeBoundaryKernel:
    """Evaluator bundle for the bridge boundary-layer kernels at one Hurst exponent."""

    h: float
    constants: SpectralConstants
    tol: float = 1e-10
    max_panels: int = 2560

    @classmethod
    def for_hurst(cls, h, **kw) -> "BridgeBoundaryKernel":
        hv = as_hurst(h).value
        return cls(hv, compute_constants(hv), **kw)

    @property
    def exponent(self) -> float:
        return 2.0 * self.h + 1.0

    def f1(self, u):
        c = self.constants
        phase = cmath.exp(-1j * math.pi * (c.eta + c.gamma))
        out = self.exponent / math.pi * math.sqrt(2.0) * (phase * _denominator_inverse(self.h, u)).real
        return float(out) if np.ndim(out) == 0 else out

    def g1(self, x: float) -> float:
        x = float(x)
        if x < 0.0:
            raise DomainError("g1~ is defined for x >= 0")
        p = self.exponent
        if x == 0.0:
            val = algebraic_halfline(lambda s: float(_denominator_inverse(self.h, s).imag), p)
            return p / math.pi * val

        def amp(s):
            return (np.exp(-1j * s * x) * _denominator_inverse(self.h, s)).imag

        return p / math.pi * oscillatory_halfline(amp, math.pi / x, tol=self.tol, max_panels=self.max_panels)


@lru_cache(maxsize=64)
def _kernel(h: float) -> BridgeBoundaryKernel:
    return BridgeBoundaryKernel.for_hurst(h)


def f1_tilde(h, u):
    if np.any(np.asarray(u) <= 0.0):
        raise DomainError("f1~ needs u > 0")
    return _kernel(as_hurst(h).value).f1(u)


def g1_tilde(h, x: float) -> float:
    return _kernel(as_hurst(h).value).g1(x)


def bridge_frequency(h, n):
    c = compute_constants(h)
    return math.pi * (np.asarray(n, dtype=float) + c.gamma_bridge)


def bridge_eigenvalue(h, n: int) -> AsymptoticEigenvalue:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = compute_constants(h)
    nu = math.pi * (n + c.gamma_bridge)
    return AsymptoticEigenvalue(n, nu, c.lambda_scale / nu ** (2.0 * c.h + 1.0))


def bridge_eigenvalues(h, n_max: int) -> np.ndarray:
    c = compute_constants(h)
    nu = bridge_frequency(h, np.arange(1, n_max + 1))
    return c.lambda_scale / nu ** (2.0 * c.h + 1.0)


def _f1_tilde_layer(h: float, rate: float) -> float:
    """int_0^inf f1~(u) exp(-rate u) du; f1~ is bounded and decays algebraically."""
    k = _kernel(h)
    if rate == 0.0:
        return algebraic_halfline(lambda u: float(k.f1(u)), k.exponent)
    return integral_halfline(lambda u: float(k.f1(u)), rate)


def _g1_layer(h: float, rate: float, profile: BoundaryLayerProfile) -> float:
    """int_0^inf g1~(rate u) f1(u) du for a supplied profile."""
    k = _kernel(h)
    upper = profile.cutoff if math.isfinite(profile.cutoff) else np.inf
    val, _ = integrate.quad(lambda u: k.g1(rate * u) * float(profile.f1(u)), 0.0, upper, limit=200)
    return val


def bridge_eigenfunction(h, n: int, t, profile: Optional[BoundaryLayerProfile] = None):
    """Asymptotic bridge eigenfunction at ``t`` (scalar or array), not renormalized.

    The f1~ layer term does not involve the profiles and is always included; the
    remaining layer terms vanish when ``profile`` is absent.
    """
    hv = as_hurst(h).value
    c = compute_constants(hv)
    nu = math.pi * (n + c.gamma_bridge)
    sign = -1.0 if n % 2 else 1.0
    s_shift, c_shift = math.sin(math.pi * c.shift), math.cos(math.pi * c.shift)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise DomainError("t must lie in [0, 1]")
    osc = math.sqrt(2.0) * np.sin(nu * t_arr + math.pi * c.eta)
    have_profile = profile is not None and profile.provided

    def layer(tt):
        rate1 = nu * (1.0 - tt)
        out = 0.0
        out += sign * s_shift * _f1_tilde_layer(hv, rate1)
        if have_profile:
            out += profile.layer("f0", nu * tt)
            out += sign * c_shift * profile.layer("f1", rate1)
            out += sign * s_shift * _g1_layer(hv, rate1, profile)
        return out

    out = osc + np.vectorize(layer, otypes=[float])(t_arr)
    return float(out) if out.ndim == 0 else out
