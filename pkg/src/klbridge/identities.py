"""Numerical checks of the closed-form series and integral identities behind the asymptotics.

Each check returns the two sides (or a residual) so callers can choose a tolerance;
``run_identity_suite`` bundles them with the default tolerances for the CLI.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DomainError, PoleError
from .quadrature import _quad, algebraic_halfline
from .special import as_hurst, compute_constants

TANGENT_TOL = 1e-6
ELL_TOL = 1e-8
DEFAULT_H_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
POLE_DISTANCE = 1e-9


def check_tangent_series(mu_tilde: float, K: int = 1000):
    """Partial sum of ``sum_k 1/((k-1/2)^2 - mu^2)`` with an integral tail, against
    ``pi tan(pi mu) / (2 mu)``."""
    mu = float(mu_tilde)
    if K < 1000:
        raise DomainError(f"K must be >= 1000, got {K}")
    if mu <= 0.0:
        raise DomainError("mu_tilde must be positive")
    if abs((mu + 0.5) - round(mu + 0.5)) < POLE_DISTANCE:
        raise PoleError(f"mu_tilde={mu} sits on a pole k - 1/2")
    if mu >= K:
        raise DomainError("K must exceed mu_tilde")
    k = np.arange(1, K + 1, dtype=float) - 0.5
    head = math.fsum(1.0 / ((k - mu) * (k + mu)))
    # midpoint Euler-Maclaurin: sum_{k>K} f(k-1/2) = int_K^inf f + f'(K)/24 + O(K^-5)
    tail = math.log((K + mu) / (K - mu)) / (2.0 * mu) - (2.0 * K / (K * K - mu * mu) ** 2) / 24.0
    lhs = head + tail
    rhs = math.pi / (2.0 * mu) * math.tan(math.pi * mu)
    return lhs, rhs


def _inv_denominator(p: float, tau: float) -> complex:
    if tau == 0.0:
        return -1.0 + 0.0j
    return 1.0 / (tau**p * cmath.exp(0.5j * math.pi * p) - 1.0)


def check_ell_integral(h):
    """``Re{(1/i) int_0^inf dtau / ((i tau)^(2H+1) - 1)}`` against ``pi ell_H / (2H+1)``."""
    c = compute_constants(h)
    p = 2.0 * c.h + 1.0
    if c.h == 0.5:
        # (i tau)^2 - 1 is real, so the integrand vanishes identically
        lhs = 0.0
    else:
        lhs = algebraic_halfline(lambda s: _inv_denominator(p, s).imag, p)
    rhs = math.pi * c.ell / p
    return lhs, rhs


def _remainder(h: float, mu: float) -> float:
    """Re R for the exponential remainder of the cotangent integral at frequency ``mu``.

    With ``E = exp(-2 pi (tau mu + i gamma))`` the remainder is
    ``(1/i) int 2E/(1-E) / ((i tau)^p - 1) dtau``; rescaled by tau = s / mu.
    """
    c = compute_constants(h)
    p = 2.0 * c.h + 1.0
    rot = cmath.exp(-2j * math.pi * c.gamma)

    def integrand(s):
        e = math.exp(-2.0 * math.pi * s) * rot
        val = -1j * 2.0 * e / (1.0 - e) * _inv_denominator(p, s / mu)
        return val.real

    # exp(-2 pi s) < 1e-20 past s = 7.5
    return _quad(integrand, 0.0, 7.5, epsabs=1e-15, epsrel=1e-12, limit=200) / mu


def check_perturbed_equation(h, n: int) -> float:
    """Residual of the cotangent form of the model secular equation at ``n + gamma~_H``.

    The residual is ``ctg(pi(mu - gamma)) + ell + (p/pi) Re R(mu)``; the first two
    terms cancel at ``mu = n + gamma~`` so it equals the exponential remainder, O(1/n).
    """
    if n < 5:
        raise DomainError(f"n must be >= 5, got {n}")
    c = compute_constants(h)
    if c.h == 0.5:
        return 0.0
    mu = n + c.gamma_bridge
    p = 2.0 * c.h + 1.0
    cot = 1.0 / math.tan(math.pi * (mu - c.gamma))
    return cot + c.ell + p / math.pi * _remainder(c.h, mu)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    lhs: float
    rhs: float
    tol: float
    mode: str = "abs"  # "abs": |lhs - rhs| <= tol; "decay": lhs <= rhs + tol

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        if self.mode == "decay":
            return bool(self.lhs <= self.rhs + self.tol)
        return bool(self.diff <= self.tol)


def tangent_points(count: int = 20, seed: int = 2024) -> np.ndarray:
    """Reproducible points in (0, 10) at least 0.05 away from the poles k - 1/2."""
    rng = np.random.default_rng(seed)
    pts: List[float] = []
    while len(pts) < count:
        x = float(rng.uniform(0.0, 10.0))
        if x > 0.05 and abs((x + 0.5) - round(x + 0.5)) > 0.05:
            pts.append(x)
    return np.array(pts)


def run_identity_suite(h_values: Sequence[float] = DEFAULT_H_GRID, tol_scale: float = 1.0,
                       n_small: int = 10, n_large: int = 40) -> List[IdentityResult]:
    """All identity checks at the given Hurst values.

    The perturbed-equation row compares ``|residual(n_large)|`` (lhs) with
    ``|residual(n_small)|`` (rhs) and passes when the former is not larger.
    ``tol_scale`` multiplies the tolerances; a negative value forces every row to fail.
    """
    out: List[IdentityResult] = []
    for mu in tangent_points():
        lhs, rhs = check_tangent_series(mu, 1000)
        out.append(IdentityResult(f"tangent_series(mu={mu:.6f})", lhs, rhs, TANGENT_TOL * tol_scale))
    for h in h_values:
        hv = as_hurst(h).value
        lhs, rhs = check_ell_integral(hv)
        out.append(IdentityResult(f"ell_integral(H={hv:g})", lhs, rhs, ELL_TOL * tol_scale))
        r_large = abs(check_perturbed_equation(hv, n_large))
        r_small = abs(check_perturbed_equation(hv, n_small))
        slack = 0.0 if tol_scale >= 0 else -1.0
        out.append(IdentityResult(f"perturbed_equation_decay(H={hv:g},n={n_small}->{n_large})",
                                  r_large, r_small, slack, mode="decay"))
    return out
