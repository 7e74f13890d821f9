"""Half-line quadrature helpers: damped profile integrals and oscillatory Fourier-type integrals."""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError

_GL_ORDER = 32
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def gauss_panels(fn, edges) -> np.ndarray:
    """Fixed-order Gauss-Legendre sums of ``fn`` over consecutive ``[edges[i], edges[i+1]]``.

    ``fn`` must accept a 2-D array.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    s = a + half * (_GL_X[None, :] + 1.0)
    return (half[:, 0] * (fn(s) @ _GL_W)).real


def _quad(fn, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(fn, a, b, **kw)[0]
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"adaptive quadrature failed on [{a}, {b}]: {exc}") from exc


def integral_halfline(profile_fn, rate: float, rel_tol: float = 1e-8, cutoff: float = math.inf) -> float:
    """``int_0^inf profile(u) exp(-rate u) du`` by adaptive quadrature.

    ``cutoff`` bounds the support of ``profile`` when it is known to vanish beyond it.
    """
    if not rate > 0.0:
        raise DomainError(f"rate must be positive, got {rate!r}")
    if profile_fn is None:
        return 0.0

    def integrand(u):
        return profile_fn(u) * math.exp(-rate * u)

    # beyond 60/rate the damping factor is below 1e-26
    upper = min(cutoff, 60.0 / rate)
    if upper <= 1.0 or 1.0 / rate <= 1.0:
        knee = min(upper, 1.0 / rate)
        total = _quad(integrand, 0.0, knee, epsrel=rel_tol, epsabs=1e-15, limit=200)
        if upper > knee:
            total += _quad(integrand, knee, upper, epsrel=rel_tol, epsabs=1e-15, limit=400)
        return total
    # weak damping: the profile's algebraic decay dominates, so map u -> 1/v past u = 1
    total = _quad(integrand, 0.0, 1.0, epsrel=rel_tol, epsabs=1e-15, limit=200)
    total += _quad(lambda v: integrand(1.0 / v) / (v * v), 1.0 / upper, 1.0,
                   epsrel=rel_tol, epsabs=1e-15, limit=400)
    return total


def algebraic_halfline(fn, exponent: float, rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> float:
    """``int_0^inf fn(s) ds`` for integrands decaying like ``s^-exponent`` (exponent > 1).

    Splits at 1 and maps the tail by s -> 1/s, giving
    ``int_0^1 fn(1/u) u^-2 du`` which is bounded near 0 up to an algebraic factor.
    """
    head = _quad(fn, 0.0, 1.0, epsrel=rel_tol, epsabs=abs_tol, limit=400)
    tail = _quad(lambda u: fn(1.0 / u) / (u * u) if u > 0.0 else 0.0, 0.0, 1.0,
                 epsrel=rel_tol, epsabs=abs_tol, limit=400)
    return head + tail


def _iterated_average(partial_sums: np.ndarray, depth: int) -> float:
    s = np.array(partial_sums, dtype=float)
    for _ in range(depth):
        if len(s) < 2:
            break
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[-1])


def oscillatory_halfline(amp_fn, period_edges_step: float, tol: float = 1e-10,
                         n_panels: int = 40, max_panels: int = 2560) -> float:
    """``int_0^inf amp_fn(s) ds`` for an integrand whose sign alternates on panels of
    width ``period_edges_step``.

    Panels between consecutive zeros are integrated with a fixed Gauss rule (the
    first one on a geometrically graded partition, to resolve any behavior near 0).
    The alternating partial sums are accelerated by repeated averaging
    (Euler / van Wijngaarden). The panel count doubles until two estimates agree.
    """
    step = float(period_edges_step)
    first = step
    grade = first * 2.0 ** -np.arange(0, 60)[::-1]
    grade = grade[grade > 1e-9 * min(first, 1.0)]
    head = float(gauss_panels(amp_fn, np.concatenate(([0.0], grade))).sum())

    previous = None
    count = n_panels
    while count <= max_panels:
        edges = step * np.arange(1, count + 2)
        panels = gauss_panels(amp_fn, edges)
        partial = head + np.cumsum(panels)
        depth = min(count // 2, 30)
        est = _iterated_average(partial, depth)
        check = _iterated_average(partial[:-4], depth)
        if abs(est - check) <= tol * max(1.0, abs(est)):
            return est
        if previous is not None and abs(est - previous) <= tol * max(1.0, abs(est)):
            return est
        previous = est
        count *= 2
    raise ConvergenceError("oscillatory panel sums did not stabilize")
