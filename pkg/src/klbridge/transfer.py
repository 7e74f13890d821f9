"""Bridge spectra from base spectra through the rank-one secular equation.

With ``mu_k = nu_k / pi`` the base frequencies and ``phi_k(1)`` the endpoint
values of the base eigenfunctions, the bridge frequencies are the roots of

    g(mu) = sum_k phi_k(1)^2 / (mu_k^p - mu^p),   p = 2H + 1,

one in each interval ``(mu_n, mu_{n+1})``. ``g`` increases between its poles, so
plain bisection on that bracket is safe.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import BracketError, DomainError, PoleError, SizeError, TruncationWarning
from .kernels import critical_q
from .kernels import evaluate as kernel_evaluate
from .oracle import TRANSFER, Spectrum, leading_sign
from .special import compute_constants

NONE = "none"
INTEGRAL_CORRECTION = "integral"

BRACKET_EPS = 1e-9
ROOT_WIDTH = 1e-12
POLE_TOL = 1e-12
# terms retained beyond the largest requested root
MARGIN = 50


@dataclass(frozen=True, eq=False)
class SecularFunction:
    """Truncated secular function g built from base-spectrum data.

    ``mu`` and ``phi1_sq`` are the first ``truncation`` base frequencies and squared
    endpoint values. ``gamma`` is the second-order frequency offset used by the
    tail estimate, ``lambda_scale`` converts frequencies back to eigenvalues.
    """

    mu: np.ndarray
    phi1_sq: np.ndarray
    exponent: float
    truncation: int
    tail_mode: str = INTEGRAL_CORRECTION
    gamma: float = 0.0
    lambda_scale: float = 1.0
    k11: float = 1.0
    _mu_p: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)[: self.truncation]
        w = np.asarray(self.phi1_sq, dtype=float)[: self.truncation]
        if len(mu) < self.truncation:
            raise SizeError(f"only {len(mu)} base terms for truncation {self.truncation}")
        if np.any(mu <= 0.0) or np.any(np.diff(mu) <= 0.0):
            raise DomainError("base frequencies must be positive and strictly increasing")
        if np.any(w < 0.0):
            raise DomainError("phi_k(1)^2 weights must be nonnegative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi1_sq", w)
        object.__setattr__(self, "_mu_p", mu**self.exponent)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_spectrum(cls, spectrum: Spectrum, truncation: Optional[int] = None,
                      tail_mode: str = INTEGRAL_CORRECTION, h=None) -> "SecularFunction":
        """Secular function of an oracle (or any) base spectrum of an fBm-type kernel."""
        h = spectrum.kernel.hurst if h is None else h
        c = compute_constants(h)
        k = len(spectrum) if truncation is None else int(truncation)
        k11 = spectrum.kernel.normalization if spectrum.kernel is not None else 1.0
        return cls(spectrum.frequencies(h)[:k], spectrum.value_at_one[:k] ** 2,
                   2.0 * c.h + 1.0, k, tail_mode, c.gamma, c.lambda_scale, k11)

    @classmethod
    def asymptotic(cls, h, truncation: int, tail_mode: str = INTEGRAL_CORRECTION) -> "SecularFunction":
        """Base data replaced by its leading asymptotics: mu_k = k + gamma_H, phi_k(1)^2 = 2H+1."""
        c = compute_constants(h)
        p = 2.0 * c.h + 1.0
        k = np.arange(1, truncation + 1)
        return cls(k + c.gamma, np.full(truncation, p), p, truncation, tail_mode, c.gamma, c.lambda_scale)

    @classmethod
    def brownian(cls, truncation: int, tail_mode: str = INTEGRAL_CORRECTION) -> "SecularFunction":
        """Exact Brownian data: mu_k = k - 1/2, phi_k(1)^2 = 2."""
        return cls.asymptotic(0.5, truncation, tail_mode)

    # -- evaluation -----------------------------------------------------------

    @property
    def tail_start(self) -> float:
        return self.truncation + 0.5

    def tail(self, mu_tilde: float) -> float:
        """Integral estimate of the omitted terms k > K.

        Euler-Maclaurin in midpoint form, with base data replaced by its leading
        asymptotics f(x) = p / ((x + gamma)^p - mu^p):
        ``sum_{k>K} f(k) ~ int_{K+1/2}^inf f(x) dx + f'(K+1/2) / 24``.
        """
        if self.tail_mode == NONE:
            return 0.0
        p = self.exponent
        a = self.tail_start
        if mu_tilde >= a + self.gamma:
            raise DomainError("mu_tilde beyond the retained terms; raise the truncation")
        mp = mu_tilde**p
        # x = 1/u maps [a, inf) onto (0, 1/a]; the u^(p-2) factor goes into the weight
        val, _ = integrate.quad(
            lambda u: p / ((1.0 + self.gamma * u) ** p - mp * u**p),
            0.0, 1.0 / a, weight="alg", wvar=(p - 2.0, 0.0), epsabs=1e-15, epsrel=1e-12,
        )
        xg = a + self.gamma
        d = xg**p - mp
        fprime = -p * p * xg ** (p - 1.0) / (d * d)
        return val + fprime / 24.0

    def terms(self, mu_tilde: float) -> np.ndarray:
        return self.phi1_sq / (self._mu_p - mu_tilde**self.exponent)

    def __call__(self, mu_tilde: float) -> float:
        return secular_eval(self, mu_tilde)

    def derivative(self, mu_tilde: float) -> float:
        p = self.exponent
        d = self._mu_p - mu_tilde**p
        return float(np.sum(self.phi1_sq * p * mu_tilde ** (p - 1.0) / (d * d)))

    def eigenvalue(self, mu_tilde):
        """lambda = scale / (pi mu)^p."""
        return self.lambda_scale / (math.pi * np.asarray(mu_tilde)) ** self.exponent

    def frequency(self, lam):
        return (self.lambda_scale / np.asarray(lam)) ** (1.0 / self.exponent) / math.pi


def secular_eval(sf: SecularFunction, mu_tilde: float) -> float:
    mu_tilde = float(mu_tilde)
    if not mu_tilde > 0.0:
        raise DomainError("mu_tilde must be positive")
    if np.min(np.abs(sf.mu - mu_tilde)) < POLE_TOL:
        raise PoleError(f"mu_tilde = {mu_tilde!r} sits on a pole")
    return float(np.sum(sf.terms(mu_tilde))) + sf.tail(mu_tilde)


def _bisect(fn, lo: float, hi: float, width: float, increasing: bool = True) -> float:
    flo, fhi = fn(lo), fn(hi)
    if not increasing:
        flo, fhi = -flo, -fhi
    if not (flo < 0.0 < fhi):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f = ({flo:.3e}, {fhi:.3e})")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if not increasing:
            fm = -fm
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bridge_root(sf: SecularFunction, n: int, margin: int = MARGIN) -> float:
    """The unique root of g in (mu_n, mu_{n+1}), by bisection."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > sf.truncation - margin:
        raise SizeError(f"root {n} needs at least {n + margin} retained terms, have {sf.truncation}")
    lo = sf.mu[n - 1] + BRACKET_EPS
    hi = sf.mu[n] - BRACKET_EPS
    return _bisect(lambda m: secular_eval(sf, m), lo, hi, ROOT_WIDTH)


def bridge_roots(sf: SecularFunction, n_max: int, margin: int = MARGIN) -> np.ndarray:
    return np.array([bridge_root(sf, n, margin) for n in range(1, n_max + 1)])


def transfer_spectrum(base: Spectrum, n_max: int, truncation: Optional[int] = None, h=None) -> Spectrum:
    """Bridge eigenvalues obtained from a base spectrum via the secular equation."""
    k = min(len(base), truncation or max(200, n_max + MARGIN))
    sf = SecularFunction.from_spectrum(base, k, h=h)
    mu = bridge_roots(sf, n_max)
    vals = sf.eigenvalue(mu)
    return Spectrum(vals, np.zeros(n_max), None, base.grid, None, TRANSFER)


# ---------------------------------------------------------------------------
# eigenfunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthesisCoefficients:
    c: float
    coeffs: np.ndarray


def synthesis_coefficients(base: Spectrum, lambda_tilde: float, truncation: Optional[int] = None):
    k = len(base) if truncation is None else min(int(truncation), len(base))
    lam = base.values[:k]
    if np.min(np.abs(lam - lambda_tilde)) <= POLE_TOL * lambda_tilde:
        raise PoleError("lambda_tilde coincides with a base eigenvalue")
    return lam / (lam - lambda_tilde) * base.value_at_one[:k]


def synthesize_bridge_eigenfunction(base: Spectrum, lambda_tilde: float, t_grid,
                                    truncation: Optional[int] = None, return_coefficients: bool = False):
    """Bridge eigenfunction for eigenvalue ``lambda_tilde`` as a series in the base eigenfunctions.

    ``phi(t) = c sum_k lambda_k / (lambda_k - lambda_tilde) phi_k(1) phi_k(t)``; the free
    constant ``c`` is fixed by unit L2 norm on the base grid and the sign convention
    of the oracle (nonnegative leading sample).
    """
    coeffs = synthesis_coefficients(base, lambda_tilde, truncation)
    k = len(coeffs)
    if base.fn_samples is None:
        raise DomainError("base spectrum carries no eigenfunction samples")
    on_grid = coeffs @ base.fn_samples[:k]
    norm = math.sqrt(base.grid.integrate(on_grid**2))
    last = abs(coeffs[-1]) / norm
    if last > 1e-6:
        warnings.warn(f"last retained term contributes {last:.2e} of the norm", TruncationWarning,
                      stacklevel=2)
    t_grid = np.asarray(t_grid, dtype=float)
    sign = leading_sign(on_grid)
    values = sign * (coeffs @ base.evaluate(t_grid, k)) / norm
    if return_coefficients:
        return values, SynthesisCoefficients(sign / norm, coeffs)
    return values


def synthesis_endpoint_tail(base: Spectrum, lambda_tilde: float, truncation: Optional[int] = None,
                            h=None) -> float:
    """Magnitude of the t = 1 value omitted by a ``truncation``-term synthesis.

    At t = 1 every term carries phi_k(1)^2, so the omitted part of the series is
    ``sum_{k>K} lambda_k phi_k(1)^2 / (lambda_k - lambda~) = -(scale/pi^p) g_tail / lambda~``
    times the normalization factor.
    """
    k = len(base) if truncation is None else min(int(truncation), len(base))
    sf = SecularFunction.from_spectrum(base, k, h=h)
    coeffs = synthesis_coefficients(base, lambda_tilde, k)
    norm = math.sqrt(base.grid.integrate((coeffs @ base.fn_samples[:k]) ** 2))
    scale = sf.lambda_scale / math.pi**sf.exponent
    return abs(scale * sf.tail(float(sf.frequency(lambda_tilde))) / lambda_tilde) / norm


def synthesis_truncation_bound(base: Spectrum, lambda_tilde: float, truncation: Optional[int] = None) -> float:
    """Rigorous bound on ``|phi~(1)|`` for a ``truncation``-term synthesis.

    Past the truncation every omitted t = 1 term ``lambda_k phi_k(1)^2 / (lambda~ - lambda_k)``
    has one sign, and Mercer gives ``sum_{k>K} lambda_k phi_k(1)^2 = K(1,1) - sum_{k<=K}``.
    """
    k = len(base) if truncation is None else min(int(truncation), len(base))
    if k >= len(base):
        raise SizeError("the bound needs at least one base eigenvalue past the truncation")
    lam = base.values
    if not lambda_tilde > lam[k]:
        raise DomainError("lambda_tilde must exceed the first omitted base eigenvalue")
    mass = float(kernel_evaluate(base.kernel, 1.0, 1.0)) - math.fsum(lam[:k] * base.value_at_one[:k] ** 2)
    coeffs = synthesis_coefficients(base, lambda_tilde, k)
    norm = math.sqrt(base.grid.integrate((coeffs @ base.fn_samples[:k]) ** 2))
    return max(mass, 0.0) / (lambda_tilde - lam[k]) / norm


# ---------------------------------------------------------------------------
# general rank-one perturbation K + q K(.,1) K(.,1)
# ---------------------------------------------------------------------------


def _rank_one_tail(sf: SecularFunction, lam: float) -> float:
    """Tail of sum_k lambda_k^2 phi_k(1)^2 / (lambda_k - lam), k > K.

    Uses lambda_k^2/(lambda_k - lam) = lambda_k + lam lambda_k/(lambda_k - lam); the
    second piece equals -(scale/pi^p) times the tail of g.
    """
    if sf.tail_mode == NONE:
        return 0.0
    p = sf.exponent
    c = sf.lambda_scale / math.pi**p
    a = sf.tail_start + sf.gamma
    trace_tail = c * p * a ** (1.0 - p) / (p - 1.0)
    return trace_tail - c * sf.tail(float(sf.frequency(lam)))


def rank_one_secular(base, q: float, lambda_query: float, truncation: Optional[int] = None,
                     tail_mode: str = NONE) -> float:
    """``F_q(lambda) = 1 + q sum_k lambda_k^2 phi_k(1)^2 / (lambda_k - lambda)``.

    ``base`` is a :class:`Spectrum` or a prepared :class:`SecularFunction`.
    """
    sf = base if isinstance(base, SecularFunction) else SecularFunction.from_spectrum(base, truncation, tail_mode)
    lam_k = sf.eigenvalue(sf.mu)
    if np.min(np.abs(lam_k - lambda_query)) <= POLE_TOL * lambda_query:
        raise PoleError("lambda coincides with a base eigenvalue")
    total = float(np.sum(lam_k**2 * sf.phi1_sq / (lam_k - lambda_query)))
    if sf.tail_mode != NONE:
        total += _rank_one_tail(sf, lambda_query)
    return 1.0 + q * total


def rank_one_root(sf: SecularFunction, q: float, n: int, margin: int = MARGIN) -> float:
    """n-th eigenvalue (decreasing order) of K + q K(.,1)K(.,1); returned as frequency mu.

    For q < 0 it interlaces as mu_n < mu < mu_{n+1}; for q > 0 as mu_{n-1} < mu < mu_n
    (with mu_0 = 0).
    """
    if q == 0.0:
        return float(sf.mu[n - 1])
    if q < -1.0 / sf.k11 * (1.0 + 1e-12):
        raise DomainError("q below the critical value -1/K(1,1)")
    if n > sf.truncation - margin:
        raise SizeError(f"root {n} needs at least {n + margin} retained terms")
    lam_k = sf.eigenvalue(sf.mu)
    if q < 0.0:
        lo_l, hi_l = lam_k[n], lam_k[n - 1]
    else:
        # top eigenvalue is at most lambda_1 + q ||K(., 1)||^2
        hi_l = lam_k[n - 2] if n >= 2 else 2.0 * (lam_k[0] + q * float(np.sum(lam_k**2 * sf.phi1_sq)))
        lo_l = lam_k[n - 1]
    lo_l *= 1.0 + BRACKET_EPS
    hi_l *= 1.0 - BRACKET_EPS
    # F is monotone in lambda with the sign of q; bisect in log(lambda)
    def f(log_l):
        return rank_one_secular(sf, q, math.exp(log_l))

    root = _bisect(f, math.log(lo_l), math.log(hi_l), 1e-14, increasing=q > 0)
    return float(sf.frequency(math.exp(root)))


def rank_one_critical(kernel) -> float:
    return critical_q(kernel)
