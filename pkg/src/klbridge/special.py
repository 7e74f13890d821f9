"""Gamma function, principal-branch powers and the Hurst-derived spectral constants."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

def gamma_function(x: float) -> float:
    """Gamma function for real ``x > 0`` (stdlib ``math.gamma``, accurate to a few ulp)."""
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"gamma_function needs a finite x > 0, got {x!r}")
    return math.gamma(x)


def principal_power(modulus: float, phase: float, exponent: float) -> complex:
    """``(modulus * e^{i phase}) ** exponent`` on the principal branch, phase in (-pi, pi]."""
    if not modulus > 0.0:
        raise DomainError(f"modulus must be positive, got {modulus!r}")
    if not -math.pi < phase <= math.pi:
        raise DomainError(f"phase must lie in (-pi, pi], got {phase!r}")
    return modulus**exponent * cmath.exp(1j * exponent * phase)


@dataclass(frozen=True)
class Hurst:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not 0.0 < v < 1.0:
            raise DomainError(f"Hurst exponent must lie in (0, 1), got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def exponent(self) -> float:
        """The eigenvalue decay exponent 2H+1."""
        return 2.0 * self.value + 1.0

    def __float__(self):
        return self.value


def as_hurst(h) -> Hurst:
    return h if isinstance(h, Hurst) else Hurst(h)


@dataclass(frozen=True)
class SpectralConstants:
    """Constants entering the second-order spectral asymptotics.

    ``gamma`` and ``gamma_bridge`` are the phase offsets of the base and bridge
    frequencies in units of pi, ``eta`` the eigenfunction phase in units of pi.
    """

    h: float
    ell: float
    gamma: float
    eta: float
    gamma_bridge: float
    lambda_scale: float

    @property
    def shift(self) -> float:
        """gamma_bridge - gamma, the bridge/base frequency shift in units of pi."""
        return self.gamma_bridge - self.gamma


@lru_cache(maxsize=256)
def _constants(h: float) -> SpectralConstants:
    a = h + 0.5
    ell = math.sin(0.5 * math.pi * (h - 0.5) / a) / math.sin(0.5 * math.pi / a)
    # arcsin(ell / sqrt(1 + ell^2)) == atan(ell), better conditioned near ell = 0
    theta = math.atan(ell)
    gamma = -0.5 + (1.0 - 2.0 * h) / 4.0 + theta / math.pi
    eta = (2.0 * h - 1.0) / 8.0 - theta / math.pi
    gamma_bridge = (1.0 - 2.0 * h) / 4.0 + 2.0 * theta / math.pi
    scale = math.sin(math.pi * h) * gamma_function(2.0 * h + 1.0)
    return SpectralConstants(h, ell, gamma, eta, gamma_bridge, scale)


def compute_constants(h) -> SpectralConstants:
    return _constants(as_hurst(h).value)
