"""Closed-form large-n spectrum of fractional Brownian motion.

Eigenvalues ``lambda_n = scale / nu_n^(2H+1)`` with ``nu_n = pi n + pi gamma_H``;
eigenfunctions ``sqrt(2) sin(nu_n t + pi eta_H)`` plus boundary-layer integrals
of the profiles ``f0``, ``f1``. The profiles are not available in closed form
here; they default to zero and can be supplied as tabulated data.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from .quadrature import integral_halfline
from .special import as_hurst, compute_constants


def _zero(u):
    return 0.0 * np.asarray(u, dtype=float)


def _phi2(x: np.ndarray) -> np.ndarray:
    """(1 - e^-x (1 + x)) / x^2, with a series for small x."""
    small = x < 1e-2
    xs = np.where(small, 1.0, x)
    direct = (-np.expm1(-xs) - xs * np.exp(-xs)) / (xs * xs)
    series = 0.5 - x / 3.0 + x * x / 8.0 - x**3 / 30.0 + x**4 / 144.0
    return np.where(small, series, direct)


def piecewise_linear_layer(u, v, rate: float) -> float:
    """Exact ``int_0^inf f(u) exp(-rate u) du`` for the linear interpolant of (u, v), zero past u[-1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u[0] > 0.0:
        u, v = np.concatenate(([0.0], u)), np.concatenate(([v[0]], v))
    h = np.diff(u)
    fa, fb = v[:-1], v[1:]
    if rate == 0.0:
        return float(np.sum(0.5 * h * (fa + fb)))
    x = rate * h
    safe = np.where(x > 0.0, x, 1.0)
    phi1 = np.where(x > 0.0, -np.expm1(-safe) / safe, 1.0)
    seg = np.exp(-rate * u[:-1]) * h * (fa * phi1 + (fb - fa) * _phi2(x))
    return float(np.sum(seg))


@dataclass(frozen=True)
class BoundaryLayerProfile:
    f0: Callable = _zero
    f1: Callable = _zero
    provided: bool = False
    cutoff: float = math.inf
    tables: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = None

    @classmethod
    def empty(cls) -> "BoundaryLayerProfile":
        return cls()

    @classmethod
    def from_tables(cls, u0, v0, u1, v1) -> "BoundaryLayerProfile":
        """Piecewise-linear profiles through the given nodes, zero beyond the last node."""
        u0, v0, u1, v1 = (np.asarray(a, dtype=float) for a in (u0, v0, u1, v1))

        def interp(u_nodes, v_nodes):
            def fn(u):
                return np.interp(u, u_nodes, v_nodes, left=v_nodes[0], right=0.0)
            return fn

        cutoff = float(max(u0[-1], u1[-1]))
        return cls(interp(u0, v0), interp(u1, v1), True, cutoff, (u0, v0, u1, v1))

    @classmethod
    def from_csv(cls, f0_path, f1_path) -> "BoundaryLayerProfile":
        """Load each profile from a two-column CSV ``u,value`` (header optional)."""
        def read(path):
            us, vs = [], []
            with open(path, newline="") as fh:
                for row in csv.reader(fh):
                    if not row or row[0].strip().startswith("#"):
                        continue
                    try:
                        u, v = float(row[0]), float(row[1])
                    except ValueError:
                        continue  # header
                    us.append(u)
                    vs.append(v)
            order = np.argsort(us)
            return np.asarray(us)[order], np.asarray(vs)[order]

        u0, v0 = read(f0_path)
        u1, v1 = read(f1_path)
        return cls.from_tables(u0, v0, u1, v1)

    def layer(self, which: str, rate: float) -> float:
        """``int_0^inf f(u) exp(-rate u) du`` for ``which`` in {"f0", "f1"}; 0 when absent."""
        if not self.provided:
            return 0.0
        if self.tables is not None:
            u0, v0, u1, v1 = self.tables
            return piecewise_linear_layer(u0, v0, rate) if which == "f0" else piecewise_linear_layer(u1, v1, rate)
        fn = self.f0 if which == "f0" else self.f1
        if rate == 0.0:
            # undamped endpoint value; the profiles are integrable
            upper = self.cutoff if math.isfinite(self.cutoff) else np.inf
            return float(integrate.quad(lambda u: float(fn(u)), 0.0, upper, limit=400)[0])
        return integral_halfline(lambda u: float(fn(u)), rate, cutoff=self.cutoff)


@dataclass(frozen=True)
class AsymptoticEigenvalue:
    n: int
    nu: float
    lambda_: float

    @property
    def mu(self) -> float:
        return self.nu / math.pi


def base_frequency(h, n):
    """nu_n = pi (n + gamma_H); accepts array ``n``."""
    c = compute_constants(h)
    return math.pi * (np.asarray(n, dtype=float) + c.gamma)


def base_eigenvalue(h, n: int) -> AsymptoticEigenvalue:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = compute_constants(h)
    nu = math.pi * (n + c.gamma)
    return AsymptoticEigenvalue(n, nu, c.lambda_scale / nu ** (2.0 * c.h + 1.0))


def base_eigenvalues(h, n_max: int) -> np.ndarray:
    c = compute_constants(h)
    nu = base_frequency(h, np.arange(1, n_max + 1))
    return c.lambda_scale / nu ** (2.0 * c.h + 1.0)


def base_eigenfunction(h, n: int, t, profile: Optional[BoundaryLayerProfile] = None):
    """Asymptotic base eigenfunction at ``t`` (scalar or array), not renormalized."""
    c = compute_constants(h)
    nu = math.pi * (n + c.gamma)
    t_arr = np.asarray(t, dtype=float)
    out = math.sqrt(2.0) * np.sin(nu * t_arr + math.pi * c.eta)
    if profile is not None and profile.provided:
        sign = -1.0 if n % 2 else 1.0
        layer = np.vectorize(
            lambda tt: profile.layer("f0", nu * tt) + sign * profile.layer("f1", nu * (1.0 - tt))
        )
        out = out + layer(t_arr)
    return float(out) if out.ndim == 0 else out


def base_value_at_one(h, n: int) -> float:
    """Leading term of phi_n(1): (-1)^n sqrt(2H+1)."""
    hv = as_hurst(h).value
    return (-1.0) ** n * math.sqrt(2.0 * hv + 1.0)
