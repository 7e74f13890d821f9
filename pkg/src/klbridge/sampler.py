"""Gaussian sample paths from a truncated Karhunen-Loeve expansion.

Each path owns an independent Philox stream keyed by ``(seed, path_index)``, so
any subset of paths can be regenerated alone and serial or chunked runs agree
bit for bit. Normals come from 53-bit uniforms through the inverse normal CDF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .errors import SizeError
from .kernels import evaluate as kernel_evaluate
from .oracle import Spectrum

_TWO53 = float(2**53)


@dataclass(frozen=True, eq=False)
class PathSample:
    t_grid: np.ndarray
    values: np.ndarray
    seed: int
    truncation: int
    source_spectrum_tag: str
    path_index: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.t_grid) != len(self.values):
            raise SizeError("values and t_grid differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite path values")


def standard_normals(seed: int, path_index: int, size: int) -> np.ndarray:
    """``size`` standard normals for one path, a pure function of its arguments."""
    if seed < 0 or path_index < 0:
        raise ValueError("seed and path index must be nonnegative")
    bits = np.random.Philox(key=[int(seed), int(path_index)]).random_raw(size)
    # top 53 bits, centered in their cell so 0 and 1 never occur
    u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO53
    return ndtri(u)


def spectrum_tag(spectrum: Spectrum) -> str:
    kind = spectrum.kernel.kind if spectrum.kernel is not None else "unknown"
    h = float(spectrum.kernel.hurst) if spectrum.kernel is not None else float("nan")
    return f"{spectrum.method_tag}:{kind}:H={h:g}:N={len(spectrum)}"


def sample_paths(spectrum: Spectrum, t_grid, M: int, n_paths: int, seed: int,
                 xi: Optional[np.ndarray] = None) -> List[PathSample]:
    """``n_paths`` paths ``sum_{n<=M} sqrt(lambda_n) xi_n phi_n(t)`` on ``t_grid``.

    ``xi`` (shape ``(n_paths, M)``) overrides the random coefficients; it exists for tests.
    """
    M, n_paths = int(M), int(n_paths)
    if M < 1 or M > len(spectrum):
        raise SizeError(f"M must lie in [1, {len(spectrum)}], got {M}")
    if n_paths < 1:
        raise SizeError("n_paths must be >= 1")
    t = np.asarray(t_grid, dtype=float)
    phi = spectrum.evaluate(t, M)
    if xi is None:
        xi = np.stack([standard_normals(seed, i, M) for i in range(n_paths)])
    else:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (n_paths, M):
            raise SizeError(f"xi must have shape {(n_paths, M)}, got {xi.shape}")
    values = (xi * np.sqrt(spectrum.values[:M])) @ phi
    tag = spectrum_tag(spectrum)
    return [PathSample(t, values[i], int(seed), M, tag, i) for i in range(n_paths)]


def path_matrix(paths: Sequence[PathSample]) -> np.ndarray:
    return np.stack([p.values for p in paths])


def empirical_covariance(paths: Sequence[PathSample], s_idx: int, t_idx: int) -> float:
    """Unbiased sample covariance of the path values at two grid indices."""
    if len(paths) < 2:
        raise SizeError("need at least two paths")
    x = path_matrix(paths)
    a, b = x[:, s_idx], x[:, t_idx]
    return float(np.sum((a - a.mean()) * (b - b.mean())) / (len(paths) - 1))


def covariance_stderr(paths: Sequence[PathSample], s_idx: int, t_idx: int) -> float:
    """Standard error of ``empirical_covariance`` from the spread of centered products."""
    x = path_matrix(paths)
    a, b = x[:, s_idx], x[:, t_idx]
    prod = (a - a.mean()) * (b - b.mean())
    return float(np.std(prod, ddof=1) / math.sqrt(len(paths)))


def truncation_bound(spectrum: Spectrum, M: int) -> float:
    """Bound on the omitted covariance ``sum_{n>M} lambda_n phi_n(s) phi_n(t)``.

    Uses the Mercer trace for the omitted mass and the largest grid sup-norm of
    the tail eigenfunctions that the grid resolves (the first quarter of the
    spectrum; beyond it discrete eigenvectors lose their shape), never below 2.
    """
    grid = spectrum.grid
    nodes = grid.nodes
    trace = grid.integrate(kernel_evaluate(spectrum.kernel, nodes, nodes))
    omitted = max(trace - float(np.sum(spectrum.values[:M])), 0.0)
    tail = spectrum.fn_samples[M:max(M, len(grid) // 4)]
    sup_sq = 2.0 if tail.size == 0 else max(2.0, float(np.max(tail**2)))
    return sup_sq * omitted
