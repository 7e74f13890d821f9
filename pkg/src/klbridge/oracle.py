"""Brute-force reference spectra: Nystrom discretization of the covariance operator.

The integral eigenproblem on [0,1] is replaced by the symmetric matrix
``A_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)`` on a quadrature grid. Eigenvectors are
mapped back to function samples by dividing by ``sqrt(w_i)``, and eigenfunctions
are evaluated off-grid with the Nystrom extension.

Two schemes are available. ``plain`` is the matrix above. ``subtracted`` (the
default) applies singularity subtraction,

    int K(s,t) phi(s) ds = int K(s,t) (phi(s) - phi(t)) ds + phi(t) int K(s,t) ds,

with the last integral in closed form. This only adds the diagonal
``D_i = r(x_i) - sum_j w_j K(x_i, x_j)`` to the symmetric matrix and removes the
O(h^2) error caused by the kink of K on the diagonal. The matrix trace is then no
longer ``sum_i w_i K(x_i, x_i)``, so trace checks use ``plain``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError, SizeError
from .kernels import KernelSpec, evaluate, row_integral
from .special import compute_constants

GAUSS_LEGENDRE = "gauss_legendre"
COMPOSITE_MIDPOINT = "midpoint"
RULES = (GAUSS_LEGENDRE, COMPOSITE_MIDPOINT)

PLAIN = "plain"
SUBTRACTED = "subtracted"
SCHEMES = (PLAIN, SUBTRACTED)

ORACLE = "oracle"
ASYMPTOTIC = "asymptotic"
TRANSFER = "transfer"

# relative floor under which computed eigenvalues are discarded as rounding noise
EIG_FLOOR = 1e-13
# |phi(1)| below this is treated as zero when fixing signs
SIGN_AT_ONE_MIN = 1e-6


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray
    rule_kind: str

    def __len__(self):
        return len(self.nodes)

    def __hash__(self):
        return hash((self.rule_kind, len(self.nodes), self.nodes.tobytes()))

    def __eq__(self, other):
        return (
            isinstance(other, QuadratureGrid)
            and self.rule_kind == other.rule_kind
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def build_grid(n_nodes: int, rule_kind: str = GAUSS_LEGENDRE) -> QuadratureGrid:
    """Quadrature rule on [0,1] with ``n_nodes`` interior nodes."""
    n_nodes = int(n_nodes)
    if n_nodes < 2:
        raise SizeError(f"need at least 2 nodes, got {n_nodes}")
    if rule_kind == GAUSS_LEGENDRE:
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    elif rule_kind == COMPOSITE_MIDPOINT:
        nodes = (np.arange(n_nodes) + 0.5) / n_nodes
        weights = np.full(n_nodes, 1.0 / n_nodes)
    else:
        raise DomainError(f"unknown quadrature rule {rule_kind!r}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureGrid(nodes, weights, rule_kind)


# ---------------------------------------------------------------------------
# dense symmetric eigensolver
# ---------------------------------------------------------------------------


def _round_robin(n: int):
    """Tournament schedule: n-1 rounds of n/2 disjoint index pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 60):
    """Cyclic Jacobi eigen-decomposition of a real symmetric matrix.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint pairs so that one round is a handful of vectorized updates.
    Iterates until the off-diagonal Frobenius norm drops below ``tol * ||A||_F``.

    Returns ``(values, vectors)`` with ascending values, like ``numpy.linalg.eigh``.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise SizeError("jacobi_eigh needs a square matrix")
    if not np.array_equal(a, a.T):
        a = 0.5 * (a + a.T)
    m = n + (n % 2)
    if m != n:
        # pad with an isolated zero row/column, removed at the end
        a = np.pad(a, ((0, 1), (0, 1)))
    v = np.eye(m)
    total = np.linalg.norm(a)
    if total == 0.0:
        return np.zeros(n), np.eye(n)
    target = tol * total
    rounds = _round_robin(m)
    for _ in range(max_sweeps):
        # direct sum; ||A||^2 - sum(diag^2) cancels down to sqrt(eps) ||A||
        off = math.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off < target:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            with np.errstate(over="ignore", divide="ignore"):
                # a huge theta means a negligible pivot: t -> 0 is the right limit
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(a)[:n]
    vecs = v[:n, :n]
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def symmetric_eigh(a, solver: str = "lapack"):
    if solver == "lapack":
        return np.linalg.eigh(a)
    if solver == "jacobi":
        return jacobi_eigh(a)
    raise DomainError(f"unknown eigensolver {solver!r}")


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenPair:
    index: int
    value: float
    fn_samples: Optional[np.ndarray]
    value_at_one: float
    method_tag: str = ORACLE


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ordered eigenpairs of one kernel on one grid.

    Stored column-wise for speed: ``values[i]`` and ``fn_samples[i]`` belong to
    eigenpair ``i + 1``. ``fn_samples`` may be ``None`` for closed-form spectra.
    """

    values: np.ndarray
    value_at_one: np.ndarray
    fn_samples: Optional[np.ndarray]
    grid: Optional[QuadratureGrid]
    kernel: Optional[KernelSpec]
    method_tag: str = ORACLE
    scheme: str = SUBTRACTED

    def __len__(self):
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, len(self.values) + 1)

    @property
    def pairs(self) -> list:
        samples = self.fn_samples
        return [
            EigenPair(
                i + 1,
                float(self.values[i]),
                None if samples is None else samples[i],
                float(self.value_at_one[i]),
                self.method_tag,
            )
            for i in range(len(self.values))
        ]

    def __getitem__(self, n: int) -> EigenPair:
        """The eigenpair with 1-based index ``n``."""
        i = n - 1
        if not 0 <= i < len(self.values):
            raise IndexError(n)
        samples = None if self.fn_samples is None else self.fn_samples[i]
        return EigenPair(n, float(self.values[i]), samples, float(self.value_at_one[i]), self.method_tag)

    def frequencies(self, h=None) -> np.ndarray:
        """mu_k = nu_k / pi, inverting lambda = scale / (pi mu)^(2H+1)."""
        h = self.kernel.hurst if h is None else h
        c = compute_constants(h)
        p = 2.0 * c.h + 1.0
        return (c.lambda_scale / self.values) ** (1.0 / p) / math.pi

    @cached_property
    def _weighted_samples(self):
        return self.fn_samples * self.grid.weights

    def evaluate(self, t, count: Optional[int] = None) -> np.ndarray:
        """Nystrom-extended eigenfunctions at points ``t``: shape (count, len(t))."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise DomainError("t must lie in [0, 1]")
        count = len(self.values) if count is None else int(count)
        kmat = evaluate(self.kernel, t[:, None], self.grid.nodes[None, :])
        proj = self._weighted_samples[:count] @ kmat.T
        return proj / _extension_denominator(self.kernel, self.grid, self.scheme, t, self.values[:count])


def leading_sign(samples) -> float:
    """Sign of the first sample that is not negligible (+1 for an all-zero row)."""
    row = np.asarray(samples)
    nz = np.flatnonzero(np.abs(row) > 1e-8 * np.max(np.abs(row)))
    return -1.0 if nz.size and row[nz[0]] < 0.0 else 1.0


def _fix_signs(phi, at_one):
    n_pairs = phi.shape[0]
    idx = np.arange(1, n_pairs + 1)
    flip = np.zeros(n_pairs, dtype=bool)
    big = np.abs(at_one) > SIGN_AT_ONE_MIN
    parity = np.where(idx % 2 == 0, 1.0, -1.0)
    flip[big] = at_one[big] * parity[big] < 0.0
    for i in np.flatnonzero(~big):
        flip[i] = leading_sign(phi[i]) < 0.0
    sign = np.where(flip, -1.0, 1.0)
    return phi * sign[:, None], at_one * sign


def _extension_denominator(kernel, grid, scheme, t, values):
    """Denominator of the Nystrom extension; ``lambda`` for the plain scheme."""
    if scheme == PLAIN:
        return values[:, None]
    kmat = evaluate(kernel, np.atleast_1d(t)[:, None], grid.nodes[None, :])
    shift = row_integral(kernel, np.atleast_1d(t)) - kmat @ grid.weights
    return values[:, None] - shift[None, :]


def solve_spectrum(
    kernel: KernelSpec,
    grid: QuadratureGrid,
    n_eigs: Optional[int] = None,
    solver: str = "lapack",
    scheme: str = SUBTRACTED,
) -> Spectrum:
    """Top ``n_eigs`` eigenpairs of ``kernel`` by Nystrom discretization on ``grid``.

    Eigenfunction samples are L2-normalized under the grid weights. Signs follow
    ``phi_n(1) * (-1)^n >= 0``, or a nonnegative leading sample when ``phi_n(1)``
    vanishes (bridges). ``solver`` selects LAPACK (default) or the Jacobi routine.
    """
    n = len(grid)
    n_eigs = n if n_eigs is None else int(n_eigs)
    if not 1 <= n_eigs <= n:
        raise SizeError(f"n_eigs must lie in [1, {n}], got {n_eigs}")
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}")
    x, w = grid.nodes, grid.weights
    sw = np.sqrt(w)
    kmat = evaluate(kernel, x[:, None], x[None, :])
    a = sw[:, None] * kmat * sw[None, :]
    if scheme == SUBTRACTED:
        a[np.diag_indices(n)] += row_integral(kernel, x) - kmat @ w
    vals, vecs = symmetric_eigh(a, solver)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    keep = vals > EIG_FLOOR * vals[0]
    keep[n_eigs:] = False
    vals, vecs = vals[keep], vecs[:, keep]
    phi = (vecs / sw[:, None]).T
    k_one = evaluate(kernel, 1.0, x)
    at_one = (phi * (w * k_one)).sum(axis=1) / _extension_denominator(kernel, grid, scheme, 1.0, vals)[:, 0]
    phi, at_one = _fix_signs(phi, at_one)
    return Spectrum(vals, at_one, phi, grid, kernel, ORACLE, scheme)


def eigenfunction_at(pair: EigenPair, kernel: KernelSpec, grid: QuadratureGrid, t, scheme: str = SUBTRACTED):
    """Nystrom extension of a grid eigenfunction to arbitrary ``t``.

    Plain scheme: ``phi(t) = (1/lambda) sum_j w_j K(t, x_j) phi(x_j)``. The
    subtracted scheme replaces ``lambda`` by ``lambda - D(t)`` so that the extension
    interpolates the grid samples exactly.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise DomainError("t must lie in [0, 1]")
    flat = np.atleast_1d(t_arr).ravel()
    kvals = evaluate(kernel, flat[:, None], grid.nodes[None, :])
    denom = _extension_denominator(kernel, grid, scheme, flat, np.array([pair.value]))[0]
    out = ((kvals @ (grid.weights * pair.fn_samples)) / denom).reshape(t_arr.shape)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=40)
def cached_spectrum(
    kernel: KernelSpec, n_nodes: int, rule_kind: str = GAUSS_LEGENDRE, scheme: str = SUBTRACTED
) -> Spectrum:
    """Memoized full oracle spectrum; repeated calls with equal inputs share one solve."""
    return solve_spectrum(kernel, build_grid(n_nodes, rule_kind), scheme=scheme)
