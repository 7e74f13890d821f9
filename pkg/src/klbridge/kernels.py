"""Covariance kernels on [0,1]^2: fBm, Brownian motion, bridges and rank-one perturbations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateKernelError, DomainError
from .special import Hurst, as_hurst

FBM = "fbm"
BROWNIAN = "brownian"
BRIDGE_OF = "bridge"
RANK_ONE = "rank_one"
KINDS = (FBM, BROWNIAN, BRIDGE_OF, RANK_ONE)


@dataclass(frozen=True)
class KernelSpec:
    """An immutable covariance kernel description.

    Composite kinds (``bridge``, ``rank_one``) hold their base kernel by value and
    nest freely, e.g. the bridge of a rank-one perturbation. A bridge has K(1,1) = 0,
    so it cannot itself serve as the base of another bridge. ``normalization`` is K(1,1) of the base
    (of the kernel itself for the elementary kinds).
    """

    kind: str
    h: Optional[Hurst] = None
    base: Optional["KernelSpec"] = None
    q: Optional[float] = None
    normalization: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if self.kind == FBM:
            if self.h is None:
                raise DomainError("fbm kernel needs a Hurst exponent")
            object.__setattr__(self, "h", as_hurst(self.h))
        if self.kind in (BRIDGE_OF, RANK_ONE):
            if self.base is None:
                raise DomainError(f"{self.kind} kernel needs a base kernel")
            norm = float(self.base.evaluate(1.0, 1.0))
            if norm == 0.0:
                raise DegenerateKernelError("base kernel has K(1,1) = 0")
        else:
            norm = float(self.evaluate(1.0, 1.0))
        if self.kind == RANK_ONE:
            if self.q is None:
                raise DomainError("rank_one kernel needs q")
            object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "normalization", norm)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def fbm(cls, h) -> "KernelSpec":
        return cls(FBM, h=as_hurst(h))

    @classmethod
    def brownian(cls) -> "KernelSpec":
        return cls(BROWNIAN)

    @classmethod
    def bridge_of(cls, base: "KernelSpec") -> "KernelSpec":
        return cls(BRIDGE_OF, base=base)

    @classmethod
    def rank_one(cls, base: "KernelSpec", q: float) -> "KernelSpec":
        return cls(RANK_ONE, base=base, q=q)

    # -- properties -----------------------------------------------------------

    @property
    def hurst(self) -> Hurst:
        """Hurst exponent of the underlying elementary kernel (1/2 for Brownian)."""
        if self.kind == FBM:
            return self.h
        if self.kind == BROWNIAN:
            return Hurst(0.5)
        return self.base.hurst

    @property
    def is_bridge(self) -> bool:
        if self.kind == BRIDGE_OF:
            return True
        return self.kind == RANK_ONE and self.q == critical_q(self.base)

    def evaluate(self, s, t):
        return evaluate(self, s, t)

    def __call__(self, s, t):
        return evaluate(self, s, t)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == FBM:
            d["h"] = self.h.value
        if self.kind == RANK_ONE:
            d["q"] = self.q
        if self.base is not None:
            d["base"] = self.base.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        kind = d.get("kind")
        base = cls.from_dict(d["base"]) if d.get("base") is not None else None
        h = d.get("h")
        return cls(kind, h=None if h is None else Hurst(h), base=base, q=d.get("q"))


def _check_unit(x, name):
    arr = np.asarray(x, dtype=float)
    if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr))):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _eval(spec: KernelSpec, s, t):
    if spec.kind == FBM:
        two_h = 2.0 * spec.h.value
        return 0.5 * (t**two_h + s**two_h - np.abs(t - s) ** two_h)
    if spec.kind == BROWNIAN:
        return np.minimum(s, t)
    base = spec.base
    ks = _eval(base, s, 1.0)
    kt = _eval(base, t, 1.0)
    if spec.kind == BRIDGE_OF or spec.q == -1.0 / spec.normalization:
        inv = 1.0 / spec.normalization
        val = _eval(base, s, t) - (ks * kt) * inv
        # the conditioning pins the kernel to exact zero on the edge s = 1 or t = 1
        return np.where((s == 1.0) | (t == 1.0), 0.0, val)
    return _eval(base, s, t) + spec.q * (ks * kt)


def evaluate(spec: KernelSpec, s, t):
    """Evaluate the kernel at ``(s, t)``; numpy arrays broadcast."""
    s = _check_unit(s, "s")
    t = _check_unit(t, "t")
    out = _eval(spec, s, t)
    return float(out) if np.ndim(out) == 0 else out


def critical_q(spec: KernelSpec) -> float:
    """The critical rank-one strength Q* = -1/K(1,1).

    Accepts anything with an ``evaluate(s, t)`` method.
    """
    k11 = float(spec.evaluate(1.0, 1.0))
    if k11 == 0.0 or math.isnan(k11):
        raise DegenerateKernelError("K(1,1) = 0, critical Q undefined")
    return -1.0 / k11


def _row_integral(spec: KernelSpec, t):
    if spec.kind == FBM:
        p = 2.0 * spec.h.value + 1.0
        return 0.5 * (t ** (p - 1.0) + (1.0 - t**p - (1.0 - t) ** p) / p)
    if spec.kind == BROWNIAN:
        return t - 0.5 * t * t
    base = spec.base
    r_one = _row_integral(base, 1.0)
    kt = _eval(base, t, 1.0)
    if spec.kind == BRIDGE_OF or spec.q == -1.0 / spec.normalization:
        return _row_integral(base, t) - kt * (r_one / spec.normalization)
    return _row_integral(base, t) + spec.q * r_one * kt


def row_integral(spec: KernelSpec, t):
    """Closed-form ``int_0^1 K(s, t) ds`` (used by the singularity-subtracted oracle)."""
    t = _check_unit(t, "t")
    out = _row_integral(spec, t)
    return float(out) if np.ndim(out) == 0 else out
