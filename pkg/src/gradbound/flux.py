"""Flux families A(Q) from radial potentials, and right-hand-side families.

Every flux here is the gradient of a radial potential F(|Q|), so the
derivative tensor dA/dQ at Q != 0 has exactly two distinct eigenvalues:

    F''(|Q|)          on the radial direction Q/|Q|,
    F'(|Q|) / |Q|     on its orthogonal complement,

which makes exact ellipticity windows (and hence stable explicit time steps)
cheap to evaluate.  The right-hand sides all satisfy the pointwise growth
bound |f^i| <= c1 |grad u|^w + c2 with their declared constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "FluxKind",
    "FluxSpec",
    "RhsKind",
    "RhsSpec",
    "flux_eval",
    "flux_jacobian_bounds",
    "rhs_eval",
    "DELTA_U",
]

DELTA_U = 1e-8  # floor on |u| when normalizing the alignment direction u/|u|


class FluxKind(enum.Enum):
    PURE_P_LAPLACE = "pure_p_laplace"
    DOUBLE_POWER = "double_power"
    REGULARIZED_P_LAPLACE = "regularized_p_laplace"


@dataclass(frozen=True)
class FluxSpec:
    """Parameters of one flux family.

    pure_p_laplace:          A(Q) = |Q|^(p-2) Q
    double_power:            A(Q) = (|Q|^(p-2) + |Q|^(q-2)) Q
    regularized_p_laplace:   A(Q) = (eps^2 + |Q|^2)^((p-2)/2) Q
    """

    kind: FluxKind
    p: float
    q: float | None = None
    eps: float = 0.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"need p > 1, got {self.p}")
        if self.kind is FluxKind.DOUBLE_POWER:
            # q >= p keeps the family well defined; the theorem window q < p+1
            # is a regime condition, enforced where regimes are checked
            if self.q is None or not self.q >= self.p:
                raise ValueError(f"double_power needs q >= p, got q={self.q}")
        elif self.q is not None and self.q != self.p:
            raise ValueError(f"{self.kind.value} has no q parameter (q={self.q})")
        if self.kind is FluxKind.REGULARIZED_P_LAPLACE:
            if self.eps < 0.0:
                raise ValueError(f"eps must be nonnegative, got {self.eps}")
            if self.p < 2.0 and not self.eps > 0.0:
                raise ValueError("regularized flux with p < 2 requires eps > 0")
        elif self.eps != 0.0:
            raise ValueError(f"{self.kind.value} takes no eps (eps={self.eps})")


def _magnitude(Q: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(Q * Q, axis=(-2, -1)))


def _check_singular(kind: FluxKind, p: float, mag: np.ndarray) -> None:
    if p < 2.0 and np.any(mag == 0.0):
        raise ValueError(
            f"{kind.value} with p = {p} < 2 is singular at Q = 0; "
            "use regularized_p_laplace with eps > 0"
        )


def flux_eval(spec: FluxSpec, Q: np.ndarray, mag: np.ndarray | None = None) -> np.ndarray:
    """Evaluate A(Q) on samples of shape (..., N, n).

    mag, when given, must be the precomputed Frobenius magnitude of Q.
    """
    Q = np.asarray(Q, dtype=np.float64)
    if mag is None:
        mag = _magnitude(Q)
    if spec.kind is FluxKind.PURE_P_LAPLACE:
        _check_singular(spec.kind, spec.p, mag)
        coeff = mag ** (spec.p - 2.0)
    elif spec.kind is FluxKind.DOUBLE_POWER:
        _check_singular(spec.kind, spec.p, mag)
        coeff = mag ** (spec.p - 2.0) + mag ** (spec.q - 2.0)
    elif spec.kind is FluxKind.REGULARIZED_P_LAPLACE:
        coeff = (spec.eps**2 + mag**2) ** ((spec.p - 2.0) / 2.0)
    else:  # pragma: no cover
        raise ValueError(f"unknown flux kind {spec.kind}")
    return coeff[..., None, None] * Q


def _eigen_pair(spec: FluxSpec, mag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Radial eigenvalue F''(t) and tangential eigenvalue F'(t)/t at t = |Q|."""
    t = mag
    if spec.kind is FluxKind.PURE_P_LAPLACE:
        _check_singular(spec.kind, spec.p, t)
        radial = (spec.p - 1.0) * t ** (spec.p - 2.0)
        tangential = t ** (spec.p - 2.0)
    elif spec.kind is FluxKind.DOUBLE_POWER:
        _check_singular(spec.kind, spec.p, t)
        radial = (spec.p - 1.0) * t ** (spec.p - 2.0) + (spec.q - 1.0) * t ** (spec.q - 2.0)
        tangential = t ** (spec.p - 2.0) + t ** (spec.q - 2.0)
    elif spec.kind is FluxKind.REGULARIZED_P_LAPLACE:
        base = spec.eps**2 + t**2
        radial = base ** ((spec.p - 4.0) / 2.0) * (spec.eps**2 + (spec.p - 1.0) * t**2)
        tangential = base ** ((spec.p - 2.0) / 2.0)
    else:  # pragma: no cover
        raise ValueError(f"unknown flux kind {spec.kind}")
    return radial, tangential


def flux_jacobian_bounds(spec: FluxSpec, Q: np.ndarray,
                         mag: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact min and max Rayleigh quotients of dA/dQ at each sample.

    These are min/max of the two eigenvalues F''(|Q|) and F'(|Q|)/|Q|.
    """
    if mag is None:
        mag = _magnitude(np.asarray(Q, dtype=np.float64))
    radial, tangential = _eigen_pair(spec, mag)
    return np.minimum(radial, tangential), np.maximum(radial, tangential)


# --- right-hand sides ---------------------------------------------------------


class RhsKind(enum.Enum):
    ZERO = "zero"
    POWER_ALIGNED = "power_aligned"
    POWER_FIXED_DIR = "power_fixed_dir"
    STRUWE_COUPLING = "struwe_coupling"
    MANUFACTURED = "manufactured"


@dataclass(frozen=True, eq=False)
class RhsSpec:
    """Right-hand-side family with declared growth constants (w, c1, c2).

    zero:             f = 0
    power_aligned:    f^i = c1 |grad u|^w u^i / max(|u|, delta_u) + c2
    power_fixed_dir:  f = (c1 |grad u|^w + c2) d,  |d| = 1
    struwe_coupling:  f^i = u^i |grad u|^2
    manufactured:     f = source(x, t), a space-time table
    """

    kind: RhsKind
    w: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    direction: tuple[float, ...] | None = None
    source: Callable[[np.ndarray, float], np.ndarray] | None = None
    delta_u: float = DELTA_U

    def __post_init__(self):
        if self.w < 0.0:
            raise ValueError(f"growth exponent w must be >= 0, got {self.w}")
        if self.kind is RhsKind.POWER_FIXED_DIR:
            if self.direction is None:
                raise ValueError("power_fixed_dir needs a direction")
            d = np.asarray(self.direction, dtype=np.float64)
            norm = float(np.sqrt(np.sum(d * d)))
            if norm == 0.0:
                raise ValueError("direction must be nonzero")
            if abs(norm - 1.0) > 1e-12:  # keep normalization idempotent across reloads
                d = d / norm
            object.__setattr__(self, "direction", tuple(d))
        if self.kind is RhsKind.MANUFACTURED and self.source is None:
            raise ValueError("manufactured rhs needs a source table")


def rhs_eval(spec: RhsSpec, u: np.ndarray, grad: np.ndarray,
             x: np.ndarray | None = None, t: float = 0.0,
             mag: np.ndarray | None = None) -> np.ndarray:
    """Evaluate f(x, t, u, grad u) on node samples; returns shape (..., N)."""
    u = np.asarray(u, dtype=np.float64)
    if spec.kind is RhsKind.ZERO:
        return np.zeros_like(u)
    if spec.kind is RhsKind.MANUFACTURED:
        return np.asarray(spec.source(x, t), dtype=np.float64)
    g = _magnitude(np.asarray(grad, dtype=np.float64)) if mag is None else mag
    if spec.kind is RhsKind.STRUWE_COUPLING:
        return u * (g * g)[..., None]
    gw = g**spec.w
    if spec.kind is RhsKind.POWER_ALIGNED:
        norm = np.sqrt(np.sum(u * u, axis=-1))
        unit = u / np.maximum(norm, spec.delta_u)[..., None]
        return spec.c1 * gw[..., None] * unit + spec.c2
    if spec.kind is RhsKind.POWER_FIXED_DIR:
        d = np.asarray(spec.direction, dtype=np.float64)
        return (spec.c1 * gw + spec.c2)[..., None] * d
    raise ValueError(f"unknown rhs kind {spec.kind}")  # pragma: no cover
