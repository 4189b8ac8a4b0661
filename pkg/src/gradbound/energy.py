"""Cylinder-localized energy functionals and the gradient-bound verifier.

The machinery rests on three computable objects, all evaluated on stored
solver runs with a common quadrature (node sums in the ball, trapezoid over
snapshots in time):

* the Caccioppoli-type energy inequality on nested cylinders Q_rho < Q_R,

      sup_t int |grad u|^(s+2) eta^2  +  iint |grad(|grad u|^((p+s)/2) eta)|^2
          <=  c (1 + s^3) / (R - rho)^M * iint (1 + |grad u|^(s+M)),

* the interpolation sandwich that converts it into an integrability gain
  2/n per step (two literal Holder steps on the discrete sums, so the
  evaluated numbers must satisfy the chain up to round-off),

* the iteration chain psi_{i+1} <= C^i psi_i^beta + C^i on radii
  R_i = (R0/2)(1 + 2^-i) with the ladder exponents s_i + M, whose limit is
  the sup-gradient bound with exponent 1/kappa.

verify_bound fits the smallest constant C with
sup_{Q_{R0/2}} |grad u| <= C (iint_{Q_{R0}} |grad u|^(s0+M))^(1/kappa) + C
across a campaign of runs; stability of that constant under amplitude
sweeps and grid refinement is the falsifiable content of the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .mesh import (
    CutoffFn,
    CylinderSpec,
    Field,
    ball_mask,
    grad_magnitude,
    gradient,
    gradient_of,
    node_coords,
    spatial_integral,
    time_integral,
    trapezoid_weights,
)
from .regimes import ProblemParams, RegimeReport, bound_exponent, check_thm2, check_thm3, compute_M_general
from .solver import RunRecord, StatusKind

__all__ = [
    "DELTA_G",
    "EnergyReport",
    "SandwichReport",
    "MoserChainReport",
    "BoundReport",
    "psi",
    "energy_inequality_check",
    "holder_sandwich_check",
    "moser_chain_check",
    "verify_bound",
]

DELTA_G = 1e-14  # |grad u| floor inside negative-exponent powers only


def _admissibility(params: ProblemParams) -> RegimeReport:
    report = check_thm3(params) if params.q == params.p else check_thm2(params)
    if not report.covered:
        raise ValueError(
            "parameters are not covered by any verified regime; violated: "
            + ", ".join(report.violated_conditions)
        )
    return report


def _default_center_t0(record: RunRecord, center, t0) -> tuple[tuple[float, ...], float]:
    grid = record.config.grid
    if center is None:
        center = grid.center()
    if t0 is None:
        t0 = float(record.times()[-1])
    return tuple(center), float(t0)


def _powered(mag: np.ndarray, exponent: float) -> np.ndarray:
    if exponent < 0.0:
        return np.maximum(mag, DELTA_G) ** exponent
    return mag**exponent


def _sweep_series(record: RunRecord,
                  fns: Sequence[Callable[[Field, np.ndarray], float]]) -> list[np.ndarray]:
    """Evaluate several per-snapshot functionals in one pass over the record.

    Each fn receives (snapshot, |grad u| samples) and returns a scalar; the
    gradient magnitude is computed once per snapshot.
    """
    out = [np.empty(len(record.snapshots)) for _ in fns]
    for k, snap in enumerate(record.snapshots):
        mag = grad_magnitude(gradient(snap))
        for j, fn in enumerate(fns):
            out[j][k] = fn(snap, mag)
    return out


def psi(record: RunRecord, cyl: CylinderSpec, exponent: float) -> float:
    """iint over the cylinder of |grad u|^exponent."""
    grid = record.config.grid
    if not cyl.fits_grid(grid):
        raise ValueError("cylinder ball exits the spatial domain")
    times = record.times()
    a, b = cyl.time_window()
    if a < times[0] - 1e-12 or b > times[-1] + 1e-12:
        raise ValueError("run does not span the cylinder time window")
    mask = ball_mask(grid, cyl.center, cyl.R)
    (series,) = _sweep_series(
        record, [lambda s, m: spatial_integral(grid, _powered(m, exponent), mask)]
    )
    return time_integral(times, series, max(a, float(times[0])), b)


@dataclass(frozen=True)
class EnergyReport:
    s: float
    rho: float
    cylinder: CylinderSpec
    lhs_sup: float
    lhs_grad: float
    rhs_raw: float
    rhs_scaled: float
    c: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "rho": self.rho,
            "R": self.cylinder.R,
            "center": list(self.cylinder.center),
            "t0": self.cylinder.t0,
            "time_exponent": self.cylinder.time_exponent,
            "lhs_sup": self.lhs_sup,
            "lhs_grad": self.lhs_grad,
            "rhs_raw": self.rhs_raw,
            "rhs_scaled": self.rhs_scaled,
            "c": self.c,
            "satisfied": self.satisfied,
        }


def _require_s_admissible(s: float, params: ProblemParams) -> None:
    floor = params.p - 2.0 * params.w - 2.0
    if not params.c2_zero:
        floor = max(floor, params.p - 2.0)
    if not s > floor:
        raise ValueError(
            f"s = {s} violates the energy-inequality range (needs s > {floor} "
            f"for w = {params.w}, c2_zero = {params.c2_zero})"
        )
    if not 1.0 + s**3 > 0.0:
        raise ValueError(f"s = {s} makes the inequality constant 1 + s^3 nonpositive")


def energy_inequality_check(record: RunRecord, s: float, rho: float, R: float,
                            params: ProblemParams, center=None, t0=None,
                            time_exponent: float = 2.0,
                            c: float | None = None) -> EnergyReport:
    """Evaluate both sides of the energy inequality on Q_rho < Q_R.

    With c omitted, the smallest admissible constant is fitted (the report
    then records that constant and satisfied is True by construction); with
    c given, the inequality is tested as stated.
    """
    if not (0.0 < rho < R):
        raise ValueError(f"need 0 < rho < R, got rho={rho}, R={R}")
    if record.status.kind is not StatusKind.COMPLETED:
        raise ValueError("energy evaluation needs a completed run")
    _require_s_admissible(s, params)

    grid = record.config.grid
    center, t0 = _default_center_t0(record, center, t0)
    cyl = CylinderSpec(center, t0, R, time_exponent)
    if not cyl.fits_grid(grid):
        raise ValueError("cylinder ball exits the spatial domain")
    times = record.times()
    a, b = cyl.time_window()
    if a < times[0] - 1e-12:
        raise ValueError("run does not span the cylinder time window")

    p = params.p
    M = compute_M_general(p, params.q, params.w)
    cut = CutoffFn(center, rho, R, t0, time_exponent)
    x = node_coords(grid)
    mask = ball_mask(grid, center, R)
    half = (p + s) / 2.0

    def sup_term(snap: Field, mag: np.ndarray) -> float:
        eta = cut.values(x, snap.time)
        return spatial_integral(grid, mag ** (s + 2.0) * eta * eta, mask)

    def grad_term(snap: Field, mag: np.ndarray) -> float:
        eta = cut.values(x, snap.time)
        geta = cut.space_grad(x, snap.time)
        gm = gradient_of(grid, mag)
        vec = (half * _powered(mag, half - 1.0) * eta)[..., None] * gm \
            + (mag**half)[..., None] * geta
        return spatial_integral(grid, np.sum(vec * vec, axis=-1), mask)

    def raw_term(snap: Field, mag: np.ndarray) -> float:
        return spatial_integral(grid, 1.0 + mag ** (s + M), mask)

    sup_series, grad_series, raw_series = _sweep_series(
        record, [sup_term, grad_term, raw_term]
    )
    lo = max(a, float(times[0]))
    inside = (times >= lo) & (times <= b)
    lhs_sup = float(sup_series[inside].max())
    lhs_grad = time_integral(times, grad_series, lo, b)
    rhs_raw = time_integral(times, raw_series, lo, b)

    scale = (1.0 + s**3) / (R - rho) ** M * rhs_raw
    if c is None:
        c = (lhs_sup + lhs_grad) / scale if scale > 0.0 else math.inf
    rhs_scaled = c * scale
    satisfied = lhs_sup + lhs_grad <= rhs_scaled * (1.0 + 1e-12)
    return EnergyReport(s, rho, cyl, lhs_sup, lhs_grad, rhs_raw, rhs_scaled,
                        float(c), bool(satisfied))


@dataclass(frozen=True)
class SandwichReport:
    """Two-step discrete Holder chain lhs <= mid <= rhs on nested cylinders."""

    s: float
    lhs: float
    mid: float
    rhs: float
    rel_violation: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {"s": self.s, "lhs": self.lhs, "mid": self.mid, "rhs": self.rhs,
                "rel_violation": self.rel_violation, "satisfied": self.satisfied}


def holder_sandwich_check(record: RunRecord, s: float, rho: float, R: float,
                          p: float, center=None, t0=None,
                          time_exponent: float = 2.0,
                          tol: float = 1e-10) -> SandwichReport:
    """Termwise Holder chain with one shared quadrature.

    With m = |grad u|, A(t) = int_{B_R} m^(s+2) eta^2, and
    B(t) = int_{B_R} (m^((p+s)/2) eta)^(2n/(n-2)):

        iint_{Q_rho} m^(p+s+(s+2)2/n)
            <= int_t A^(2/n) B^((n-2)/n)
            <= (sup_t A)^(2/n) int_t B^((n-2)/n).

    All three numbers use the same snapshot trapezoid weights over the
    Q_R window and the same ball sums, so both inequalities are instances
    of Holder on finite sums and must hold to round-off.
    """
    grid = record.config.grid
    n = grid.n
    if n < 3:
        raise ValueError("the sandwich exponent 2n/(n-2) needs n >= 3")
    if not (0.0 < rho < R):
        raise ValueError(f"need 0 < rho < R, got rho={rho}, R={R}")
    center, t0 = _default_center_t0(record, center, t0)
    cut = CutoffFn(center, rho, R, t0, time_exponent)
    outer = CylinderSpec(center, t0, R, time_exponent)
    if not outer.fits_grid(grid):
        raise ValueError("cylinder ball exits the spatial domain")

    times = record.times()
    aR, b = outer.time_window()
    a_rho = t0 - rho**time_exponent
    idx = np.nonzero((times >= max(aR, float(times[0]))) & (times <= b))[0]
    if idx.size < 3:
        raise ValueError("need >= 3 snapshots inside the cylinder window")
    weights = trapezoid_weights(times[idx])

    x = node_coords(grid)
    mask_R = ball_mask(grid, center, R)
    mask_rho = ball_mask(grid, center, rho)
    e_lhs = p + s + (s + 2.0) * 2.0 / n
    e_B = 2.0 * n / (n - 2.0)

    def terms(snap: Field, mag: np.ndarray) -> float:
        eta = cut.values(x, snap.time)
        L = spatial_integral(grid, mag**e_lhs, mask_rho) if snap.time >= a_rho else 0.0
        A = spatial_integral(grid, mag ** (s + 2.0) * eta * eta, mask_R)
        B = spatial_integral(grid, (mag ** ((p + s) / 2.0) * eta) ** e_B, mask_R)
        return L, A, B

    L = np.empty(idx.size)
    A = np.empty(idx.size)
    B = np.empty(idx.size)
    for j, k in enumerate(idx):
        snap = record.snapshots[k]
        mag = grad_magnitude(gradient(snap))
        L[j], A[j], B[j] = terms(snap, mag)

    lhs = float(np.sum(weights * L))
    mid = float(np.sum(weights * A ** (2.0 / n) * B ** ((n - 2.0) / n)))
    rhs = float(A.max() ** (2.0 / n) * np.sum(weights * B ** ((n - 2.0) / n)))
    scale = max(abs(lhs), abs(mid), abs(rhs), 1e-300)
    rel_violation = max(lhs - mid, mid - rhs, 0.0) / scale
    return SandwichReport(s, lhs, mid, rhs, rel_violation, rel_violation <= tol)


@dataclass(frozen=True)
class MoserChainReport:
    """psi values along shrinking cylinders and the fitted chain constant."""

    radii: tuple[float, ...]
    exponents: tuple[float, ...]
    psis: tuple[float, ...]
    beta: float
    C: float
    levels: tuple[tuple[int, float, float], ...]  # (i, psi_i, chain_rhs_i)
    satisfied: bool

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "exponents": list(self.exponents),
            "psis": list(self.psis),
            "beta": self.beta,
            "C": self.C,
            "levels": [list(l) for l in self.levels],
            "satisfied": self.satisfied,
        }


def moser_chain_check(record: RunRecord, params: ProblemParams, R0: float,
                      levels: int, center=None, t0=None,
                      time_exponent: float = 2.0) -> MoserChainReport:
    """Fit the smallest C >= 1 with psi_{i+1} <= C^i psi_i^beta + C^i.

    psi_i integrates |grad u|^(s_i + M) over Q_{R_i}, R_i = (R0/2)(1 + 2^-i),
    with the ladder exponents from the admissible params.  The i = 0 link is
    C-free; if it fails no constant exists and the report says so.
    """
    from .regimes import build_ladder

    if not (isinstance(levels, int) and levels >= 2):
        raise ValueError(f"need integer levels >= 2, got {levels}")
    if record.status.kind is not StatusKind.COMPLETED:
        raise ValueError("chain evaluation needs a completed run")
    report = _admissibility(params)
    grid = record.config.grid
    if not R0 < 1.0:
        raise ValueError(f"need R0 < 1, got {R0}")
    for h in grid.h:
        if math.floor(R0 / h) + 1 < 8:
            raise ValueError(
                f"ball B_{{R0/2}} resolves < 8 nodes per axis (R0={R0}, h={h})"
            )

    center, t0 = _default_center_t0(record, center, t0)
    ladder = build_ladder(params.s0, params.p, report.M, params.n, levels)
    radii = [(R0 / 2.0) * (1.0 + 2.0**-i) for i in range(levels + 1)]
    exponents = [si + report.M for si in ladder.s]

    times = record.times()
    masks = [ball_mask(grid, center, r) for r in radii]
    series = [np.empty(len(record.snapshots)) for _ in radii]
    for k, snap in enumerate(record.snapshots):
        mag = grad_magnitude(gradient(snap))
        for i in range(levels + 1):
            series[i][k] = spatial_integral(grid, _powered(mag, exponents[i]), masks[i])
    psis = []
    for i, r in enumerate(radii):
        cyl = CylinderSpec(center, t0, r, time_exponent)
        if not cyl.fits_grid(grid):
            raise ValueError("chain cylinder exits the spatial domain")
        a, b = cyl.time_window()
        if a < times[0] - 1e-12:
            raise ValueError("run does not span the chain time window")
        psis.append(time_integral(times, series[i], max(a, float(times[0])), b))

    beta = 1.0 + 2.0 / params.n
    C = 1.0
    feasible = psis[1] <= psis[0] ** beta + 1.0
    for i in range(1, levels):
        need = psis[i + 1] / (psis[i] ** beta + 1.0)
        if need > 1.0:
            C = max(C, need ** (1.0 / i))
    if not feasible:
        C = math.inf
    level_rows = tuple(
        (i, psis[i], C**i * psis[i] ** beta + C**i) for i in range(levels)
    )
    satisfied = feasible and all(
        psis[i + 1] <= rhs * (1.0 + 1e-12) for i, _, rhs in level_rows
    )
    return MoserChainReport(tuple(radii), tuple(exponents), tuple(psis), beta,
                            C, level_rows, bool(satisfied))


@dataclass(frozen=True)
class BoundReport:
    """Fitted constant of the sup-gradient estimate across a campaign.

    lhs and rhs_base echo the pair of the run that attains fitted_C.
    """

    params: ProblemParams
    kappa: float
    lhs: float
    rhs_base: float
    fitted_C: float
    per_run: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "lhs": self.lhs,
            "rhs_base": self.rhs_base,
            "fitted_C": self.fitted_C,
            "per_run": [list(pair) for pair in self.per_run],
        }


def verify_bound(campaign: Iterable[RunRecord], params: ProblemParams, R0: float,
                 center=None, t0=None, time_exponent: float = 2.0) -> BoundReport:
    """Fit the smallest C with sup |grad u| <= C psi^(1/kappa) + C over all runs.

    The left side is the max of |grad u| over Q_{R0/2}; the right side raises
    psi = iint_{Q_{R0}} |grad u|^(s0+M) to the bound exponent 1/kappa from the
    regime arithmetic (single source of truth).  Campaigns stream: any
    iterable of completed runs works, one record in memory at a time.
    """
    report = _admissibility(params)
    if not (0.0 < R0 < 1.0):
        raise ValueError(f"the estimate needs 0 < R0 < 1, got R0={R0}")
    exponent = bound_exponent(params.s0, params.p, report.M, params.n)
    psi_exp = params.s0 + report.M

    per_run: list[tuple[float, float]] = []
    for record in campaign:
        if record.status.kind is not StatusKind.COMPLETED:
            raise ValueError(f"campaign run has status {record.status.kind.value}")
        grid = record.config.grid
        c, t_top = _default_center_t0(record, center, t0)
        inner = CylinderSpec(c, t_top, R0 / 2.0, time_exponent)
        outer = CylinderSpec(c, t_top, R0, time_exponent)
        if not outer.fits_grid(grid):
            raise ValueError("outer cylinder exits the spatial domain")
        times = record.times()
        a_in, b = inner.time_window()
        mask_in = ball_mask(grid, c, inner.R)
        idx = np.nonzero((times >= max(a_in, float(times[0]))) & (times <= b))[0]
        if idx.size == 0:
            raise ValueError("no snapshots inside the inner cylinder window")
        lhs = 0.0
        for k in idx:
            mag = grad_magnitude(gradient(record.snapshots[k]))
            lhs = max(lhs, float(mag[mask_in].max()))
        rhs = psi(record, outer, psi_exp) ** exponent
        per_run.append((lhs, rhs))

    if not per_run:
        raise ValueError("campaign is empty")
    ratios = [l / (r + 1.0) for l, r in per_run]
    k_best = int(np.argmax(ratios))
    return BoundReport(
        params=params,
        kappa=1.0 / exponent,
        lhs=per_run[k_best][0],
        rhs_base=per_run[k_best][1],
        fitted_C=ratios[k_best],
        per_run=tuple(per_run),
    )
