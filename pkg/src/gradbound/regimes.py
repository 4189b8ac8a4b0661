"""Regime classification and the nonlinear-iteration exponent ladder.

For the parabolic system

    u_t^i - div A^i(grad u) = f^i(x, t, grad u),    i = 1..N,

with p-growth main part and |f| <= c1 |grad u|^w + c2, the sup-norm gradient
bound is driven by a single composite exponent

    M = max(2, p, 2q - p, w + 1, 2w - p + 2)

(the 2q - p entry drops when the flux is a pure p-Laplacian window, q = p)
and by the iteration denominator

    kappa = s0 + 2 + n (p - M) / 2 ,

where s0 >= the integrability margin of the initial gradient.  The iteration
raises integrability along the ladder

    s_{i+1} + M = p + s_i + (s_i + 2) * 2/n ,

whose closed form is s_i = beta^i (s0 + kappa') - kappa' with beta = 1 + 2/n
and kappa' = 2 + n (p - M) / 2, so s_i / beta^i increases to kappa and the
final estimate carries the exponent 1/kappa.

This module is pure arithmetic: classifiers return reports with named
violated conditions rather than raising, and every strict inequality is
compared exactly (no epsilon slack), so boundary inputs are rejected
deterministically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

__all__ = [
    "Theorem",
    "ProblemParams",
    "RegimeReport",
    "ExponentLadder",
    "plaplace_window",
    "compute_M_general",
    "compute_M_plaplace",
    "kappa",
    "bound_exponent",
    "build_ladder",
    "classify_thm1",
    "thm1_case2_sup",
    "check_thm2",
    "check_thm3",
]


class Theorem(enum.Enum):
    """Which covered regime (if any) applies to a parameter tuple."""

    THM1_CASE1 = "thm1_case1"
    THM1_CASE2 = "thm1_case2"
    THM1_CASE3 = "thm1_case3"
    THM2 = "thm2"
    THM3 = "thm3"
    NOT_COVERED = "not_covered"


def plaplace_window(p: float) -> tuple[float, float]:
    """Ellipticity window (lam, Lam) of the pure p-Laplace flux |Q|^(p-2) Q."""
    return min(1.0, p - 1.0), max(1.0, p - 1.0)


@dataclass(frozen=True)
class ProblemParams:
    """Structural parameters of one problem instance.

    n, N        spatial dimension and number of components
    p, q        growth window of the flux potential, 1 < p <= q < p + 1
    w           growth exponent of the right-hand side, 0 <= w <= p
    p_tilde     integrability exponent available for grad u (>= p;
                bare existence gives p_tilde = p)
    s0          starting integrability margin of the ladder
    lam, Lam    ellipticity window of the flux Jacobian, 0 < lam <= Lam
    c2_zero     whether the constant term c2 of the growth bound vanishes
    """

    n: int
    N: int
    p: float
    q: float | None = None
    w: float = 0.0
    p_tilde: float | None = None
    s0: float = 0.0
    lam: float | None = None
    Lam: float | None = None
    c2_zero: bool = True

    def __post_init__(self):
        if self.q is None:
            object.__setattr__(self, "q", float(self.p))
        if self.p_tilde is None:
            object.__setattr__(self, "p_tilde", float(self.p))
        if self.lam is None or self.Lam is None:
            lo, hi = plaplace_window(self.p)
            if self.lam is None:
                object.__setattr__(self, "lam", lo)
            if self.Lam is None:
                object.__setattr__(self, "Lam", hi)
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not isinstance(self.N, int) or self.N < 1:
            raise ValueError(f"N must be an integer >= 1, got {self.N}")
        if not self.p > 1.0:
            raise ValueError(f"need p > 1, got p={self.p}")
        if not (self.p <= self.q < self.p + 1.0):
            raise ValueError(f"need p <= q < p+1, got p={self.p}, q={self.q}")
        if not (0.0 <= self.w <= self.p):
            raise ValueError(f"need 0 <= w <= p, got w={self.w}, p={self.p}")
        if not self.p_tilde >= self.p:
            raise ValueError(f"need p_tilde >= p, got {self.p_tilde}")
        if not (0.0 < self.lam <= self.Lam):
            raise ValueError(f"need 0 < lam <= Lam, got lam={self.lam}, Lam={self.Lam}")


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of a classification: covered regime or named violations.

    For a covered report violated_conditions is empty and kappa > 0.
    M >= 2 always (every composite-exponent formula contains the entry 2).
    """

    theorem_applied: Theorem
    M: float
    s0_effective: float
    kappa: float
    violated_conditions: tuple[str, ...] = field(default=())

    @property
    def covered(self) -> bool:
        return self.theorem_applied is not Theorem.NOT_COVERED

    def to_dict(self) -> dict:
        return {
            "theorem_applied": self.theorem_applied.value,
            "M": self.M,
            "s0_effective": self.s0_effective,
            "kappa": self.kappa,
            "violated_conditions": list(self.violated_conditions),
        }


@dataclass(frozen=True)
class ExponentLadder:
    """Exponent sequence of the integrability iteration.

    s[i] solves s_{i+1} + M = p + s_i + (s_i + 2) * 2/n; ratios[i] = s_i / beta^i
    converges monotonically to limit = kappa = s0 + 2 + n(p - M)/2.
    """

    beta: float
    s: tuple[float, ...]
    ratios: tuple[float, ...]
    limit: float

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "s": list(self.s),
            "ratios": list(self.ratios),
            "limit": self.limit,
        }


def compute_M_general(p: float, q: float, w: float) -> float:
    """Composite exponent max(2, p, 2q - p, w + 1, 2w - p + 2) of the general flux window."""
    return max(2.0, p, 2.0 * q - p, w + 1.0, 2.0 * w - p + 2.0)


def compute_M_plaplace(p: float, w: float, q: float | None = None) -> float:
    """Composite exponent max(2, p, w + 1, 2w - p + 2) of the pure window q = p.

    Rejects q != p: the pure-window formula has no 2q - p entry.
    """
    if q is not None and q != p:
        raise ValueError(f"pure-window exponent needs q = p, got q={q}, p={p}")
    return max(2.0, p, w + 1.0, 2.0 * w - p + 2.0)


def kappa(s0: float, p: float, M: float, n: int) -> float:
    """Iteration denominator s0 + 2 + n (p - M) / 2."""
    return s0 + 2.0 + n * (p - M) / 2.0


def bound_exponent(s0: float, p: float, M: float, n: int) -> float:
    """Exponent 1/kappa carried by the final sup-gradient estimate.

    Errors when kappa <= 0: the iteration does not close there.
    """
    k = kappa(s0, p, M, n)
    if not k > 0.0:
        raise ValueError(f"kappa = {k} <= 0: no bound exponent exists")
    return 1.0 / k


def build_ladder(s0: float, p: float, M: float, n: int, I: int) -> ExponentLadder:
    """Iterate the exponent recursion I times from s0.

    The recursion is evaluated literally (not via the closed form) so that
    independent extended-precision iteration reproduces it to round-off.
    """
    if not (isinstance(n, int) and n >= 3):
        raise ValueError(f"ladder needs integer n >= 3, got {n}")
    if not (isinstance(I, int) and I >= 1):
        raise ValueError(f"ladder depth must be an integer >= 1, got {I}")
    k = kappa(s0, p, M, n)
    if not k > 0.0:
        raise ValueError(f"kappa = {k} <= 0: ladder does not increase")
    beta = 1.0 + 2.0 / n
    s = [float(s0)]
    for _ in range(I):
        si = s[-1]
        s.append(p + si + (si + 2.0) * (2.0 / n) - M)
    ratios = [si / beta**i for i, si in enumerate(s)]
    return ExponentLadder(beta=beta, s=tuple(s), ratios=tuple(ratios), limit=k)


# --- three-case classifier for the 3d p-Laplace system with power forcing ---

_THM1_N = 3  # the three-case classification is stated for n = 3 only


def thm1_case2_sup(p: float, p_tilde: float) -> float:
    """Right endpoint (exclusive) of the case-2 admissible w interval."""
    return (p_tilde + 4.0 * p - 3.0) / 5.0


def classify_thm1(p: float, w: float, p_tilde: float) -> RegimeReport:
    """First-match classification of (p, w, p_tilde) into the three covered cases.

    case 1:  w <= p - 1 and p_tilde = p       (slow growth, prior theory)
    case 2:  w in [p/2, (p_tilde + 4p - 3)/5)
    case 3:  w <= p/2 and p > 2 - (2/3) p_tilde

    Cases 2-3 run the iteration with M = max(2, 2w - p + 2) and
    s0_effective = p_tilde - M; case 1 reports kappa = p_tilde, the
    denominator of its norm-form estimate.  All comparisons are exact.
    """
    if not p > 1.0:
        raise ValueError(f"need p > 1, got {p}")
    if not w >= 0.0:
        raise ValueError(f"need w >= 0, got {w}")
    if not p_tilde >= p:
        raise ValueError(f"need p_tilde >= p, got p_tilde={p_tilde}, p={p}")

    M = max(2.0, 2.0 * w - p + 2.0)
    s0_eff = p_tilde - M
    k = kappa(s0_eff, p, M, _THM1_N)

    if w > p:
        return RegimeReport(Theorem.NOT_COVERED, M, s0_eff, k, ("w_growth",))
    if w <= p - 1.0 and p_tilde == p:
        return RegimeReport(Theorem.THM1_CASE1, M, s0_eff, p_tilde)
    if p / 2.0 <= w < thm1_case2_sup(p, p_tilde):
        return RegimeReport(Theorem.THM1_CASE2, M, s0_eff, k)
    if w <= p / 2.0 and p > 2.0 - (2.0 / 3.0) * p_tilde:
        return RegimeReport(Theorem.THM1_CASE3, M, s0_eff, k)

    violated = []
    if not (w <= p - 1.0 and p_tilde == p):
        violated.append("case1")
    if not (p / 2.0 <= w < thm1_case2_sup(p, p_tilde)):
        violated.append("case2")
    if not (w <= p / 2.0 and p > 2.0 - (2.0 / 3.0) * p_tilde):
        violated.append("case3")
    return RegimeReport(Theorem.NOT_COVERED, M, s0_eff, k, tuple(violated))


def check_thm2(params: ProblemParams) -> RegimeReport:
    """Admissibility of the general-window regime (q possibly above p).

    Conditions, all strict where written strictly:
      s0 >= 0; kappa > 0; s0 > p - 2 if c2 != 0 else s0 > p - 2w - 2;
      q < p + 1; n >= 3.
    """
    M = compute_M_general(params.p, params.q, params.w)
    k = kappa(params.s0, params.p, M, params.n)
    violated = []
    if not params.s0 >= 0.0:
        violated.append("s0_nonneg")
    if not k > 0.0:
        violated.append("kappa_positive")
    if params.c2_zero:
        if not params.s0 > params.p - 2.0 * params.w - 2.0:
            violated.append("s0_vs_c2")
    else:
        if not params.s0 > params.p - 2.0:
            violated.append("s0_vs_c2")
    if not params.q < params.p + 1.0:
        violated.append("q_window")
    if not params.n >= 3:
        violated.append("dimension")
    if violated:
        return RegimeReport(Theorem.NOT_COVERED, M, params.s0, k, tuple(violated))
    return RegimeReport(Theorem.THM2, M, params.s0, k)


def check_thm3(params: ProblemParams) -> RegimeReport:
    """Admissibility of the pure-window regime q = p (negative s0 allowed).

    Conditions: s0 > max(-lam/Lam, p - 2w - 2); kappa > 0 with the
    pure-window M; n >= 3.  Rejects q != p outright.
    """
    if params.q != params.p:
        raise ValueError(f"pure-window check needs q = p, got q={params.q}, p={params.p}")
    M = compute_M_plaplace(params.p, params.w)
    k = kappa(params.s0, params.p, M, params.n)
    violated = []
    s0_floor = max(-params.lam / params.Lam, params.p - 2.0 * params.w - 2.0)
    if not params.s0 > s0_floor:
        violated.append("s0_lower_bound")
    if not k > 0.0:
        violated.append("kappa_positive")
    if not params.n >= 3:
        violated.append("dimension")
    if violated:
        return RegimeReport(Theorem.NOT_COVERED, M, params.s0, k, tuple(violated))
    return RegimeReport(Theorem.THM3, M, params.s0, k)
