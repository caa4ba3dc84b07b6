"""Static data of the two equation families.

Everything here is exact arithmetic on the exponents: critical indices,
the auxiliary pairs (D, E) and (A, B), scattering-window bounds, and the
Strichartz admissibility relation. No dynamics, no grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import DimensionTooSmall, InvalidSpec

__all__ = [
    "Family",
    "ProblemSpec",
    "DerivedExponents",
    "Window",
    "validate_spec",
    "derive_exponents",
    "threshold_root",
    "theorem_window",
    "is_admissible_pair",
]

#: tolerance for exact algebraic identities checked in double precision
IDENTITY_TOL = 1e-12


class Family(Enum):
    LOCAL = "local"
    CHOQUARD = "choquard"


@dataclass(frozen=True)
class ProblemSpec:
    """Equation family plus the exponents that define it.

    For ``LOCAL`` the nonlinearity is |x|^{2b} |u|^{2(q-1)} u and only
    ``q`` is set.  For ``CHOQUARD`` it is the Riesz-convolution term built
    from |x|^b |u|^p, and ``p`` and ``alpha`` are set.
    """

    family: Family
    dim: int
    b: float
    q: Optional[float] = None
    p: Optional[float] = None
    alpha: Optional[float] = None

    def nonlinearity_exponent(self) -> float:
        """The exponent carried by the active family (q or p)."""
        return self.q if self.family is Family.LOCAL else self.p


def validate_spec(spec: ProblemSpec) -> list[str]:
    """Check every validity condition; return the failed ones verbatim.

    An empty list means the spec is usable.  Each entry names the violated
    inequality so CLI reports stay greppable.
    """
    out: list[str] = []
    N, b = spec.dim, spec.b
    if spec.dim < 3:
        out.append("N>=3")
    if not (b < 0):
        out.append("b<0")
    if spec.family is Family.LOCAL:
        if spec.q is None:
            out.append("q is set")
        elif not spec.q > 1:
            out.append("q>1")
        if spec.p is not None or spec.alpha is not None:
            out.append("only fields of the active family are set")
        if not (max(-4.0, -N / 2.0) < 2 * b < 0):
            out.append("max{-4,-N/2}<2b")
    else:
        if spec.p is None or spec.alpha is None:
            out.append("p and alpha are set")
        else:
            if not spec.p >= 2:
                out.append("p>=2")
            a = spec.alpha
            if not (0 < a < N):
                out.append("0<alpha<N")
            else:
                lo = max(-(N + a), -4 * (1 + a / N), N - 8 - a)
                if not (lo < 2 * b < 0):
                    out.append("max{-(N+alpha),-4(1+alpha/N),N-8-alpha}<2b<0")
                if not (N >= 5 or (3 <= N <= 4 and 2 * a + 4 * b + N > 0)):
                    out.append("2alpha+4b+N>0")
        if spec.q is not None:
            out.append("only fields of the active family are set")
    return out


@dataclass(frozen=True)
class DerivedExponents:
    """Scaling index, critical window endpoints and the (D,E)/(A,B) pair."""

    s_c: float
    crit_lower: float  # mass-critical exponent (q_* or p_*)
    crit_upper: float  # energy-critical exponent (q^* or p^*), inf if N <= 4
    D: float  # kinetic weight in the potential bound (B for Choquard)
    E: float  # mass weight (A for Choquard)
    root: Optional[float]  # threshold root x_0 / x_alpha, None when N < 5

    # aliases so Choquard-side code can use the conventional names
    @property
    def B(self) -> float:
        return self.D

    @property
    def A(self) -> float:
        return self.E


def derive_exponents(spec: ProblemSpec) -> DerivedExponents:
    """Compute every derived exponent of the spec's family.

    Raises InvalidSpec when validate_spec reports violations.
    """
    violations = validate_spec(spec)
    if violations:
        raise InvalidSpec(violations)
    N, b = spec.dim, spec.b
    if spec.family is Family.LOCAL:
        q = spec.q
        s_c = N / 2 - (2 + b) / (q - 1)
        lower = 1 + (4 + 2 * b) / N
        upper = 1 + (4 + 2 * b) / (N - 4) if N >= 5 else math.inf
        D = (N * q - N - 2 * b) / 2
        E = 2 * q - D
    else:
        p, a = spec.p, spec.alpha
        s_c = N / 2 - (4 + 2 * b + a) / (2 * (p - 1))
        lower = 1 + (a + 4 + 2 * b) / N
        upper = 1 + (4 + 2 * b + a) / (N - 4) if N >= 5 else math.inf
        D = (N * p - N - a - 2 * b) / 2
        E = 2 * p - D
    root = threshold_root(spec) if N >= 5 else None
    return DerivedExponents(s_c=s_c, crit_lower=lower, crit_upper=upper,
                            D=D, E=E, root=root)


def threshold_root(spec: ProblemSpec) -> float:
    """Larger root of the scattering-window quadratic.

    Local:    (2X-1)(X-1) = 2(2+b)/(N-4)
    Choquard: (X-1)(2X-1) = (4+2b+alpha)/(N-4)

    The quadratic is 2X^2 - 3X + 1 - c; we return (3 + sqrt(1+8c))/4,
    the root above which the polynomial is positive.
    """
    N = spec.dim
    if N < 5:
        raise DimensionTooSmall(f"threshold root needs N>=5, got N={N}")
    if spec.family is Family.LOCAL:
        c = 2 * (2 + spec.b) / (N - 4)
    else:
        c = (4 + 2 * spec.b + spec.alpha) / (N - 4)
    return (3 + math.sqrt(1 + 8 * c)) / 4


@dataclass(frozen=True)
class Window:
    """Open interval of nonlinearity exponents satisfying all hypotheses."""

    lower: float
    upper: float
    contains: bool  # whether spec's own q/p sits inside
    empty: bool


def theorem_window(spec: ProblemSpec) -> Window:
    """Exponent window of the scattering theorems for this family.

    Local family:    max{q_*, x_0, 3/2} < q < q^*  (the 3/2 bound is closed)
    Choquard family: max{p_*, x_alpha, 2, 3/2 + alpha/N} < p < p^*
    """
    d = derive_exponents(spec)
    if spec.dim < 5:
        # root undefined; the theorems assume N >= 5 anyway
        return Window(math.nan, math.nan, False, True)
    if spec.family is Family.LOCAL:
        lower = max(d.crit_lower, d.root, 1.5)
        x = spec.q
        inside = (x > d.crit_lower and x > d.root and x >= 1.5
                  and x < d.crit_upper)
    else:
        floor = max(2.0, 1.5 + spec.alpha / spec.dim)
        lower = max(d.crit_lower, d.root, floor)
        x = spec.p
        inside = (x > d.crit_lower and x > d.root and x >= floor
                  and x < d.crit_upper)
    empty = not lower < d.crit_upper
    return Window(lower, d.crit_upper, contains=inside and not empty, empty=empty)


def is_admissible_pair(qt: float, r: float, s: float, N: int) -> bool:
    """Strichartz admissibility for the fourth-order propagator.

    (qt, r) is s-admissible iff 2 <= qt, r <= inf,
    2N/(N-2s) <= r < 2N/(N-4) (upper bound +inf when N <= 4) and the
    scaling relation N(1/2 - 1/r) = 4/qt + s holds.  Total function.
    """
    if not (2 <= qt and 2 <= r):
        return False
    if not math.isfinite(r):
        # r = inf fails the strict upper bound for N >= 5 and the lower
        # bound comparison is still meaningful; treat 1/r as 0 below
        if N >= 5:
            return False
    lower = 2 * N / (N - 2 * s)
    if r < lower - IDENTITY_TOL:
        return False
    if N >= 5 and not r < 2 * N / (N - 4):
        return False
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    inv_qt = 0.0 if math.isinf(qt) else 1.0 / qt
    return abs(N * (0.5 - inv_r) - 4 * inv_qt - s) <= IDENTITY_TOL
