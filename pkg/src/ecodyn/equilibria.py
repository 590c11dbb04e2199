"""Equilibrium polynomials, real-root extraction and the equilibrium families.

The planar and interior equilibria are found from the real roots of the
cubics ``Q`` (``z = 0``), ``R`` (``y = 0``) and the quartic ``P`` (interior),
each expanded in ``x``. Negative branches are kept and flagged infeasible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateDenominator, NoConvergence
from .model import ModelParams, _rhs

TOL_IMAG = 1e-9
TOL_ROOT = 1e-8
TOL_FEAS = 1e-10
TOL_DENOM = 1e-12
# repeated roots split into a complex pair of size ~sqrt(eps); such candidates
# are kept when their real part is a root to within evaluation error
TOL_IMAG_RESCUE = 1e-6
NEWTON_STEPS = 3


class DegenerateBranchWarning(UserWarning):
    """An equilibrium branch was skipped because its closed form is singular."""


class Family(str, Enum):
    E0 = "E0"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    E4 = "E4"
    E5 = "E5"
    E6 = "E6"
    ESTAR = "EStar"


BRANCHED = (Family.E5, Family.E6, Family.ESTAR)

_ROMAN = ["I", "II", "III", "IV", "V", "VI"]


@dataclass(frozen=True)
class EquilibriumFamily:
    tag: Family
    branch_index: int = 1

    def __post_init__(self):
        if self.branch_index < 1:
            raise ValueError("branch_index must be >= 1")
        if self.tag not in BRANCHED and self.branch_index != 1:
            raise ValueError(f"{self.tag.value} has a single branch")

    @property
    def label(self) -> str:
        """Table-style label: ``E0`` .. ``E4``, ``E5^I``, ``E*^II``, ..."""
        if self.tag not in BRANCHED:
            return self.tag.value
        head = "E*" if self.tag is Family.ESTAR else self.tag.value
        i = self.branch_index
        numeral = _ROMAN[i - 1] if i <= len(_ROMAN) else str(i)
        return f"{head}^{numeral}"


@dataclass(frozen=True)
class Equilibrium:
    family: EquilibriumFamily
    state: tuple[float, float, float]
    feasible: bool
    residual: float

    @property
    def label(self) -> str:
        return self.family.label

    @property
    def tag(self) -> Family:
        return self.family.tag


@dataclass(frozen=True)
class PolynomialCoefficients:
    """Real polynomial, coefficients ordered from the highest degree down."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        if self.coeffs[0] == 0 or not math.isfinite(self.coeffs[0]):
            raise ValueError("degenerate leading coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        acc = 0.0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def derivative_at(self, x: float) -> float:
        n = self.degree
        acc = 0.0
        for k, c in enumerate(self.coeffs[:-1]):
            acc = acc * x + (n - k) * c
        return acc


def interior_polynomial(params: ModelParams) -> PolynomialCoefficients:
    """Quartic whose roots are the prey coordinates of interior equilibria."""
    a1, a2, a3, b1 = params.a1, params.a2, params.a3, params.b1
    c1, c2, c3, t = params.c1, params.c2, params.c3, params.theta
    k1, k2, p = params.k1, params.k2, params.p
    A4 = b1 * t**2
    A3 = b1 * k2 * t**2 - a1 * t**2 + b1 * c2 * t - b1 * c3 * t
    A2 = (-a1 * k2 * t**2 + a2 * c1 * t * p + b1 * k1 * t**2
          - a1 * c2 * t + a1 * c3 * t - a3 * c1 * t)
    A1 = (a2 * c1 * k2 * t * p + b1 * k1 * k2 * t**2 - a1 * k1 * t**2
          - a2 * c1 * c3 * p + a3 * c1 * c2 * p - a3 * c1 * k2 * t
          + b1 * c2 * k1 * t - b1 * c3 * k1 * t + a2 * c1 * c3 - a3 * c1 * c2)
    A0 = -a1 * k1 * k2 * t**2 - a1 * c2 * k1 * t + a1 * c3 * k1 * t
    return PolynomialCoefficients((A4, A3, A2, A1, A0))


def interior_yz(x_star: float, params: ModelParams) -> tuple[float, float]:
    """Predator coordinates ``(y*, z*)`` of the interior equilibrium at ``x_star``."""
    a2, a3, t = params.a2, params.a3, params.theta
    c2, c3, k2 = params.c2, params.c3, params.k2
    q = t * x_star + k2 * t + c2 - c3
    if abs(q) < TOL_DENOM:
        raise DegenerateDenominator(
            f"theta*x + k2*theta + c2 - c3 = {q!r} at x = {x_star!r}"
        )
    den = t * q
    y = (-a3 * t * x_star - a3 * k2 * t + a2 * c3 - a3 * c2) / den
    z = -(-a2 * t * x_star - a2 * k2 * t + a2 * c3 - a3 * c2) / den
    return y, z


def e5_polynomial(params: ModelParams) -> PolynomialCoefficients:
    """Cubic in ``x`` for the susceptible-only equilibria ``(x5, y5, 0)``."""
    a1, a2, b1 = params.a1, params.a2, params.b1
    c1, c2, k1, k2 = params.c1, params.c2, params.k1, params.k2
    return PolynomialCoefficients(
        (b1 * c2, -a1 * c2 + a2 * c1, a2 * c1 * k2 + b1 * c2 * k1, -a1 * c2 * k1)
    )


def e5_y(x5: float, params: ModelParams) -> float:
    return params.a2 * (x5 + params.k2) / params.c2


def e6_polynomial(params: ModelParams) -> PolynomialCoefficients:
    """Cubic in ``x`` for the infected-only equilibria ``(x6, 0, z6)``."""
    a1, a3, b1 = params.a1, params.a3, params.b1
    c1, c3, k1, k2, p = params.c1, params.c3, params.k1, params.k2, params.p
    return PolynomialCoefficients(
        (b1 * c3, -a1 * c3 + a3 * c1 * p, a3 * c1 * k2 * p + b1 * c3 * k1, -a1 * c3 * k1)
    )


def e6_z(x6: float, params: ModelParams) -> float:
    return params.a3 * (x6 + params.k2) / params.c3


def e3_coordinates(params: ModelParams) -> tuple[float, float] | None:
    """Predator coordinates of the prey-free coexistence point, or None if it is not positive."""
    a2, a3, t = params.a2, params.a3, params.theta
    c2, c3, k2 = params.c2, params.c3, params.k2
    q = k2 * t + c2 - c3
    if abs(q) < TOL_DENOM:
        raise DegenerateDenominator(f"k2*theta + c2 - c3 = {q!r}")
    y3 = (-a3 * k2 * t + a2 * c3 - a3 * c2) / (t * q)
    z3 = -(-a2 * k2 * t + a2 * c3 - a3 * c2) / (t * q)
    if y3 < 0 or z3 < 0:
        return None
    return y3, z3


def _polish(poly: PolynomialCoefficients, x: float) -> float:
    fx = poly(x)
    for _ in range(NEWTON_STEPS):
        if fx == 0.0:
            break
        d = poly.derivative_at(x)
        if d == 0.0 or not math.isfinite(d):
            break
        cand = x - fx / d
        fc = poly(cand)
        if not abs(fc) < abs(fx):
            break
        x, fx = cand, fc
    return x


def _eval_error_bound(poly: PolynomialCoefficients, x: float) -> float:
    # rounding bound for Horner evaluation
    acc = 0.0
    for c in poly.coeffs:
        acc = acc * abs(x) + abs(c)
    return 4 * poly.degree * np.finfo(float).eps * acc


def real_roots(poly: PolynomialCoefficients) -> list[float]:
    """All distinct real roots of ``poly`` in ascending order.

    Roots come from the eigenvalues of the companion matrix and are then
    polished with a few Newton steps on the polynomial itself.
    """
    c = np.asarray(poly.coeffs, dtype=float)
    n = poly.degree
    companion = np.zeros((n, n))
    companion[0, :] = -c[1:] / c[0]
    companion[1:, :-1] = np.eye(n - 1)
    try:
        eig = np.linalg.eigvals(companion)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"companion eigenvalues failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NoConvergence("companion eigenvalues are not finite")

    cands = []
    for r in eig:
        bound = 1.0 + abs(r.real)
        if abs(r.imag) <= TOL_IMAG * bound:
            cands.append(_polish(poly, float(r.real)))
        elif abs(r.imag) <= TOL_IMAG_RESCUE * bound:
            x = _polish(poly, float(r.real))
            if abs(poly(x)) <= _eval_error_bound(poly, x):
                cands.append(x)
    cands.sort()
    roots: list[float] = []
    for r in cands:
        if roots and abs(r - roots[-1]) <= TOL_ROOT * max(1.0, abs(r), abs(roots[-1])):
            continue
        roots.append(r)
    return roots


def _make(tag, state, params, branch_index=1):
    feasible = all(v >= -TOL_FEAS for v in state)
    if feasible:
        state = tuple(max(v, 0.0) for v in state)
    f = _rhs(*state, params)
    return Equilibrium(
        EquilibriumFamily(tag, branch_index),
        tuple(float(v) for v in state),
        feasible,
        math.sqrt(sum(v * v for v in f)),
    )


def _index_branches(tag, states, params):
    # feasible branches are numbered first (ascending x), then infeasible ones
    made = [_make(tag, s, params) for s in states]
    ordered = sorted(made, key=lambda e: (not e.feasible, e.state[0]))
    return [
        Equilibrium(EquilibriumFamily(tag, i), e.state, e.feasible, e.residual)
        for i, e in enumerate(ordered, start=1)
    ]


def enumerate_equilibria(params: ModelParams) -> list[Equilibrium]:
    """Every equilibrium family, ordered E0..E6, E* and by branch index.

    Branches whose closed form is singular are skipped with a
    :class:`DegenerateBranchWarning`.
    """
    P = params
    out = [
        _make(Family.E0, (0.0, 0.0, 0.0), P),
        _make(Family.E1, (0.0, 0.0, P.a3 * P.k2 / P.c3), P),
        _make(Family.E2, (0.0, P.a2 * P.k2 / P.c2, 0.0), P),
    ]
    try:
        e3 = e3_coordinates(P)
    except DegenerateDenominator as exc:
        warnings.warn(f"E3 skipped: {exc}", DegenerateBranchWarning, stacklevel=2)
        e3 = None
    if e3 is not None:
        out.append(_make(Family.E3, (0.0, *e3), P))
    out.append(_make(Family.E4, (P.a1 / P.b1, 0.0, 0.0), P))

    out += _index_branches(
        Family.E5, [(x, e5_y(x, P), 0.0) for x in real_roots(e5_polynomial(P))], P
    )
    out += _index_branches(
        Family.E6, [(x, 0.0, e6_z(x, P)) for x in real_roots(e6_polynomial(P))], P
    )
    interior = []
    for x in real_roots(interior_polynomial(P)):
        try:
            interior.append((x, *interior_yz(x, P)))
        except DegenerateDenominator as exc:
            warnings.warn(f"E* branch skipped: {exc}", DegenerateBranchWarning, stacklevel=2)
    out += _index_branches(Family.ESTAR, interior, P)
    return out


def residual_bound(eq: Equilibrium, scale: float = 1e-8) -> float:
    return scale * (1.0 + math.sqrt(sum(v * v for v in eq.state)))
