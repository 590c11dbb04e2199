"""Local stability, closed-form stability conditions, Lyapunov minors and persistence."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .equilibria import Equilibrium, Family, enumerate_equilibria
from .errors import EigenFailure, WrongFamily
from .model import ModelParams, jacobian, per_capita_rates

TOL_EIG = 1e-7
# conditions 3 and 4(b) vanish identically at an exact equilibrium; a margin
# must clear rounding noise on the scale of a1 to count as satisfied
TOL_MARGIN = 1e-12


class Verdict(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


class RouthHurwitz(NamedTuple):
    A1: float
    A2: float
    A3: float
    A1A2_minus_A3: float
    satisfied: bool


class ConditionCheck(NamedTuple):
    """Both sides of the two planar-equilibrium stability inequalities."""

    lhs1: float
    rhs1: float
    lhs2: float
    rhs2: float
    holds: bool


@dataclass(frozen=True)
class StabilityReport:
    equilibrium: Equilibrium
    eigenvalues: tuple[complex, complex, complex]
    verdict: Verdict
    rh: RouthHurwitz | None = None
    condition_flags: dict[str, bool] = field(default_factory=dict)
    condition_values: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class LyapunovForm:
    x: float
    A: float
    B: float
    C: float
    F: float
    G: float
    H: float
    P1: float
    P2: float
    P3: float

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.A, self.H, self.G], [self.H, self.B, self.F], [self.G, self.F, self.C]]
        )


@dataclass(frozen=True)
class PersistenceReport:
    """Persistence conditions 1-4 and the average-Lyapunov values.

    ``cond3``/``cond4`` are None when no feasible E5/E6 branch exists.
    """

    cond1: bool
    cond2: bool
    cond3: bool | None
    cond4: bool | None
    gammas: tuple[float, float, float]
    pi_values: dict[str, float] = field(default_factory=dict)
    margins: dict[str, float] = field(default_factory=dict)

    @property
    def persistent(self) -> bool:
        return any(c is True for c in (self.cond1, self.cond2, self.cond3, self.cond4))


def verdict_from_eigenvalues(eigenvalues, tol: float = TOL_EIG) -> Verdict:
    re = [complex(v).real for v in eigenvalues]
    if all(r < -tol for r in re):
        return Verdict.STABLE
    if any(r > tol for r in re):
        return Verdict.UNSTABLE
    return Verdict.MARGINAL


def eigenvalues(state, params: ModelParams) -> tuple[complex, complex, complex]:
    J = jacobian(state, params)
    try:
        ev = np.linalg.eigvals(J)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise EigenFailure(f"non-finite eigenvalues at {tuple(state)}")
    # ascending real part, then imaginary part, for reproducible ordering
    return tuple(sorted((complex(v) for v in ev), key=lambda c: (c.real, c.imag)))


def _require(eq: Equilibrium, tag: Family):
    if eq.tag is not tag:
        raise WrongFamily(f"expected {tag.value}, got {eq.tag.value}")


def e5_conditions(eq: Equilibrium, params: ModelParams) -> ConditionCheck:
    """Prey self-limitation (i) and infected-invasion (ii) inequalities at E5."""
    _require(eq, Family.E5)
    x, y, _ = eq.state
    P = params
    D = x * x + P.k1
    lhs1 = P.b1 * x + P.c1 * x * y / D
    rhs1 = 2 * P.c1 * x**3 * y / D**2
    lhs2 = P.c3 * y / (x + P.k2)
    rhs2 = P.theta * y + P.a3
    return ConditionCheck(lhs1, rhs1, lhs2, rhs2, lhs1 > rhs1 and lhs2 > rhs2)


def e6_conditions(eq: Equilibrium, params: ModelParams) -> ConditionCheck:
    """Prey self-limitation (i) and susceptible-invasion (ii) inequalities at E6."""
    _require(eq, Family.E6)
    x, _, z = eq.state
    P = params
    D = x * x + P.k1
    pc1 = P.p * P.c1
    lhs1 = P.b1 * x + pc1 * x * z / D
    rhs1 = 2 * pc1 * x**3 * z / D**2
    lhs2 = P.c2 * z / (x + P.k2) + P.theta * z
    rhs2 = P.a2
    return ConditionCheck(lhs1, rhs1, lhs2, rhs2, lhs1 > rhs1 and lhs2 > rhs2)


def routh_hurwitz_coefficients(J: np.ndarray) -> RouthHurwitz:
    """Coefficients of ``l^3 + A1 l^2 + A2 l + A3`` for the 3x3 matrix ``J``."""
    (m11, m12, m13), (m21, m22, m23), (m31, m32, m33) = J.tolist()
    A1 = -m11 - m22 - m33
    A2 = (m11 * m22 + m11 * m33 + m22 * m33
          - m13 * m31 - m23 * m32 - m21 * m12)
    A3 = (m11 * m23 * m32 + m12 * m21 * m33 + m13 * m22 * m31
          - m11 * m22 * m33 - m12 * m23 * m31 - m13 * m21 * m32)
    d = A1 * A2 - A3
    return RouthHurwitz(A1, A2, A3, d, A1 > 0 and A3 > 0 and d > 0)


def routh_hurwitz(eq: Equilibrium, params: ModelParams) -> RouthHurwitz:
    _require(eq, Family.ESTAR)
    return routh_hurwitz_coefficients(jacobian(eq.state, params))


def classify(eq: Equilibrium, params: ModelParams) -> StabilityReport:
    """Eigenvalue verdict at ``eq`` plus the family-specific condition checks."""
    ev = eigenvalues(eq.state, params)
    verdict = verdict_from_eigenvalues(ev)
    flags: dict[str, bool] = {}
    values: dict[str, float] = {}
    rh = None
    if eq.tag in (Family.E5, Family.E6):
        check = (e5_conditions if eq.tag is Family.E5 else e6_conditions)(eq, params)
        flags = {
            "condition_i": check.lhs1 > check.rhs1,
            "condition_ii": check.lhs2 > check.rhs2,
            "holds": check.holds,
        }
        values = {k: v for k, v in check._asdict().items() if k != "holds"}
    elif eq.tag is Family.ESTAR:
        rh = routh_hurwitz(eq, params)
        flags = {"routh_hurwitz": rh.satisfied}
    return StabilityReport(eq, ev, verdict, rh, flags, values)


def lyapunov_form(x: float, e_star: Equilibrium, params: ModelParams) -> LyapunovForm:
    """Entries and leading principal minors of the quadratic form bounding ``-dL/dt``."""
    _require(e_star, Family.ESTAR)
    xs, ys, zs = e_star.state
    P = params
    Ds = xs * xs + P.k1
    D = x * x + P.k1
    E = x + P.k2
    Es = xs + P.k2
    A = P.b1 - P.c1 * (ys + P.p * zs) * (x * xs - P.k1) / (Ds * D)
    B = P.c2 / E
    C = P.c3 / E
    F = (P.c2 + P.c3) / (2 * E)
    H = 0.5 * (P.c1 * x / D - P.c2 * (ys + zs) / (Es * E))
    G = 0.5 * (P.p * P.c1 * x / D - P.c3 * (ys + zs) / (Es * E))
    P2 = A * B - H * H
    P3 = C * P2 + G * (F * H - B * G) + F * (G * H - A * F)
    return LyapunovForm(x, A, B, C, F, G, H, A, P2, P3)


class GlobalCheck(NamedTuple):
    holds_on_grid: bool
    first_failure_x: float | None


def global_stability_check(
    e_star: Equilibrium,
    params: ModelParams,
    x_max: float | None = None,
    n_samples: int = 1000,
) -> GlobalCheck:
    """Test ``P1, P2, P3 > 0`` on a uniform grid of prey densities in ``[0, x_max]``.

    ``x_max`` defaults to the prey carrying capacity ``a1/b1``. A single
    sample evaluates the form at the equilibrium's own prey density.
    """
    _require(e_star, Family.ESTAR)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if n_samples == 1:
        grid = [e_star.state[0]]
    else:
        x_max = params.carrying_capacity if x_max is None else x_max
        if not x_max > 0:
            raise ValueError("x_max must be > 0")
        grid = np.linspace(0.0, x_max, n_samples).tolist()
    for x in grid:
        q = lyapunov_form(x, e_star, params)
        if not (q.P1 > 0 and q.P2 > 0 and q.P3 > 0):
            return GlobalCheck(False, float(x))
    return GlobalCheck(True, None)


def average_lyapunov_pi(state, params: ModelParams, gammas=(1.0, 1.0, 1.0)) -> float:
    """Logarithmic derivative of ``x^g1 y^g2 z^g3`` along the flow."""
    g1, g2, g3 = gammas
    if not (g1 > 0 and g2 > 0 and g3 > 0):
        raise ValueError(f"weights must be positive, got {gammas!r}")
    r1, r2, r3 = per_capita_rates(state, params)
    return g1 * r1 + g2 * r2 + g3 * r3


def persistence_conditions(
    params: ModelParams,
    gammas=(1.0, 1.0, 1.0),
    equilibria: list[Equilibrium] | None = None,
) -> PersistenceReport:
    P = params
    if equilibria is None:
        equilibria = enumerate_equilibria(P)
    gammas = tuple(float(g) for g in gammas)

    margins = {
        "cond1": P.a2 * P.c3 / P.a3 - (P.c2 + P.k2 * P.theta),
        "cond2": P.a3 * P.c2 - P.a2 * P.c3,
    }
    cond1 = margins["cond1"] > 0
    cond2 = margins["cond2"] > 0

    e5 = [e for e in equilibria if e.tag is Family.E5 and e.feasible]
    e6 = [e for e in equilibria if e.tag is Family.E6 and e.feasible]

    cond3 = None
    if e5:
        cond3 = cond2
        for e in e5:
            x5 = e.state[0]
            m = P.a1 - (P.b1 * x5 + P.a2 * P.c1 * x5 * (P.k2 + x5) / (P.c2 * (P.k1 + x5 * x5)))
            margins[f"cond3[{e.label}]"] = m
            cond3 = cond3 and m > TOL_MARGIN * P.a1
    cond4 = None
    if e6:
        cond4 = True
        for e in e6:
            x6 = e.state[0]
            m_a = P.a2 * P.c3 / P.a3 - (P.c2 + (P.k2 + x6) * P.theta)
            m_b = P.a1 * P.c3 * (P.k1 + x6 * x6) - x6 * (
                P.a3 * P.c1 * P.p * (P.k2 + x6) + P.b1 * P.c3 * (P.k1 + x6 * x6)
            )
            margins[f"cond4a[{e.label}]"] = m_a
            margins[f"cond4b[{e.label}]"] = m_b
            cond4 = cond4 and m_a > 0 and m_b > TOL_MARGIN * P.a1 * P.c3 * (P.k1 + x6 * x6)

    pi_values = {
        e.label: average_lyapunov_pi(e.state, P, gammas)
        for e in equilibria
        if e.feasible and e.tag is not Family.ESTAR
    }
    return PersistenceReport(cond1, cond2, cond3, cond4, gammas, pi_values, margins)

