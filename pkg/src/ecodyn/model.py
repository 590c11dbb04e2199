"""Parameters, state types, vector field and Jacobian of the eco-epidemic model.

Prey ``x`` grows logistically and is consumed through a Holling type III
response; susceptible (``y``) and infected (``z``) predators follow a
Leslie-Gower law with alternative food ``k2`` and mass-action infection
``theta * y * z``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

PARAM_NAMES = ("a1", "a2", "a3", "b1", "c1", "c2", "c3", "theta", "k1", "k2", "p")


@dataclass(frozen=True)
class ModelParams:
    """The eleven model constants.

    All are strictly positive, ``p`` is at most 1 and ``a2 >= a3``.
    """

    a1: float
    a2: float
    a3: float
    b1: float
    c1: float
    c2: float
    c3: float
    theta: float
    k1: float
    k2: float
    p: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{f.name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{f.name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if self.p > 1:
            raise ValidationError(f"p must lie in (0, 1], got {self.p!r}")
        if self.a2 < self.a3:
            raise ValidationError(f"a2 >= a3 required, got a2={self.a2!r} < a3={self.a3!r}")

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @property
    def carrying_capacity(self) -> float:
        return self.a1 / self.b1


class PopulationState(NamedTuple):
    x: float
    y: float
    z: float


class DerivativeVector(NamedTuple):
    dx: float
    dy: float
    dz: float


def rhs(state, params: ModelParams) -> DerivativeVector:
    """Evaluate ``(f1, f2, f3)`` at ``state``."""
    x, y, z = (float(v) for v in state)
    return DerivativeVector(*_rhs(x, y, z, params))


def _rhs(x, y, z, P):
    hol = x * x / (P.k1 + x * x)
    lg = (y + z) / (P.k2 + x)
    f1 = P.a1 * x - P.b1 * x * x - P.c1 * hol * y - P.p * P.c1 * hol * z
    f2 = P.a2 * y - P.c2 * y * lg - P.theta * y * z
    f3 = P.theta * y * z + P.a3 * z - P.c3 * z * lg
    return f1, f2, f3


def per_capita_rates(state, params: ModelParams) -> tuple[float, float, float]:
    """Per-capita growth rates ``f1/x, f2/y, f3/z`` written without division.

    Well defined on the coordinate planes, where the corresponding density is 0.
    """
    x, y, z = (float(v) for v in state)
    P = params
    d1 = x * x + P.k1
    d2 = x + P.k2
    g1 = P.a1 - P.b1 * x - P.c1 * x * y / d1 - P.p * P.c1 * x * z / d1
    g2 = P.a2 - P.c2 * (y + z) / d2 - P.theta * z
    g3 = P.a3 - P.c3 * (y + z) / d2 + P.theta * y
    return g1, g2, g3


def jacobian(state, params: ModelParams) -> np.ndarray:
    """Analytic 3x3 Jacobian ``m[i][j] = d f_i / d u_j`` at ``state``."""
    x, y, z = (float(v) for v in state)
    P = params
    D = x * x + P.k1
    E = x + P.k2
    c1, pc1 = P.c1, P.p * P.c1
    m11 = (
        P.a1
        - 2 * P.b1 * x
        - 2 * c1 * x * y / D
        + 2 * c1 * x**3 * y / D**2
        - 2 * pc1 * x * z / D
        + 2 * pc1 * x**3 * z / D**2
    )
    m12 = -c1 * x * x / D
    m13 = -pc1 * x * x / D
    m21 = P.c2 * y * (y + z) / E**2
    m22 = P.a2 - P.c2 * (2 * y + z) / E - P.theta * z
    m23 = -P.c2 * y / E - P.theta * y
    m31 = P.c3 * z * (y + z) / E**2
    m32 = P.theta * z - P.c3 * z / E
    m33 = P.theta * y + P.a3 - P.c3 * (y + 2 * z) / E
    return np.array([[m11, m12, m13], [m21, m22, m23], [m31, m32, m33]])
