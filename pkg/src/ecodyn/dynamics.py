"""Adaptive Dormand-Prince 5(4) integration with positivity and boundedness monitors."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Equilibrium
from .errors import NonFiniteState, PositivityViolation, StepSizeUnderflow
from .model import ModelParams, PopulationState, _rhs

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-9
BOUND_EPS = 1e-6

# Dormand-Prince tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# fifth-order minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_FAC_MIN, _FAC_MAX = 0.2, 10.0
_MAX_POSITIVITY_RETRIES = 40


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and output grid.

    ``max_step`` defaults to ``t_end / 100`` and ``output_stride`` to
    ``t_end / 1000``.
    """

    t_end: float = 1000.0
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float | None = None
    output_stride: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be > 0")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError("t_end must be finite and > 0")
        if self.max_step is None:
            object.__setattr__(self, "max_step", self.t_end / 100)
        if self.output_stride is None:
            object.__setattr__(self, "output_stride", self.t_end / 1000)
        if not self.max_step > 0:
            raise ValueError("max_step must be > 0")
        if not self.output_stride > 0:
            raise ValueError("output_stride must be > 0")


@dataclass
class Trajectory:
    """Sampled solution; ``states`` has shape ``(n, 3)``."""

    times: np.ndarray
    states: np.ndarray
    accepted_steps: int = 0
    rejected_steps: int = 0
    min_component: float = 0.0
    sup_omega: float = 0.0
    clamp_events: int = 0

    def __len__(self):
        return len(self.times)

    @property
    def final_state(self) -> PopulationState:
        return PopulationState(*self.states[-1])

    @property
    def omega(self) -> np.ndarray:
        return self.states.sum(axis=1)

    def state_list(self) -> list[PopulationState]:
        return [PopulationState(*row) for row in self.states.tolist()]


@dataclass
class _Stats:
    accepted: int = 0
    rejected: int = 0
    min_component: float = 0.0
    sup_omega: float = 0.0
    clamps: int = 0
    h: float | None = None


def _initial_step(P, y, f, order, rtol, atol, max_step):
    sc = [atol + rtol * abs(v) for v in y]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y, sc)) / 3)
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f, sc)) / 3)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = [v + h0 * dv for v, dv in zip(y, f)]
    f1 = _rhs(*y1, P)
    d2 = math.sqrt(sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f, sc)) / 3) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / (order + 1))
    return min(100 * h0, h1, max_step)


def _output_times(t0, t_end, stride):
    n = int(math.floor((t_end - t0) / stride + 1e-9))
    ts = [t0 + k * stride for k in range(1, n + 1)]
    if not ts or t_end - ts[-1] > 1e-9 * max(1.0, t_end):
        ts.append(t_end)
    else:
        ts[-1] = t_end
    return ts


def _advance(P, t0, y0, t_end, opts, stats):
    """Integrate from ``(t0, y0)`` to ``t_end``; returns sampled times and states (excluding t0)."""
    rtol, atol = opts.rel_tol, opts.abs_tol
    x, y, z = y0
    zero = (x == 0.0, y == 0.0, z == 0.0)
    f1, f2, f3 = _rhs(x, y, z, P)
    h = stats.h or _initial_step(P, (x, y, z), (f1, f2, f3), 5, rtol, atol, opts.max_step)
    err_old = 1e-4
    t = t0
    out_t, out_y = [], []
    targets = _output_times(t0, t_end, opts.output_stride)
    k_out = 0
    positivity_retries = 0

    while k_out < len(targets):
        t_target = targets[k_out]
        h = min(h, opts.max_step)
        h_min = 16 * math.ulp(max(abs(t), 1.0))
        if h < h_min:
            raise StepSizeUnderflow(f"step size {h!r} below minimum at t = {t!r}")
        landing = t + h >= t_target - h_min
        h_try = t_target - t if landing else h

        # stages
        k1x, k1y, k1z = f1, f2, f3
        k2x, k2y, k2z = _rhs(x + h_try * _A21 * k1x, y + h_try * _A21 * k1y,
                             z + h_try * _A21 * k1z, P)
        k3x, k3y, k3z = _rhs(x + h_try * (_A31 * k1x + _A32 * k2x),
                             y + h_try * (_A31 * k1y + _A32 * k2y),
                             z + h_try * (_A31 * k1z + _A32 * k2z), P)
        k4x, k4y, k4z = _rhs(x + h_try * (_A41 * k1x + _A42 * k2x + _A43 * k3x),
                             y + h_try * (_A41 * k1y + _A42 * k2y + _A43 * k3y),
                             z + h_try * (_A41 * k1z + _A42 * k2z + _A43 * k3z), P)
        k5x, k5y, k5z = _rhs(x + h_try * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x),
                             y + h_try * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y),
                             z + h_try * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z), P)
        k6x, k6y, k6z = _rhs(
            x + h_try * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x),
            y + h_try * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y),
            z + h_try * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z), P)
        xn = x + h_try * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
        yn = y + h_try * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        zn = z + h_try * (_B1 * k1z + _B3 * k3z + _B4 * k4z + _B5 * k5z + _B6 * k6z)
        # invariant coordinate planes are held exactly
        if zero[0]:
            xn = 0.0
        if zero[1]:
            yn = 0.0
        if zero[2]:
            zn = 0.0
        k7x, k7y, k7z = _rhs(xn, yn, zn, P)
        ex = h_try * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        ey = h_try * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        ez = h_try * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        sx = atol + rtol * max(abs(x), abs(xn))
        sy = atol + rtol * max(abs(y), abs(yn))
        sz = atol + rtol * max(abs(z), abs(zn))
        err = math.sqrt(((ex / sx) ** 2 + (ey / sy) ** 2 + (ez / sz) ** 2) / 3)

        if not math.isfinite(err):
            stats.rejected += 1
            h = h_try * _FAC_MIN
            if h < h_min:
                raise NonFiniteState(f"non-finite state near t = {t!r}")
            continue

        if err > 1.0:
            stats.rejected += 1
            h = h_try * max(_FAC_MIN, _SAFETY * err ** -0.2)
            continue

        lowest = min(xn, yn, zn)
        if lowest < -CLAMP_TOL:
            # the exact flow keeps the orthant invariant: retry with a smaller step
            stats.rejected += 1
            positivity_retries += 1
            if positivity_retries > _MAX_POSITIVITY_RETRIES:
                raise PositivityViolation(
                    f"component {lowest!r} < -{CLAMP_TOL} at t = {t + h_try!r}"
                )
            h = h_try * 0.5
            continue
        positivity_retries = 0

        if lowest < 0.0:
            stats.min_component = min(stats.min_component, lowest)
            stats.clamps += 1
            log.debug("clamped component %g at t = %g", lowest, t + h_try)
            xn, yn, zn = max(xn, 0.0), max(yn, 0.0), max(zn, 0.0)
            k7x, k7y, k7z = _rhs(xn, yn, zn, P)

        stats.accepted += 1
        t = t_target if landing else t + h_try
        x, y, z = xn, yn, zn
        f1, f2, f3 = k7x, k7y, k7z
        stats.sup_omega = max(stats.sup_omega, x + y + z)

        fac = _SAFETY * max(err, 1e-10) ** -_ALPHA * err_old**_BETA
        fac = min(_FAC_MAX, max(_FAC_MIN, fac))
        err_old = max(err, 1e-4)
        h_next = h_try * fac
        # a step shortened to hit an output time does not shrink the next proposal
        h = max(h_next, h) if landing else h_next

        if landing:
            out_t.append(t)
            out_y.append((x, y, z))
            k_out += 1

    stats.h = h
    return out_t, out_y


def _to_state(init) -> tuple[float, float, float]:
    s = tuple(float(v) for v in init)
    if len(s) != 3:
        raise ValueError("initial state must have three components")
    if not all(math.isfinite(v) for v in s):
        raise NonFiniteState(f"non-finite initial state {s!r}")
    if min(s) < 0:
        raise ValueError(f"initial state must be nonnegative, got {s!r}")
    return s


def integrate(params: ModelParams, init, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate the model from ``init`` over ``[0, opts.t_end]``."""
    opts = opts or IntegratorOptions()
    y0 = _to_state(init)
    stats = _Stats(sup_omega=sum(y0))
    ts, ys = _advance(params, 0.0, y0, opts.t_end, opts, stats)
    return _assemble([0.0] + ts, [y0] + ys, stats)


def _assemble(ts, ys, stats) -> Trajectory:
    return Trajectory(
        times=np.asarray(ts, dtype=float),
        states=np.asarray(ys, dtype=float).reshape(-1, 3),
        accepted_steps=stats.accepted,
        rejected_steps=stats.rejected,
        min_component=stats.min_component,
        sup_omega=stats.sup_omega,
        clamp_events=stats.clamps,
    )


@dataclass(frozen=True)
class BoundednessCheck:
    mu: float
    bound: float
    holds_eventually: bool
    t_entry: float | None


def check_boundedness(traj: Trajectory, mu: float = 1.0) -> BoundednessCheck:
    """Empirical eventual bound on ``x + y + z`` along a trajectory.

    The bound is the maximum of ``omega`` over the second half of the run,
    inflated by a relative ``1e-6``. ``mu`` only labels the estimate. A
    final quarter that grows monotonically without decelerating counts as
    divergence.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if not mu > 0:
        raise ValueError("mu must be > 0")
    omega = traj.omega
    t = traj.times
    n = len(omega)
    bound = float(omega[n // 2:].max()) * (1 + BOUND_EPS)

    above = np.nonzero(omega > bound)[0]
    t_entry = 0.0 if len(above) == 0 else (float(t[above[-1] + 1]) if above[-1] + 1 < n else None)

    tail = omega[(3 * n) // 4:]
    diverging = False
    if len(tail) >= 3:
        half = len(tail) // 2
        g1 = tail[half] - tail[0]
        g2 = tail[-1] - tail[half]
        monotone = bool(np.all(np.diff(tail) > 0))
        scale = max(float(np.abs(tail).max()), 1.0)
        diverging = monotone and g1 > 1e-9 * scale and g2 >= g1 * (1 - 1e-3)

    holds = t_entry is not None and not diverging
    return BoundednessCheck(float(mu), bound, holds, t_entry if holds else None)


def _within(states: np.ndarray, target, tol: float) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    # components of the target that vanish are compared on an absolute scale of 1
    scale = np.maximum(np.abs(target), 1.0)
    return np.all(np.abs(states - target) <= tol * scale, axis=1)


@dataclass(frozen=True)
class ConvergenceResult:
    converged: bool
    t_converged: float | None


def convergence_check(traj: Trajectory, target: Equilibrium, tol: float = 1e-3,
                      trailing_fraction: float = 0.1) -> ConvergenceResult:
    """Whether the trailing part of ``traj`` stays within relative ``tol`` of ``target``.

    ``t_converged`` is the first sample time after which every later sample
    is within tolerance.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if len(traj) == 0:
        return ConvergenceResult(False, None)
    state = target.state if isinstance(target, Equilibrium) else tuple(target)
    ok = _within(traj.states, state, tol)
    bad = np.nonzero(~ok)[0]
    first_good = 0 if len(bad) == 0 else int(bad[-1]) + 1
    n = len(ok)
    trailing = max(1, int(math.ceil(trailing_fraction * n)))
    if first_good >= n or first_good > n - trailing:
        return ConvergenceResult(False, None)
    return ConvergenceResult(True, float(traj.times[first_good]))


def integrate_until_converged(
    params: ModelParams,
    init,
    targets,
    opts: IntegratorOptions | None = None,
    tol: float = 1e-3,
    max_t_end: float = 8000.0,
) -> tuple[Trajectory, list[ConvergenceResult]]:
    """Integrate, doubling the horizon up to ``max_t_end`` until some target is reached.

    ``targets`` is one equilibrium or a sequence of them; one result is
    returned per target. Extensions continue from the last state on the
    same output stride.
    """
    if isinstance(targets, Equilibrium):
        targets = [targets]
    opts = opts or IntegratorOptions()
    y0 = _to_state(init)
    stats = _Stats(sup_omega=sum(y0))
    ts, ys = [0.0], [y0]
    t_end = opts.t_end
    t_prev = 0.0
    while True:
        seg_t, seg_y = _advance(params, t_prev, ys[-1], t_end, opts, stats)
        ts += seg_t
        ys += seg_y
        traj = _assemble(ts, ys, stats)
        results = [convergence_check(traj, tgt, tol) for tgt in targets]
        if any(r.converged for r in results) or not targets or t_end * 2 > max_t_end + 1e-9:
            return traj, results
        t_prev, t_end = t_end, t_end * 2
