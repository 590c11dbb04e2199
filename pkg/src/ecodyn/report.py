"""Analysis pipeline, simulation runs and CSV/JSON export."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .config import ScenarioConfig
from .dynamics import (
    ConvergenceResult,
    IntegratorOptions,
    Trajectory,
    check_boundedness,
    integrate_until_converged,
)
from .equilibria import (
    DegenerateBranchWarning,
    Equilibrium,
    EquilibriumFamily,
    Family,
    enumerate_equilibria,
)
from .errors import EcodynError, IntegrationError
from .model import PARAM_NAMES, ModelParams, PopulationState
from .stability import (
    GlobalCheck,
    PersistenceReport,
    RouthHurwitz,
    StabilityReport,
    Verdict,
    classify,
    global_stability_check,
    persistence_conditions,
)

REPORT_KEYS = ("scenario", "params", "equilibria", "stability", "persistence", "notes")


@dataclass
class AnalysisReport:
    scenario: str
    params: ModelParams
    equilibria: list[Equilibrium]
    stability: list[StabilityReport] = field(default_factory=list)
    persistence: PersistenceReport | None = None
    notes: list[str] = field(default_factory=list)
    global_checks: dict[str, GlobalCheck] = field(default_factory=dict)

    def find(self, label: str) -> Equilibrium:
        for e in self.equilibria:
            if e.label == label:
                return e
        raise KeyError(label)

    def stability_of(self, label: str) -> StabilityReport:
        for s in self.stability:
            if s.equilibrium.label == label:
                return s
        raise KeyError(label)


@dataclass
class SimulationResult:
    initial: PopulationState
    trajectory: Trajectory | None
    convergence: dict[str, ConvergenceResult] = field(default_factory=dict)
    stable_targets: tuple[str, ...] = ()
    bounded: bool | None = None
    error: str | None = None

    @property
    def converged_to(self) -> str | None:
        hits = [(r.t_converged, lbl) for lbl, r in self.convergence.items() if r.converged]
        return min(hits)[1] if hits else None


def run_analysis(config: ScenarioConfig) -> AnalysisReport:
    """Equilibria, then stability, global and persistence checks as requested."""
    P = config.params
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateBranchWarning)
        eqs = enumerate_equilibria(P)
    notes += [str(w.message) for w in caught if issubclass(w.category, DegenerateBranchWarning)]

    report = AnalysisReport(config.name, P, eqs, notes=notes)
    feasible = [e for e in eqs if e.feasible]
    if "stability" in config.analyses or "global" in config.analyses:
        for e in feasible:
            try:
                s = classify(e, P)
            except EcodynError as exc:
                notes.append(f"{e.label}: classification failed: {exc}")
                continue
            if s.verdict is Verdict.MARGINAL:
                notes.append(f"{e.label}: marginal verdict (eigenvalue real part within tolerance of 0)")
            report.stability.append(s)
    if "global" in config.analyses:
        for e in feasible:
            if e.tag is Family.ESTAR:
                report.global_checks[e.label] = global_stability_check(
                    e, P, config.x_max, config.n_samples
                )
    if "persistence" in config.analyses:
        report.persistence = persistence_conditions(P, config.gammas, eqs)
    return report


def run_simulation(config: ScenarioConfig, report: AnalysisReport | None = None,
                   tol: float = 1e-3) -> list[SimulationResult]:
    """One trajectory per initial condition, checked against every feasible equilibrium.

    The horizon is doubled (up to 8000) until the trajectory settles on one
    of them.
    """
    if not config.initial_conditions:
        raise ValueError("no initial conditions to simulate")
    if report is None or not report.stability:
        report = run_analysis(config.__class__(
            config.name, config.params, config.initial_conditions, config.integrator,
            frozenset({"equilibria", "stability"}), config.gammas, config.x_max, config.n_samples,
        ))
    targets = [e for e in report.equilibria if e.feasible]
    stable = tuple(s.equilibrium.label for s in report.stability if s.verdict is Verdict.STABLE)
    opts = config.integrator or IntegratorOptions()
    results = []
    for ic in config.initial_conditions:
        try:
            traj, conv = integrate_until_converged(config.params, ic, targets, opts, tol)
        except IntegrationError as exc:
            results.append(SimulationResult(PopulationState(*ic), None, error=f"{type(exc).__name__}: {exc}"))
            continue
        results.append(SimulationResult(
            PopulationState(*ic),
            traj,
            {e.label: r for e, r in zip(targets, conv)},
            stable,
            check_boundedness(traj).holds_eventually,
        ))
    return results


# ---- serialization ------------------------------------------------------------------

def _eq_to_dict(e: Equilibrium) -> dict:
    return {
        "label": e.label,
        "family": e.tag.value,
        "branch_index": e.family.branch_index,
        "x": e.state[0],
        "y": e.state[1],
        "z": e.state[2],
        "feasible": e.feasible,
        "residual": e.residual,
    }


def _eq_from_dict(d: dict) -> Equilibrium:
    return Equilibrium(
        EquilibriumFamily(Family(d["family"]), d["branch_index"]),
        (d["x"], d["y"], d["z"]),
        d["feasible"],
        d["residual"],
    )


def report_to_dict(report: AnalysisReport) -> dict:
    stability = []
    for s in report.stability:
        entry = {
            "label": s.equilibrium.label,
            "eigenvalues": [[v.real, v.imag] for v in s.eigenvalues],
            "verdict": s.verdict.value,
            "routh_hurwitz": s.rh._asdict() if s.rh is not None else None,
            "condition_flags": dict(s.condition_flags),
            "condition_values": dict(s.condition_values),
        }
        g = report.global_checks.get(s.equilibrium.label)
        if g is not None:
            entry["global_stability"] = g._asdict()
        stability.append(entry)
    persistence = None
    if report.persistence is not None:
        pr = report.persistence
        persistence = {
            "cond1": pr.cond1,
            "cond2": pr.cond2,
            "cond3": pr.cond3,
            "cond4": pr.cond4,
            "gammas": list(pr.gammas),
            "pi_values": dict(pr.pi_values),
            "margins": dict(pr.margins),
        }
    return {
        "scenario": report.scenario,
        "params": report.params.as_dict(),
        "equilibria": [_eq_to_dict(e) for e in report.equilibria],
        "stability": stability,
        "persistence": persistence,
        "notes": list(report.notes),
    }


def report_from_dict(d: dict) -> AnalysisReport:
    missing = [k for k in REPORT_KEYS if k not in d]
    if missing:
        raise ValueError(f"report is missing keys {missing}")
    params = ModelParams(**{k: d["params"][k] for k in PARAM_NAMES})
    eqs = [_eq_from_dict(e) for e in d["equilibria"]]
    by_label = {e.label: e for e in eqs}
    stability, global_checks = [], {}
    for s in d["stability"]:
        rh = RouthHurwitz(**s["routh_hurwitz"]) if s["routh_hurwitz"] is not None else None
        stability.append(StabilityReport(
            by_label[s["label"]],
            tuple(complex(re, im) for re, im in s["eigenvalues"]),
            Verdict(s["verdict"]),
            rh,
            dict(s["condition_flags"]),
            dict(s["condition_values"]),
        ))
        if "global_stability" in s:
            global_checks[s["label"]] = GlobalCheck(**s["global_stability"])
    pr = d["persistence"]
    persistence = None
    if pr is not None:
        persistence = PersistenceReport(
            pr["cond1"], pr["cond2"], pr["cond3"], pr["cond4"], tuple(pr["gammas"]),
            dict(pr["pi_values"]), dict(pr["margins"]),
        )
    return AnalysisReport(d["scenario"], params, eqs, stability, persistence,
                          list(d["notes"]), global_checks)


def simulation_to_dict(result: SimulationResult, include_samples: bool = False) -> dict:
    d = {
        "initial": list(result.initial),
        "error": result.error,
        "converged_to": result.converged_to,
        "stable_targets": list(result.stable_targets),
        "bounded": result.bounded,
        "convergence": {k: asdict(r) for k, r in result.convergence.items()},
    }
    tr = result.trajectory
    if tr is not None:
        d.update({
            "t_end": float(tr.times[-1]),
            "final_state": tr.states[-1].tolist(),
            "accepted_steps": tr.accepted_steps,
            "rejected_steps": tr.rejected_steps,
            "min_component": tr.min_component,
            "sup_omega": tr.sup_omega,
        })
        if include_samples:
            d["samples"] = {
                "t": tr.times.tolist(),
                "x": tr.states[:, 0].tolist(),
                "y": tr.states[:, 1].tolist(),
                "z": tr.states[:, 2].tolist(),
            }
    return d


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def trajectory_csv(traj: Trajectory | None) -> str:
    lines = ["t,x,y,z"]
    if traj is not None:
        for t, (x, y, z) in zip(traj.times.tolist(), traj.states.tolist()):
            lines.append(f"{t:.17g},{x:.17g},{y:.17g},{z:.17g}")
    return "\n".join(lines) + "\n"


def equilibria_csv(report: AnalysisReport) -> str:
    verdicts = {s.equilibrium.label: s.verdict.value for s in report.stability}
    lines = ["label,family,branch_index,x,y,z,feasible,residual,verdict"]
    for e in report.equilibria:
        x, y, z = e.state
        lines.append(
            f"{e.label},{e.tag.value},{e.family.branch_index},{x:.17g},{y:.17g},{z:.17g},"
            f"{str(e.feasible).lower()},{e.residual:.17g},{verdicts.get(e.label, '')}"
        )
    return "\n".join(lines) + "\n"


def render(obj, fmt: str) -> str:
    """Text of ``obj`` (report, trajectory or simulation result) in ``csv`` or ``json``."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(obj, AnalysisReport):
        return equilibria_csv(obj) if fmt == "csv" else dumps_json(report_to_dict(obj))
    if isinstance(obj, Trajectory):
        if fmt == "csv":
            return trajectory_csv(obj)
        return dumps_json({"t": obj.times.tolist(), "x": obj.states[:, 0].tolist(),
                           "y": obj.states[:, 1].tolist(), "z": obj.states[:, 2].tolist()})
    if isinstance(obj, SimulationResult):
        if fmt == "csv":
            return trajectory_csv(obj.trajectory)
        return dumps_json(simulation_to_dict(obj, include_samples=True))
    raise TypeError(f"cannot export {type(obj).__name__}")


def export(obj, fmt: str, path) -> None:
    """Write ``obj`` to ``path``; output is byte-identical for identical inputs."""
    text = render(obj, fmt)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def load_report(path) -> AnalysisReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
