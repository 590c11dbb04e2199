#!/usr/bin/env python3
"""Integrate each preset's initial conditions and write the time series as CSV.

Usage: python3 scripts/reproduce_figures.py [--out DIR] [--t-end T]

For every run the script reports which equilibrium the trajectory settles
on and when. Files are named DIR/<scenario>_<k>.csv with columns t,x,y,z.
"""
import argparse
import time
from pathlib import Path

from ecodyn.config import builtin_preset
from ecodyn.dynamics import IntegratorOptions, integrate_until_converged
from ecodyn.presets import PRESET_INITIAL_CONDITIONS
from ecodyn.report import export, run_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures_data"))
    ap.add_argument("--t-end", type=float, default=1000.0)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for name, inits in sorted(PRESET_INITIAL_CONDITIONS.items()):
        cfg = builtin_preset(name)
        report = run_analysis(cfg)
        targets = [e for e in report.equilibria if e.feasible]
        for k, init in enumerate(inits, start=1):
            t0 = time.perf_counter()
            traj, results = integrate_until_converged(cfg.params, init, targets,
                                                      IntegratorOptions(t_end=args.t_end))
            hit = [(e, r) for e, r in zip(targets, results) if r.converged]
            path = args.out / f"{name}_{k}.csv"
            export(traj, "csv", path)
            where = f"{hit[0][0].label} from t={hit[0][1].t_converged:g}" if hit else "no equilibrium"
            print(f"{name} init={tuple(init)}: {where}, horizon {traj.times[-1]:g}, "
                  f"{time.perf_counter() - t0:.2f} s -> {path}")


if __name__ == "__main__":
    main()
