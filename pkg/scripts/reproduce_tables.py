#!/usr/bin/env python3
"""Print every equilibrium of the four preset scenarios with its stability verdict.

Usage: python3 scripts/reproduce_tables.py [--out DIR]

With --out, one CSV per scenario is written as DIR/<scenario>_equilibria.csv.
"""
import argparse
from pathlib import Path

from ecodyn.config import builtin_preset
from ecodyn.presets import PRESET_PARAMS
from ecodyn.report import equilibria_csv, run_analysis


def table(report) -> str:
    verdicts = {s.equilibrium.label: s.verdict.value for s in report.stability}
    lines = [f"scenario {report.scenario}",
             f"  {'label':<9}{'x':>18}{'y':>18}{'z':>18}  feasible  verdict"]
    for e in report.equilibria:
        x, y, z = e.state
        lines.append(f"  {e.label:<9}{x:>18.10g}{y:>18.10g}{z:>18.10g}  {str(e.feasible):<8}  "
                     f"{verdicts.get(e.label, '-')}")
    p = report.persistence
    lines.append(f"  persistence: cond1={p.cond1} cond2={p.cond2} cond3={p.cond3} cond4={p.cond4}")
    lines.extend(f"  note: {n}" for n in report.notes)
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, help="directory for per-scenario CSV files")
    args = ap.parse_args()
    for name in sorted(PRESET_PARAMS):
        report = run_analysis(builtin_preset(name))
        print(table(report))
        print()
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            with open(args.out / f"{name}_equilibria.csv", "w", newline="\n") as fh:
                fh.write(equilibria_csv(report))


if __name__ == "__main__":
    main()
