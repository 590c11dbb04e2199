"""Shared record of acceptance outcomes, printed in the terminal summary."""

RESULTS: list[tuple[int, str, bool, str]] = []

TITLES = {
    1: "equilibrium tables",
    2: "Routh-Hurwitz coefficients for S1",
    3: "E5/E6 condition values for S3",
    4: "trajectory convergence",
    5: "equilibrium residuals over random sweep",
    6: "Jacobian against finite differences",
    7: "eigenvalue trace/determinant identities",
    8: "boundary equilibria always unstable",
    9: "positivity and invariant planes",
    10: "Routh-Hurwitz agrees with eigenvalues",
    11: "persistence arithmetic",
    12: "Lyapunov form regression",
}


def check(n: int, part: str, ok: bool, detail: str = "") -> None:
    RESULTS.append((n, part, bool(ok), detail))
    assert ok, f"criterion {n} [{part}]: {detail}"


def summary_lines() -> list[str]:
    lines = []
    for n, title in TITLES.items():
        rows = [r for r in RESULTS if r[0] == n]
        if not rows:
            lines.append(f"criterion {n:2d} NOT RUN  {title}")
            continue
        bad = [r for r in rows if not r[2]]
        status = "PASS" if not bad else "FAIL"
        extra = "; ".join(f"{r[1]}: {r[3]}" for r in bad)
        lines.append(f"criterion {n:2d} {status}  {title} ({len(rows) - len(bad)}/{len(rows)} checks)"
                     + (f"  failing {extra}" if extra else ""))
    return lines
