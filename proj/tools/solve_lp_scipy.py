#!/usr/bin/env python3
"""Solve exported strip models with scipy's HiGHS MILP and write .sol files.

Only understands the subset of the LP format that `mltc compress --solver
lp-export` writes. Usage: solve_lp_scipy.py LP_DIR [SOL_DIR]
"""
import pathlib
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

TERM = re.compile(r"([+-]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_expr(text):
    terms = []
    for sign, coef, name in TERM.findall(text):
        value = float(coef) if coef else 1.0
        terms.append((-value if sign == "-" else value, name))
    return terms


def read_lp(path):
    section, statements, current = None, [], ""
    objective, rows, binary = [], [], set()
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = line.lower()
        if key in ("maximize", "subject to", "bounds", "binary", "end"):
            if current:
                statements.append((section, current))
                current = ""
            section = key
            continue
        if section in ("maximize", "subject to") and ":" in line and current:
            statements.append((section, current))
            current = ""
        if section == "binary":
            binary.add(line)
        elif section in ("maximize", "subject to"):
            current += " " + line
    for section, text in statements:
        body = text.split(":", 1)[1]
        if section == "maximize":
            objective = parse_expr(body)
        else:
            m = re.match(r"(.*?)(<=|>=|=)\s*([-0-9.eE+]+)\s*$", body)
            rows.append((parse_expr(m.group(1)), m.group(2), float(m.group(3))))
    return objective, rows, binary


def solve(path):
    objective, rows, binary = read_lp(path)
    names = sorted({n for _, n in objective} | {n for r in rows for _, n in r[0]} | binary)
    index = {n: i for i, n in enumerate(names)}
    c = np.zeros(len(names))
    for v, n in objective:
        c[index[n]] -= v
    a = np.zeros((len(rows), len(names)))
    lo, hi = [], []
    for k, (terms, sense, rhs) in enumerate(rows):
        for v, n in terms:
            a[k, index[n]] += v
        lo.append(rhs if sense in ("=", ">=") else -np.inf)
        hi.append(rhs if sense in ("=", "<=") else np.inf)
    integrality = np.array([1 if n in binary else 0 for n in names])
    upper = np.array([1.0 if n in binary else np.inf for n in names])
    constraints = [LinearConstraint(a, lo, hi)] if rows else []
    result = milp(c, constraints=constraints, integrality=integrality,
                  bounds=Bounds(np.zeros(len(names)), upper))
    if result.x is None:
        raise SystemExit(f"{path}: {result.message}")
    return result.status == 0, dict(zip(names, result.x))


def main():
    lp_dir = pathlib.Path(sys.argv[1])
    sol_dir = pathlib.Path(sys.argv[2]) if len(sys.argv) > 2 else lp_dir
    sol_dir.mkdir(parents=True, exist_ok=True)
    for lp in sorted(lp_dir.glob("meshlet_*.lp")):
        optimal, values = solve(lp)
        with open(sol_dir / (lp.stem + ".sol"), "w") as out:
            if optimal:
                out.write("# optimal\n")
            for name, value in values.items():
                out.write(f"{name} {round(value) if name.startswith('x') else value:.17g}\n")


if __name__ == "__main__":
    main()
