#!/usr/bin/env python3
"""MILP solve driver: reads an MPS file, solves with scipy's HiGHS backend and
writes a plain-text solution file.

Usage: solve_milp.py MODEL.mps OUT.sol [--gap G] [--time-limit S] [--threads N]
       solve_milp.py --probe
"""

import argparse
import sys
import time


def parse_mps(path):
    """Parses the MPS subset this project emits (and standard fixed MPS)."""
    rows = []           # (name, sense)
    row_index = {}
    obj_row = None
    cols = {}           # name -> {row_name: coeff}
    col_order = []
    integrality = {}
    rhs = {}
    bounds = {}         # name -> [lo, hi]
    obj_offset = 0.0

    section = None
    integer_mode = False
    with open(path) as fh:
        for raw in fh:
            if not raw.strip() or raw.startswith("*"):
                continue
            if not raw[0].isspace():
                section = raw.split()[0].upper()
                continue
            fields = raw.split()
            if section == "ROWS":
                sense, name = fields[0].upper(), fields[1]
                if sense == "N":
                    if obj_row is None:
                        obj_row = name
                    continue
                row_index[name] = len(rows)
                rows.append((name, sense))
            elif section == "COLUMNS":
                if len(fields) >= 3 and fields[1].strip("'\"").upper() == "MARKER":
                    marker = fields[2].strip("'\"").upper()
                    integer_mode = marker == "INTORG"
                    continue
                name = fields[0]
                if name not in cols:
                    cols[name] = {}
                    col_order.append(name)
                    integrality[name] = 1 if integer_mode else 0
                for i in range(1, len(fields) - 1, 2):
                    cols[name][fields[i]] = float(fields[i + 1])
            elif section == "RHS":
                for i in range(1, len(fields) - 1, 2):
                    if fields[i] == obj_row:
                        obj_offset = -float(fields[i + 1])
                    else:
                        rhs[fields[i]] = float(fields[i + 1])
            elif section == "BOUNDS":
                btype = fields[0].upper()
                name = fields[2]
                if name not in bounds:
                    bounds[name] = [0.0, float("inf")]
                if btype == "LO":
                    bounds[name][0] = float(fields[3])
                elif btype == "UP":
                    bounds[name][1] = float(fields[3])
                    if bounds[name][1] < 0 and bounds[name][0] == 0.0:
                        bounds[name][0] = float("-inf")
                elif btype == "FX":
                    bounds[name] = [float(fields[3])] * 2
                elif btype == "FR":
                    bounds[name] = [float("-inf"), float("inf")]
                elif btype == "MI":
                    bounds[name][0] = float("-inf")
                elif btype == "PL":
                    bounds[name][1] = float("inf")
                elif btype == "BV":
                    bounds[name] = [0.0, 1.0]
                    integrality[name] = 1
            elif section in (None, "NAME", "RANGES", "ENDATA"):
                continue
    return {
        "rows": rows,
        "row_index": row_index,
        "obj_row": obj_row,
        "cols": cols,
        "col_order": col_order,
        "integrality": integrality,
        "rhs": rhs,
        "bounds": bounds,
        "obj_offset": obj_offset,
    }


def solve(model, gap, time_limit):
    import numpy as np
    from scipy.optimize import LinearConstraint, Bounds, milp
    from scipy.sparse import lil_matrix

    n = len(model["col_order"])
    m = len(model["rows"])
    col_pos = {name: j for j, name in enumerate(model["col_order"])}

    c = np.zeros(n)
    a = lil_matrix((m, n))
    lb = np.full(m, -np.inf)
    ub = np.full(m, np.inf)
    for i, (rname, sense) in enumerate(model["rows"]):
        b = model["rhs"].get(rname, 0.0)
        if sense == "L":
            ub[i] = b
        elif sense == "G":
            lb[i] = b
        else:
            lb[i] = ub[i] = b
    for cname, entries in model["cols"].items():
        j = col_pos[cname]
        for rname, coeff in entries.items():
            if rname == model["obj_row"]:
                c[j] = coeff
            else:
                a[model["row_index"][rname], j] = coeff

    vlo = np.zeros(n)
    vhi = np.full(n, np.inf)
    for name, (lo, hi) in model["bounds"].items():
        j = col_pos[name]
        vlo[j], vhi[j] = lo, hi
    integ = np.array([model["integrality"][name] for name in model["col_order"]])

    t0 = time.time()
    constraints = [LinearConstraint(a.tocsr(), lb, ub)] if m else []
    res = milp(
        c,
        constraints=constraints,
        integrality=integ,
        bounds=Bounds(vlo, vhi),
        options={"mip_rel_gap": gap, "time_limit": time_limit, "presolve": True},
    )
    seconds = time.time() - t0
    return res, seconds


def main():
    if "--probe" in sys.argv:
        try:
            import numpy  # noqa: F401
            import scipy.optimize  # noqa: F401

            if not hasattr(scipy.optimize, "milp"):
                return 1
        except ImportError:
            return 1
        return 0

    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("sol")
    ap.add_argument("--gap", type=float, default=0.01)
    ap.add_argument("--time-limit", type=float, default=600.0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    model = parse_mps(args.mps)
    res, seconds = solve(model, args.gap, args.time_limit)

    # scipy/HiGHS status codes: 0 optimal, 1 iteration/time limit, 2 infeasible,
    # 3 unbounded, 4 other.
    have_x = res.x is not None
    if res.status == 0:
        status = "optimal"
    elif res.status == 1 and have_x:
        status = "timeout_with_incumbent"
    elif res.status == 1:
        status = "timeout_no_solution"
    elif res.status == 2:
        status = "infeasible"
    elif res.status == 3:
        print("model unbounded", file=sys.stderr)
        return 3
    elif have_x:
        status = "timeout_with_incumbent"
    else:
        status = "timeout_no_solution"

    gap = getattr(res, "mip_gap", None)
    if gap is None or gap != gap:
        gap = 0.0 if status == "optimal" else float("inf")

    with open(args.sol, "w") as out:
        out.write(f"status {status}\n")
        out.write(f"seconds {seconds:.6f}\n")
        if have_x:
            obj = float(res.fun) + model["obj_offset"]
            out.write(f"objective {obj:.17g}\n")
            out.write(f"gap {gap:.17g}\n")
            out.write(f"columns {len(model['col_order'])}\n")
            for name, value in zip(model["col_order"], res.x):
                out.write(f"{name} {value:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
