#!/usr/bin/env python3
"""Re-solve an SDPA sparse (.dat-s) file with cvxpy and print the optimum.

    min c.x  s.t.  sum_i x_i F_i - F_0 >= 0  (blockwise PSD)

Exit status 0 on success, 3 when cvxpy is missing, 1 otherwise.
"""
import argparse
import re
import sys


def parse(path):
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip() and ln.lstrip()[0] not in '"*']
    tok = lambda s: [t for t in re.split(r"[\s,{}()]+", s) if t]
    m = int(tok(lines[0])[0])
    nblocks = int(tok(lines[1])[0])
    sizes = [int(v) for v in tok(lines[2])[:nblocks]]
    c = [float(v) for v in tok(lines[3])[:m]]
    entries = []
    for ln in lines[4:]:
        f = tok(ln)
        entries.append((int(f[0]), int(f[1]) - 1, int(f[2]) - 1, int(f[3]) - 1, float(f[4])))
    return m, sizes, c, entries


def solve(path, solver):
    try:
        import cvxpy as cp
        import numpy as np
        import scipy.sparse as sp
    except ImportError:
        print("cvxpy not available", file=sys.stderr)
        sys.exit(3)
    m, sizes, c, entries = parse(path)
    x = cp.Variable(m)
    per_block = [[] for _ in sizes]
    for e in entries:
        per_block[e[1]].append(e)
    cons = []
    for b, size in enumerate(sizes):
        s = abs(size)
        rows, cols, vals, const = [], [], [], np.zeros(s * s if size > 0 else s)
        for mat, _, i, j, v in per_block[b]:
            slots = [(i, j)] if size < 0 or i == j else [(i, j), (j, i)]
            for (r, q) in slots:
                pos = r if size < 0 else r + q * s
                if mat == 0:
                    const[pos] -= v
                else:
                    rows.append(pos)
                    cols.append(mat - 1)
                    vals.append(v)
        a = sp.csr_matrix((vals, (rows, cols)), shape=(len(const), m))
        expr = a @ x + const
        if size < 0:
            cons.append(expr >= 0)
        else:
            mat = cp.reshape(expr, (s, s), order="F")
            cons.append(0.5 * (mat + mat.T) >> 0)
    prob = cp.Problem(cp.Minimize(np.array(c) @ x), cons)
    prob.solve(solver=solver)
    return prob.status, prob.value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("file")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()
    status, value = solve(args.file, args.solver)
    print(f"status {status}")
    print(f"objective {value:.12g}")
    return 0 if status == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())
