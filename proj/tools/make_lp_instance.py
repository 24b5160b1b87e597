#!/usr/bin/env python3
"""Write a synthetic banded LP in free MPS format.

The defaults mimic the shape of Netlib's bandm (305 equality rows, 472
columns, roughly 2500 constraint nonzeros in a staircase band), which is
what tests/data/bandm_style.mps was produced with:

    python3 tools/make_lp_instance.py --out tests/data/bandm_style.mps

Only numpy is required. The constraint matrix is checked for full row rank
before writing, since the least-norm transform needs it.
"""

import argparse

import numpy as np


def build(rows, cols, band, per_col, seed):
    rng = np.random.default_rng(seed)
    a = np.zeros((rows, cols))
    for j in range(cols):
        center = int(j * rows / cols)
        lo, hi = max(0, center - band), min(rows, center + band + 1)
        k = int(rng.integers(per_col - 2, per_col + 3))
        picked = rng.choice(np.arange(lo, hi), size=min(k, hi - lo), replace=False)
        for i in picked:
            if rng.random() < 0.4:
                a[i, j] = rng.choice([-1.0, 1.0])
            else:
                a[i, j] = round(float(rng.uniform(-5.0, 5.0)), 4) or 1.0
    # Every row needs at least two entries.
    for i in range(rows):
        while np.count_nonzero(a[i]) < 2:
            a[i, int(rng.integers(cols))] = round(float(rng.uniform(0.5, 3.0)), 4)
    b = np.where(rng.random(rows) < 0.3, np.round(rng.uniform(-50, 50, rows), 3), 0.0)
    c = np.round(rng.uniform(0, 10, cols), 3)
    return a, b, c


def write_mps(path, name, a, b, c):
    rows, cols = a.shape
    with open(path, "w") as out:
        out.write(f"* synthetic banded LP, {rows} equality rows x {cols} columns\n")
        out.write(f"NAME          {name}\n")
        out.write("ROWS\n N  COST\n")
        for i in range(rows):
            out.write(f" E  R{i:04d}\n")
        out.write("COLUMNS\n")
        for j in range(cols):
            entries = [("COST", c[j])] + [(f"R{i:04d}", a[i, j]) for i in np.nonzero(a[:, j])[0]]
            for t in range(0, len(entries), 2):
                pair = entries[t:t + 2]
                line = f"    C{j:04d}" + "".join(f"  {r:<8s}  {v:.10g}" for r, v in pair)
                out.write(line + "\n")
        out.write("RHS\n")
        for i in np.nonzero(b)[0]:
            out.write(f"    RHS       R{i:04d}  {b[i]:.10g}\n")
        out.write("BOUNDS\n")
        out.write(f" UP BND       C0000  100\n")
        out.write("ENDATA\n")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=305)
    p.add_argument("--cols", type=int, default=472)
    p.add_argument("--band", type=int, default=10)
    p.add_argument("--per-col", type=int, default=5)
    p.add_argument("--seed", type=int, default=20180)
    p.add_argument("--name", default="BANDMSTY")
    p.add_argument("--out", required=True)
    args = p.parse_args()

    seed = args.seed
    while True:
        a, b, c = build(args.rows, args.cols, args.band, args.per_col, seed)
        if np.linalg.matrix_rank(a) == args.rows:
            break
        seed += 1
    write_mps(args.out, args.name, a, b, c)
    print(f"{args.out}: {args.rows} x {args.cols}, {np.count_nonzero(a)} nonzeros, seed {seed}")


if __name__ == "__main__":
    main()
