"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is timed on the same inputs under both backends; results are
checked to agree before timings are reported.
"""

import argparse
import json
import timeit

import numpy as np

from subsetspace.kernels import backends


def cases(rng):
    a = rng.uniform(-1, 1, size=(40, 3))
    b = rng.uniform(-1, 1, size=(35, 3))
    P = rng.uniform(-1, 1, size=(101, 6, 2))
    counts = rng.integers(1, 7, size=101)
    pts8 = rng.uniform(-1, 1, size=(8, 2))
    U0 = rng.uniform(-1, 1, size=(1, 5, 2))
    return {
        "hausdorff 40x35 d=3": lambda k: k.hausdorff(a, b, 2.0),
        "pairwise 40 d=3 p=1.5": lambda k: k.pairwise(a, 1.5),
        "hausdorff_matrix 101 sets": lambda k: k.hausdorff_matrix(P, counts, 2.0),
        "two_center k=8 p=2": lambda k: k.two_center(pts8, 2.0)[0],
        "integrate n=5 (to collision)": lambda k: k.integrate(U0, 2.0, 1e-8, 0.1, 10**6, np.inf, False)[0],
    }


def _same(u, v):
    return np.allclose(np.asarray(u, dtype=float), np.asarray(v, dtype=float), rtol=1e-9, atol=1e-12)


def run(repeat=5, number=None):
    impls = backends()
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in cases(rng).items():
        ref = fn(impls["python"])
        row = {"kernel": name}
        for bname, mod in impls.items():
            if bname != "python":
                assert _same(fn(mod), ref), f"{bname} disagrees with python on {name}"
            t = timeit.Timer(lambda: fn(mod))
            num = number or max(1, t.autorange()[0] // 5)
            row[bname] = min(t.repeat(repeat, num)) / num
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results as JSON")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"{'kernel':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for r in rows:
        cy = r.get("cython")
        sp = f"{r['python'] / cy:8.1f}" if cy else "     n/a"
        cys = f"{cy * 1e6:10.1f}us" if cy else "         n/a"
        print(f"{r['kernel']:32s} {r['python'] * 1e6:10.1f}us {cys} {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
