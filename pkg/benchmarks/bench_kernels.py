"""Row-reduction kernels: numba versus the pure-numpy fallback.

Each case is timed in a fresh interpreter, once per backend, with the
backend chosen by TDPIR_DISABLE_NUMBA exactly as in normal use.  The numba
timing excludes compilation (one warm-up run on a tiny input first).

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

import argparse
import json
import os
import subprocess
import sys

CASES = {
    # name: (kind, args)
    "affine m=2 q=32 GF(2)": ("affine", (2, 32, 2)),
    "affine m=2 q=64 GF(2)": ("affine", (2, 64, 2)),
    "affine m=3 q=16 GF(2)": ("affine", (3, 16, 2)),
    "affine m=4 q=8 GF(2)": ("affine", (4, 8, 2)),
    "affine m=2 q=27 GF(3)": ("affine", (2, 27, 3)),
    "random 600x400 GF(5)": ("random", (600, 400, 5)),
}
QUICK = ["affine m=2 q=32 GF(2)", "affine m=2 q=27 GF(3)", "random 600x400 GF(5)"]

WORKER = r"""
import json, sys, time
import numpy as np
from tdpir import kernels
from tdpir.design import td_affine
from tdpir.ff import field_new, field_of_order
from tdpir.inccode import design_rank
from tdpir.linalg import rank_p

kind, args, repeat = json.loads(sys.argv[1])

def run():
    if kind == "affine":
        m, q, p = args
        D = td_affine(m, field_of_order(q), streaming=q ** (2 * m - 2) > 1 << 16)
        return design_rank(D, p)
    rows, cols, p = args
    rng = np.random.default_rng(0)
    M = rng.integers(p, size=(rows, cols))
    M[rows // 2:] = (M[: rows - rows // 2] * 2) % p  # half the rows dependent
    return rank_p(M, p)

# warm-up compiles the numba kernels on small inputs
design_rank(td_affine(2, field_of_order(4)), 2)
rank_p(np.eye(3, dtype=np.int64), 3)

times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    r = run()
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": kernels.BACKEND_NAME, "rank": int(r), "best": min(times)}))
"""


def time_case(kind, args, repeat, disable):
    env = dict(os.environ)
    env["TDPIR_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps([kind, args, repeat])],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small cases only")
    ap.add_argument("--json", action="store_true")
    ns = ap.parse_args(argv)

    names = QUICK if ns.quick else list(CASES)
    rows = []
    for name in names:
        kind, args = CASES[name]
        fast = time_case(kind, args, ns.repeat, disable=False)
        slow = time_case(kind, args, ns.repeat, disable=True)
        if fast["rank"] != slow["rank"]:
            raise SystemExit(f"{name}: backends disagree ({fast['rank']} vs {slow['rank']})")
        rows.append({
            "case": name,
            "rank": fast["rank"],
            "numba_s": fast["best"] if fast["backend"] == "numba" else None,
            "numpy_s": slow["best"],
        })

    if ns.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':<26}{'rank':>8}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for r in rows:
        nb = r["numba_s"]
        speed = f"{r['numpy_s'] / nb:8.1f}x" if nb else "      n/a"
        nbs = f"{nb:10.3f}" if nb else "       n/a"
        print(f"{r['case']:<26}{r['rank']:>8}{nbs}{r['numpy_s']:10.3f}{speed}")


if __name__ == "__main__":
    main()
