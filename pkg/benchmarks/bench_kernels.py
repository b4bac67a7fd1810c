"""Wall-clock comparison of the numba and numpy enumeration backends.

Run:  python benchmarks/bench_kernels.py [--repeat 3]
Each backend runs in a fresh subprocess so GAMMA14_BACKEND is read cleanly; the
first numba call (compilation or cache load) is timed separately.
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, time
import numpy as np
from gamma14 import _kernels
from gamma14.oracle import CRITICAL_FORMS, integer_model

M, p, q, s = integer_model(CRITICAL_FORMS["Q1"].instance())
Z = np.array([[0, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, -2, 1, 0], [0, 0, 1, -2, 1], [0, 0, 0, 1, -4]])
cases = {
    "box_min Q1 |x|<=4": lambda: _kernels.box_min(M, p, q, 4, 64),
    "box_min Q1 |x|<=6": lambda: _kernels.box_min(M, p, q, 6, 64),
    "zero_shell r=6": lambda: _kernels.zero_shell(Z, 6, 256),
    "shell_hits Q1 r=5": lambda: _kernels.shell_hits(M, p, q, 5, 4 * int(s) * q * q, 4096),
}
t0 = time.perf_counter(); cases["box_min Q1 |x|<=4"](); first = time.perf_counter() - t0
out = {"backend": _kernels.backend(), "first_call": first, "cases": {}}
for name, fn in cases.items():
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    out["cases"][name] = best
print(json.dumps(out))
"""


def run(backend: str, repeat: int) -> dict:
    env = dict(os.environ, GAMMA14_BACKEND=backend)
    code = CHILD.replace("REPEAT", str(repeat))
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    nb, npy = run("numba", args.repeat), run("numpy", args.repeat)
    print(f"{'case':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name in nb["cases"]:
        a, b = nb["cases"][name], npy["cases"][name]
        print(f"{name:<22}{a:>10.4f}{b:>10.4f}{b / a:>9.1f}x")
    print(f"first numba call (compile or cache load): {nb['first_call']:.2f} s")


if __name__ == "__main__":
    main()
