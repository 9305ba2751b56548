"""Compare the compiled and the numpy monodromy kernels.

    python benchmarks/bench_kernel.py [--lams 2000] [--steps 1024] [--repeat 3]

Two workloads are timed: a wide batch of lambdas (band scans, surface
inversion) and a single lambda (one root-finder iteration), where the
numpy fallback switches to a pairwise product over the steps.

Both kernels are imported directly, so the comparison does not depend on
HILLGRAPH_PURE_PYTHON.  Prints the timings, the speed-up and the largest
difference between the two results.
"""

import argparse
import math
import time

import numpy as np

from hillgraph import _kernel_py
from hillgraph.potential import Potential

try:
    from hillgraph import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None


def make_grid(n_steps):
    q = Potential.cosine(3.0, 1)
    x = np.linspace(0.0, 1.0, n_steps + 1)
    h = np.diff(x)
    q1 = q.evaluate(x[:-1] + (0.5 - math.sqrt(3.0) / 6.0) * h)
    q2 = q.evaluate(x[:-1] + (0.5 + math.sqrt(3.0) / 6.0) * h)
    return h, q1, q2


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lams", type=int, default=2000)
    ap.add_argument("--steps", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    h, q1, q2 = make_grid(args.steps)
    for n_lams in (args.lams, 1):
        run(h, q1, q2, np.linspace(-3.0, 400.0, n_lams) if n_lams > 1 else np.array([37.0]), args)


def run(h, q1, q2, lams, args):
    print(f"{lams.size} lambda(s) x {h.size} Magnus steps, best of {args.repeat}")
    for angles in (True, False):
        t_py, r_py = best_of(lambda: _kernel_py.magnus_transfer(h, q1, q2, lams, angles), args.repeat)
        line = f"  angles={str(angles):5}  numpy {t_py * 1e3:8.1f} ms"
        if _compiled is not None:
            t_cy, r_cy = best_of(lambda: _compiled.magnus_transfer(h, q1, q2, lams, angles), args.repeat)
            cols = slice(None) if angles else slice(0, 4)
            diff = np.max(np.abs(r_py[:, cols] - r_cy[:, cols]) / np.maximum(1.0, np.abs(r_cy[:, cols])))
            line += f"  cython {t_cy * 1e3:8.1f} ms  speed-up {t_py / t_cy:5.1f}x  max rel diff {diff:.1e}"
        else:
            line += "  (compiled kernel not built)"
        print(line)


if __name__ == "__main__":
    main()
