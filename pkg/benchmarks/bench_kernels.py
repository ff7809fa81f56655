"""Compare the compiled and pure-Python kernel backends on corner-sized problems.

Run with ``python benchmarks/bench_kernels.py [--m 1000] [--repeat 5]``.
"""

import argparse
import time

import numpy as np

from strengthci import _kernels_py
from strengthci.airy import TransitionSimConfig, draw_corner
from strengthci.rmt import RngStream

try:
    from strengthci import _kernels
except ImportError:
    _kernels = None


def _time(func, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=1_000_000)
    parser.add_argument("--m", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    cfg = TransitionSimConfig(N=args.n, corner_m=args.m, mc=100)
    draw = draw_corner(cfg, RngStream(0, 0))
    d, e = draw.corner.diag, draw.corner.offdiag
    thetas = np.array([-2.0, 0.0, 2.0, 4.0, 6.0])
    scale = args.n ** (-1 / 3)
    cases = {
        "top_eigenvalues(k=5)": lambda k: k.top_eigenvalues(d, e, 5, cfg.tol),
        "largest_eigenvalue_spiked(5 spikes)": lambda k: k.largest_eigenvalue_spiked(d, e, 1 + thetas * scale, cfg.tol),
        "centered_secular_roots(5 thetas)": lambda k: k.centered_secular_roots(d, e, thetas, scale, cfg.tol, draw.weight, draw.shift),
    }
    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    print(f"corner m={args.m}, N={args.n}, best of {args.repeat}")
    print(f"{'kernel':40s}" + "".join(f"{name:>12s}" for name, _ in backends) + f"{'speedup':>10s}")
    for label, run in cases.items():
        times = [_time(lambda: run(mod), args.repeat) for _, mod in backends]
        results = [run(mod) for _, mod in backends]
        if len(results) == 2 and not np.allclose(results[0], results[1], rtol=0, atol=1e-9):
            raise SystemExit(f"{label}: backends disagree")
        speed = f"{times[0] / times[-1]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
