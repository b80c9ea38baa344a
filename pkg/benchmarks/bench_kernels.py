"""Compare the compiled integration kernel with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--t-end 2000]
"""

import argparse
import time

from satsir import _kernels_py
from satsir.integrate import DOMAIN_TOL
from satsir.model import ModelParams

try:
    from satsir import _kernels
except ImportError:
    _kernels = None

PARAMS = dict(b=0.0536, delta=0.934, gamma=0.0014, q=0.0238, m_prime=0.5452, beta=13.2853,
              alpha=0.0387, beta2=1.42, alpha2=21.0556)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run(kernels, p, t_end, repeat):
    dopri = lambda: kernels.dopri_run(p, 0.4, 0.05, 0.0, t_end, 1e-10, 1e-12, 1e-3, 10_000_000,
                                      0.0, DOMAIN_TOL)
    rhs = lambda: [kernels.rhs(p, 0.4, 0.05) for _ in range(100_000)]
    t_dopri, out = best_of(dopri, repeat)
    t_rhs, _ = best_of(rhs, repeat)
    return t_dopri, t_rhs, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--t-end", type=float, default=2000.0)
    args = ap.parse_args(argv)
    p = ModelParams(**PARAMS).as_tuple()
    rows = [("python", _kernels_py)] + ([("compiled", _kernels)] if _kernels else [])
    results = {}
    for name, kernels in rows:
        results[name] = run(kernels, p, args.t_end, args.repeat)
    steps = int(results["python"][2][6])
    print(f"dopri_run to t={args.t_end:g}: {steps} accepted steps; rhs: 100000 calls")
    print(f"{'backend':<10}{'dopri_run [s]':>15}{'rhs [s]':>12}")
    for name, (t_dopri, t_rhs, _) in results.items():
        print(f"{name:<10}{t_dopri:>15.4f}{t_rhs:>12.4f}")
    if _kernels:
        py, cc = results["python"], results["compiled"]
        same = all((a == b).all() if hasattr(a, "all") else a == b for a, b in zip(py[2], cc[2]))
        print(f"speed-up: dopri_run x{py[0] / cc[0]:.1f}, rhs x{py[1] / cc[1]:.1f}; "
              f"trajectories bit-identical: {same}")
    else:
        print("compiled kernel not available")


if __name__ == "__main__":
    main()
