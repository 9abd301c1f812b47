"""Compare the compiled pair-sum kernels against the numpy fallback.

Both backends are loaded side by side (the fallback module is importable
regardless of which one the package selected), run on identical inputs, and
cross-checked before timing, so a speedup quoted here is for verified-equal
results.

Usage: python3 benchmarks/bench_core.py [--n 10] [--m-phi 16] [--repeat 3]
"""

import argparse
import math
import time

import numpy as np

from deltabolt import _backend, _corepy
from deltabolt.grid import Distribution, GridSpec, maxwellian
from deltabolt.landau import _derivative_fields
from deltabolt.testfunctions import KIND_CODES, bump, quadratic

try:
    from deltabolt import _core
except ImportError:
    _core = None


def _data(n):
    g = GridSpec(n=n, v_max=4.0)
    fa = maxwellian(g, mass=0.5, bulk=(1.2, 0.0, 0.0), temperature=0.6)
    fb = maxwellian(g, mass=0.5, bulk=(-1.2, 0.3, 0.0), temperature=0.4)
    return g, Distribution(g, fa.values + fb.values)


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(n, m_phi, repeat):
    g, f = _data(n)
    eps, gamma = 0.2, -1.5
    pad = _backend.pad_width(n)
    fp = np.zeros((n + 2 * pad,) * 3)
    fp[pad : pad + n, pad : pad + n, pad : pad + n] = f.values

    phis = [quadratic(0.3, (0.1, -0.2, 0.0), np.diag((1.0, 0.5, -0.3))), bump((0.0, 0.0, 0.0), 2.5)]
    kinds = np.array([KIND_CODES[p.kind] for p in phis], dtype=np.int64)
    packed = np.array([p.params for p in phis])
    grad, trh, hess6 = _derivative_fields(f, phis[1])

    cases = {
        "gain": lambda k: k.gain(fp, fp, n, pad, g.h, eps, gamma, m_phi, 1),
        "weak_pairs": lambda k: k.weak_pairs(f.values, g.h, -g.v_max, eps, gamma, m_phi, kinds, packed, 1),
        "landau_pairs": lambda k: k.landau_pairs(f.values, grad, trh, hess6, g.h, gamma, 2.0 * g.h, 1),
        "pair_power": lambda k: k.pair_power(f.values, g.h, gamma, 1),
    }

    print(f"n={n} m_phi={m_phi} repeat={repeat} backend_selected={_backend.backend_name()}")
    header = f"{'kernel':<14}{'numpy [s]':>12}{'compiled [s]':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        t_py, out_py = _time(lambda: call(_corepy), repeat)
        if _core is None:
            print(f"{name:<14}{t_py:>12.4f}{'missing':>14}{'-':>9}")
            continue
        t_c, out_c = _time(lambda: call(_core), repeat)
        parts_py = out_py if isinstance(out_py, tuple) else (out_py,)
        parts_c = out_c if isinstance(out_c, tuple) else (out_c,)
        a = np.concatenate([np.asarray(x, dtype=float).ravel() for x in parts_py])
        b = np.concatenate([np.asarray(x, dtype=float).ravel() for x in parts_c])
        scale = max(1.0, float(np.max(np.abs(a))))
        worst = float(np.max(np.abs(a - b))) / scale
        if worst > 1e-12:
            raise SystemExit(f"backend mismatch in {name}: relative deviation {worst:.3e}")
        print(f"{name:<14}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>9.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--m-phi", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    bench(args.n, args.m_phi, args.repeat)
