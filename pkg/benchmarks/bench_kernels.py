"""Time each hot kernel under numba and under the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Numba timings exclude the first (compiling) call.
"""
import argparse
import timeit
from pathlib import Path

import numpy as np

from plembed import kernels, shapes
from plembed._accel import HAVE_NUMBA
from plembed.mesh import load_mesh
from plembed.metric import refined_graph

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def _inputs():
    rng = np.random.default_rng(0)
    n = 200_000
    a, b = rng.uniform(0.5, 1.5, n), rng.uniform(0.5, 1.5, n)
    opp = rng.uniform(0.1, 1.0, n)
    sphere = load_mesh(DATA / "sphere642.off") if (DATA / "sphere642.off").exists() else shapes.icosphere(3)
    g = refined_graph(sphere.surface, 3)
    coords = rng.standard_normal((5000, 64))
    i, j = rng.integers(0, 5000, 100_000), rng.integers(0, 5000, 100_000)
    ax = rng.standard_normal((384, 3))
    ax /= np.linalg.norm(ax, axis=1)[:, None]
    th = rng.uniform(-np.pi, np.pi, 384)
    w, y, depth = rng.standard_normal((384, 3)), rng.standard_normal((900, 3)), rng.integers(0, 385, 900)
    return {
        "corner_angles": (opp, a, b),
        f"dijkstra ({g[0]} nodes)": (g[1], g[2], g[3], 0),
        "sup_norm_pairs": (coords, i, j),
        "chain_rotations": (ax, th),
        "chain_jacobian": (w, y, depth),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<28}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for label, inp in _inputs().items():
        name = label.split()[0]
        f_np = getattr(kernels, f"{name}_np")
        t_np = min(timeit.repeat(lambda: f_np(*inp), number=1, repeat=args.repeat)) * 1e3
        if HAVE_NUMBA:
            f_jit = getattr(kernels, f"{name}_jit")
            f_jit(*inp)
            t_jit = min(timeit.repeat(lambda: f_jit(*inp), number=1, repeat=args.repeat)) * 1e3
            print(f"{label:<28}{t_np:>12.3f}{t_jit:>12.3f}{t_np / t_jit:>9.1f}x")
        else:
            print(f"{label:<28}{t_np:>12.3f}{'n/a':>12}{'':>10}")


if __name__ == "__main__":
    main()
