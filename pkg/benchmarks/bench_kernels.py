"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--grid 48] [--repeat 5]

Each kernel is timed on identical inputs for every available backend and the
outputs are cross-checked.
"""

import argparse
import timeit

import numpy as np

from maxdirac.dirac import fw_symbol
from maxdirac.grid import SpectralGrid
from maxdirac.kernels import backends


def _inputs(n, rng):
    grid = SpectralGrid(n, 40.0)
    sym = fw_symbol(grid)
    shape = (4,) + grid.shape
    psi = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    xi = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    scalar = rng.standard_normal(grid.shape)
    vec = rng.standard_normal((3,) + grid.shape)
    return sym, psi, xi, scalar, vec


def cases(n, rng):
    sym, psi, xi, scalar, vec = _inputs(n, rng)
    small = 8
    f = rng.standard_normal((small,) * 3)
    g = rng.standard_normal((small,) * 3)
    kern = rng.standard_normal((small,) * 3)
    kv = rng.standard_normal((small,) * 3) + 0j
    axis = np.arange(small, dtype=float)
    return {
        f"fw_apply N={n}": lambda m: m.fw_apply(psi, sym.a_plus, *sym.c, 1.0),
        f"cross_bilinears N={n}": lambda m: m.cross_bilinears(psi, xi),
        f"apply_potential N={n}": lambda m: m.apply_potential(psi, scalar, vec),
        f"pair_sum_direct N={small}": lambda m: m.pair_sum_direct(f, g, kern),
        f"inverse_dft_direct N={small}": lambda m: m.inverse_dft_direct(kv, axis, axis),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=48)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    mods = backends()
    rng = np.random.default_rng(0)
    names = list(mods)
    print(f"{'kernel':32s}" + "".join(f"{k + ' [ms]':>16s}" for k in names) + f"{'max |diff|':>14s}")
    for label, fn in cases(args.grid, rng).items():
        times, outs = [], []
        for name in names:
            mod = mods[name]
            outs.append(np.asarray(fn(mod)))
            t = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            times.append(1e3 * t)
        diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
        print(f"{label:32s}" + "".join(f"{t:16.3f}" for t in times) + f"{diff:14.2e}")


if __name__ == "__main__":
    main()
