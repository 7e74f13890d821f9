"""Tabulate the oracle frequency offsets between fBm and its bridge.

    python3 scripts/shift_table.py --h 0.3 0.7 --nmax 40
"""
import argparse

import numpy as np

from klbridge import KernelSpec, cached_spectrum, compute_constants


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    ap.add_argument("--nmax", type=int, default=40)
    ap.add_argument("--grid", type=int, default=2000)
    args = ap.parse_args()

    for h in args.h:
        c = compute_constants(h)
        base = cached_spectrum(KernelSpec.fbm(h), args.grid).frequencies()
        br = cached_spectrum(KernelSpec.bridge_of(KernelSpec.fbm(h)), args.grid).frequencies(h)
        print(f"H={h:g}  predicted shift {c.shift:.6f}")
        print(f"{'n':>4} {'mu_n':>12} {'mu~_n':>12} {'offset':>10} {'offset-shift':>13}")
        for n in range(1, args.nmax + 1):
            d = br[n - 1] - base[n - 1]
            print(f"{n:4d} {base[n - 1]:12.6f} {br[n - 1]:12.6f} {d:10.6f} {d - c.shift:13.3e}")
        tail = np.arange(10, args.nmax + 1)
        dev = np.abs(br[tail - 1] - base[tail - 1] - c.shift)
        print(f"max |offset - shift| over n in [10, {args.nmax}]: {dev.max():.3e}\n")


if __name__ == "__main__":
    main()
