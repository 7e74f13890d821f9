"""Sup-norm gap between asymptotic and oracle bridge eigenfunctions, and an optional SVG overlay.

    python3 scripts/eigenfunction_compare.py --h 0.7 --n 20 --svg phi20.svg
"""
import argparse

import numpy as np

from klbridge import KernelSpec, bridge_eigenfunction, cached_spectrum
from klbridge.export import svg_plot


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", type=float, nargs="+", default=[0.3, 0.7])
    ap.add_argument("--n", type=int, default=None, help="single index to plot; default tabulates 15..30")
    ap.add_argument("--grid", type=int, default=2000)
    ap.add_argument("--svg", default=None)
    args = ap.parse_args()

    full = np.linspace(0.0, 1.0, 401)
    for h in args.h:
        sp = cached_spectrum(KernelSpec.bridge_of(KernelSpec.fbm(h)), args.grid)
        indices = [args.n] if args.n else range(15, 31)
        for n in indices:
            ref = sp.evaluate(full, n)[n - 1]
            approx = bridge_eigenfunction(h, n, full)
            ref = ref * np.sign(ref @ approx)
            mask = (full >= 0.2) & (full <= 0.8)
            print(f"H={h:g} n={n:2d}  interior sup {np.max(np.abs(ref - approx)[mask]):.3e}  "
                  f"whole interval sup {np.max(np.abs(ref - approx)):.3e}")
            if args.svg and args.n:
                series = {"oracle": (full, ref), "asymptotic": (full, approx)}
                with open(args.svg, "w") as fh:
                    fh.write(svg_plot(series, f"bridge eigenfunction n={n}, H={h:g}", "t", "phi(t)"))


if __name__ == "__main__":
    main()
