"""Empirical covariance of KL sample paths against the exact fBm covariance.

    python3 scripts/covariance_check.py --h 0.75 --paths 20000 --M 200
"""
import argparse
import time

import numpy as np

from klbridge import KernelSpec, cached_spectrum
from klbridge.sampler import covariance_stderr, empirical_covariance, sample_paths, truncation_bound


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", type=float, default=0.75)
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--M", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--grid", type=int, default=2000)
    args = ap.parse_args()

    sp = cached_spectrum(KernelSpec.fbm(args.h), args.grid)
    t = np.linspace(0.2, 1.0, 5)
    start = time.perf_counter()
    paths = sample_paths(sp, t, args.M, args.paths, args.seed)
    elapsed = time.perf_counter() - start
    bound = truncation_bound(sp, args.M)
    exact = KernelSpec.fbm(args.h)(t[:, None], t[None, :])
    print(f"H={args.h:g}  paths={args.paths}  M={args.M}  sampling {elapsed:.2f}s  truncation bound {bound:.2e}")
    worst = 0.0
    for i in range(5):
        cells = []
        for j in range(5):
            err = empirical_covariance(paths, i, j) - exact[i, j]
            ratio = abs(err) / max(3.0 * covariance_stderr(paths, i, j), bound)
            worst = max(worst, ratio)
            cells.append(f"{err:+.2e}")
        print(f"t={t[i]:.1f}  " + "  ".join(cells))
    print(f"max |err| / max(3 stderr, bound) = {worst:.3f}")


if __name__ == "__main__":
    main()
