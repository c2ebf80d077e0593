"""Convergence of the full-system solver against the circular travelling wave.

Usage:
  python3 scripts/carroll_convergence.py --cells 64 128 256 512 --scheme muscl_minmod
  python3 scripts/carroll_convergence.py --scheme lax_friedrichs --csv lf.csv
"""
import argparse
import csv
import math
from pathlib import Path

import numpy as np

from shearwaves import (
    CarrollWave,
    FullState,
    Grid1D,
    SimulationConfig,
    carroll_full_state,
    cubic_modulus,
    evolve_full,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, nargs="*", default=[64, 128, 256, 512])
    ap.add_argument("--scheme", default="muscl_minmod",
                    choices=["lax_friedrichs", "muscl_minmod"])
    ap.add_argument("--mu0", type=float, default=1.0)
    ap.add_argument("--mu1", type=float, default=0.5)
    ap.add_argument("--amplitude", type=float, default=1.0)
    ap.add_argument("--wavenumber", type=float, default=1.0)
    ap.add_argument("--periods", type=float, default=1.0)
    ap.add_argument("--csv", default=None, help="optional output table")
    args = ap.parse_args()

    m = cubic_modulus(args.mu0, args.mu1)
    wave = CarrollWave.from_modulus(m, args.amplitude, args.wavenumber)
    end = args.periods * 2.0 * math.pi / wave.omega

    rows = []
    prev = None
    print(f"scheme={args.scheme}  omega={wave.omega:.6f}  end={end:.4f}")
    print(f"{'n':>6} {'Linf':>12} {'L2':>12} {'order':>7}")
    for n in args.cells:
        grid = Grid1D(n=n, a=0.0, b=2.0 * math.pi)
        state = FullState(*carroll_full_state(wave, grid.centers, 0.0))
        traj = evolve_full(m, grid, state,
                           SimulationConfig(end=end, scheme=args.scheme))
        ref = np.stack(carroll_full_state(wave, grid.centers, end))
        diff = traj.final - ref
        e_inf = float(np.max(np.abs(diff)))
        e_l2 = float(np.sqrt(np.mean(diff**2)))
        order = math.log2(prev / e_inf) if prev else float("nan")
        print(f"{n:>6} {e_inf:>12.4e} {e_l2:>12.4e} {order:>7.3f}")
        rows.append({"n": n, "linf": e_inf, "l2": e_l2, "order": order})
        prev = e_inf

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["n", "linf", "l2", "order"])
            w.writeheader()
            w.writerows(rows)
        print("wrote", Path(args.csv).resolve())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
