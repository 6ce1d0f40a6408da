"""Sup-norm error of Gaussian, Edgeworth and corrected densities against
the inversion oracle as n grows, for one spec file.

    python3 scripts/error_scaling.py scripts/specs/pareto3.spec --ns 10,30,100,300
"""
import argparse

import numpy as np

from heavy_edgeworth.config import load_config
from heavy_edgeworth.edgeworth_correction import corrected_density
from heavy_edgeworth.oracles import density_by_inversion


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("spec")
    ap.add_argument("--ns", default="10,30,100,300")
    ap.add_argument("--xmax", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()

    spec = load_config(args.spec).build()
    xs = np.linspace(-args.xmax, args.xmax, args.points)
    print(f"{'n':>6} {'gaussian':>12} {'edgeworth':>12} {'corrected':>12} {'ratio':>8}")
    for n in (int(v) for v in args.ns.split(",")):
        oracle = density_by_inversion(spec, xs, n)
        res = [corrected_density(spec, x, n) for x in xs]
        g = np.max(np.abs([r.gaussian for r in res] - oracle))
        e = np.max(np.abs([r.edgeworth_only for r in res] - oracle))
        c = np.max(np.abs([r.total for r in res] - oracle))
        print(f"{n:>6} {g:12.4e} {e:12.4e} {c:12.4e} {c / e:8.3f}")


if __name__ == "__main__":
    main()
