#!/usr/bin/env python3
"""Survey empirical maximum-principle constants over a grid of Riesz orders.

For each order, builds a sphere (and a ball) instance, probes capacitary
measures of random subsets, and prints the running lower bound on the
constant next to the classical ceiling (1 up to order 2, ``2**(n - alpha)``
above).  The estimates are lower bounds only and never certify a matrix.

Usage: python scripts/ugaheri_survey.py [--trials 100] [--m 150] [--seed 3]
"""

from __future__ import annotations

import argparse

from finpot.experiments import ugaheri_estimate
from finpot.instances import Ball, InstanceSpec, RieszKernel, Sphere, assemble


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--m", type=int, default=150)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    print(f"{'alpha':>6} {'geometry':>8} {'h_hat':>10} {'ceiling':>10}")
    for alpha in (0.5, 1.0, 1.5, 2.0, 2.25, 2.5, 2.75):
        ceiling = 1.0 if alpha <= 2.0 else 2.0 ** (3 - alpha)
        for geometry, tag in ((Sphere(1.0, args.m), "sphere"), (Ball(1.0, args.m), "ball")):
            spec = InstanceSpec(3, RieszKernel(alpha), geometry)
            inst = assemble(spec)
            est = ugaheri_estimate(inst.kernel, trials=args.trials, seed=args.seed)
            flag = "" if est.h_hat <= ceiling * 1.02 else "  (!) above ceiling"
            print(f"{alpha:>6.2f} {tag:>8} {est.h_hat:>10.4f} {ceiling:>10.4f}{flag}")


if __name__ == "__main__":
    main()
