#!/usr/bin/env python3
"""Refinement study: unit-sphere capacity and swept mass under node doubling.

Records, for the inverse-distance kernel on the unit sphere, the computed
capacity, the swept mass of a unit exterior charge at distance 2, and the
equilibrium-potential overshoot at nearest-neighbor midpoints, across a
doubling sequence of resolutions.  Prints a table, the extrapolated limits
(Aitken), and writes a CSV.  These are the recorded targets behind the
desk-scale assertions in the acceptance suite.

Usage: python scripts/refinement_study.py [--max-m 4000] [--out study.csv]
"""

from __future__ import annotations

import argparse
import csv
import time

import numpy as np

from finpot.balayage import pseudo_balayage
from finpot.gauss import capacitary_measure
from finpot.instances import ChargeAtom, InstanceSpec, RieszKernel, Sphere, assemble


def aitken(values):
    c1, c2, c3 = values[-3:]
    denom = c2 - c1
    if denom == 0.0:
        return c3
    r = (c3 - c2) / denom
    if not 0.0 < abs(r) < 1.0:
        return c3
    return c3 + (c3 - c2) * r / (1.0 - r)


def midpoint_probe(nodes, radius):
    d = np.linalg.norm(nodes[:, None, :] - nodes[None, :, :], axis=2)
    np.fill_diagonal(d, np.inf)
    nn = np.argmin(d, axis=1)
    mids = (nodes + nodes[nn]) / 2.0
    return radius * mids / np.linalg.norm(mids, axis=1, keepdims=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-m", type=int, default=2000)
    parser.add_argument("--charge-distance", type=float, default=2.0)
    parser.add_argument("--out", default="refinement_study.csv")
    args = parser.parse_args()

    sizes = [250]
    while sizes[-1] * 2 <= args.max_m:
        sizes.append(sizes[-1] * 2)

    rows = []
    print(f"{'m':>6} {'capacity':>12} {'swept_mass':>12} {'overshoot':>12} {'seconds':>8}")
    for m in sizes:
        t0 = time.time()
        spec = InstanceSpec(
            3,
            RieszKernel(2.0),
            Sphere(1.0, m),
            charge=(ChargeAtom((args.charge_distance, 0.0, 0.0), 1.0),),
        )
        inst = assemble(spec)
        cap = capacitary_measure(inst.kernel, inst.support)
        bal = pseudo_balayage(inst.kernel, inst.omega, inst.support)
        nodes = inst.node_points()
        probe = midpoint_probe(nodes, 1.0)
        dist = np.linalg.norm(probe[:, None, :] - nodes[None, :, :], axis=2)
        overshoot = float(((1.0 / dist) @ cap.gamma.weights[: inst.n_nodes]).max() - 1.0)
        dt = time.time() - t0
        rows.append(
            {"m": m, "capacity": cap.capacity, "swept_mass": bal.mass, "overshoot": overshoot}
        )
        print(f"{m:>6} {cap.capacity:>12.6f} {bal.mass:>12.6f} {overshoot:>12.6f} {dt:>8.1f}")

    if len(rows) >= 3:
        caps = [r["capacity"] for r in rows]
        masses = [r["swept_mass"] for r in rows]
        cap_lim, mass_lim = aitken(caps), aitken(masses)
        print(f"\nextrapolated capacity:   {cap_lim:.6f} (ideal 1.0 for the unit sphere)")
        print(f"final-stage deviation:   {abs(caps[-1] - cap_lim) / cap_lim:.2%}")
        print(f"extrapolated swept mass: {mass_lim:.6f} "
              f"(ideal {1.0 / args.charge_distance:.4f} for a unit charge at d={args.charge_distance:g})")
        print(f"final-stage deviation:   {abs(masses[-1] - mass_lim) / mass_lim:.2%}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
