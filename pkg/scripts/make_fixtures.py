#!/usr/bin/env python3
"""Regenerate the bundled verification fixtures under src/finpot/fixtures/.

Each fixture is a self-contained raw-matrix instance (kernel, charge,
target set) consumed by `finpot verify`.  Everything is seeded, so the
files are reproducible byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from finpot import pseudo_balayage
from finpot.cli import FIXTURE_SCHEMA
from finpot.core import Measure, SupportSet
from finpot.fixtures import mixed_instance, random_spd_kernel
from finpot.instances import ChargeAtom, InstanceSpec, RieszKernel, Sphere, assemble

OUT = Path(__file__).resolve().parent.parent / "src" / "finpot" / "fixtures"


def write(name: str, kernel, omega, support, tol=1e-8, h=None):
    obj = {
        "schema": FIXTURE_SCHEMA,
        "name": name,
        "tol": tol,
        "kernel": kernel.to_json(),
        "omega": omega.to_json(),
        "support": list(support.indices),
    }
    if h is not None:
        obj["h"] = h
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(obj, sort_keys=True) + "\n")
    print("wrote", path)


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    # purely negative charge: the sweep must vanish identically
    kernel = random_spd_kernel(11, 8)
    rng = np.random.default_rng(12)
    omega = Measure(-rng.random(8))
    write("negative_omega", kernel, omega, SupportSet(range(0, 8, 2)))

    # positive atom at a node of the target: the sweep is the charge itself
    kernel = random_spd_kernel(21, 9)
    write("atom_in_target", kernel, Measure.unit_atom(9, 3, 2.5), SupportSet([1, 3, 5, 7]))

    # generic mixed-sign charge, target small enough for the oracles
    kernel, omega, _ = mixed_instance(31, 14)
    write("mixed_small", kernel, omega, SupportSet(range(10)))

    # mixed charge rescaled so the swept mass is exactly one; scan seeds until
    # the sweep is solidly nonzero (a heavy negative part can null it)
    for seed in range(41, 141):
        kernel, omega, support = mixed_instance(seed, 12)
        bal = pseudo_balayage(kernel, omega, support)
        if bal.mass > 0.1:
            break
    else:
        raise RuntimeError("no seed produced a nonvanishing sweep")
    write("mass_one", kernel, omega.scaled(1.0 / bal.mass), support)

    # Newtonian sphere with an exterior unit charge, stored as a raw matrix
    spec = InstanceSpec(
        3, RieszKernel(2.0), Sphere(1.0, 40), charge=(ChargeAtom((2.0, 0.0, 0.0), 1.0),)
    )
    inst = assemble(spec)
    write("riesz_sphere", inst.kernel, inst.omega, inst.support, h=inst.h)


if __name__ == "__main__":
    main()
