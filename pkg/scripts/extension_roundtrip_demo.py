#!/usr/bin/env python3
"""Round-trip a bounded character through the extension pipeline.

Samples a character phi0 = exp(-zeta0 . x) exp(i omega0 . x) with an
optional vanishing direction, restricts it to random rational generators,
then rebuilds a free basis and an extension from the restricted values.
"""

import argparse
import cmath
import math
import random
from fractions import Fraction as F

from dirichlet_forge.extension import CharacterExtensionProblem, extend_character


def build_problem(seed: int) -> CharacterExtensionProblem:
    rng = random.Random(seed)
    d = rng.randint(2, 4)
    k = rng.randint(3, 8)
    gens, seen = [], set()
    while len(gens) < k:
        g = tuple(F(rng.randint(0, 6), rng.choice([1, 2, 3])) for _ in range(d))
        if any(x > 0 for x in g) and g not in seen:
            seen.add(g)
            gens.append(g)
    zeta0 = tuple(F(rng.randint(0, 4), 2) for _ in range(d))
    omega0 = tuple(rng.uniform(-1.0, 1.0) for _ in range(d))
    theta0 = tuple(F(rng.randint(0, 2)) if rng.random() < 0.4 else F(0)
                   for _ in range(d))

    def phi0(g):
        if sum(t * x for t, x in zip(theta0, g)) > 0:
            return 0j
        zv = sum(float(z) * float(x) for z, x in zip(zeta0, g))
        ov = sum(o * float(x) for o, x in zip(omega0, g))
        return math.exp(-zv) * cmath.exp(1j * ov)

    idx = rng.sample(range(k), rng.randint(2, k))
    return CharacterExtensionProblem(d, gens, {i: phi0(gens[i]) for i in idx})


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    prob = build_problem(args.seed)
    print(f"dim {prob.dim}, {len(prob.gamma)} generators, "
          f"{len(prob.prescribed)} prescribed values "
          f"({sum(1 for v in prob.prescribed.values() if v == 0)} zeros)")

    res = extend_character(prob)
    print(f"\nfree basis ({len(res.basis_vectors)} vectors):")
    for bv, z in zip(res.basis_vectors, res.phi_basis):
        print(f"  {tuple(str(x) for x in bv)}  ->  {z:.6f}")

    print("\ngenerator factorizations (nonnegative integer exponents):")
    for g, ex, z in zip(prob.gamma, res.exponents, res.phi_gamma):
        print(f"  {tuple(str(x) for x in g)} = B^{list(ex)}  ->  {z:.6f}")

    print(f"\nprescribed residual: {res.prescribed_residual:.2e}")
    if res.flags:
        print(f"flags: {res.flags}")


if __name__ == "__main__":
    main()
