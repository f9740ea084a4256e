#!/usr/bin/env python3
"""Invert the all-ones Dirichlet series over log N and recover Mobius.

Builds sum_{n<=X} e^{-s log n} with unit coefficients in the exact rational
backend, runs the graded inversion, and compares against a sieve.
"""

import argparse
import math
import time

from dirichlet_forge.algebra import EXACT, from_coeffs, graded_invert
from dirichlet_forge.semigroup import log_element, log_primes_basis


def mobius_sieve(x):
    mu = [0] * (x + 1)
    mu[1] = 1
    primes = []
    smallest = [0] * (x + 1)
    for n in range(2, x + 1):
        if smallest[n] == 0:
            smallest[n] = n
            primes.append(n)
            mu[n] = -1
        for p in primes:
            if p > smallest[n] or n * p > x:
                break
            smallest[n * p] = p
            mu[n * p] = 0 if n % p == 0 else -mu[n]
    return mu


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=10000)
    ap.add_argument("--show", type=int, default=20, help="rows to print")
    args = ap.parse_args()

    basis = log_primes_basis(args.limit)
    elems = [log_element(basis, n) for n in range(1, args.limit + 1)]
    ones = from_coeffs(basis, [(lam, 1) for lam in elems], backend=EXACT)

    t0 = time.perf_counter()
    inv = graded_invert(ones, truncation=math.log(args.limit))
    dt = time.perf_counter() - t0

    mu = mobius_sieve(args.limit)
    mismatches = 0
    for n, lam in enumerate(elems, start=1):
        v = inv.coeffs.get(lam)
        got = 0 if v is None else v.re
        if got != mu[n]:
            mismatches += 1
    print(f"inverted {args.limit} coefficients in {dt:.2f}s, "
          f"{mismatches} mismatches against the sieve")

    print(f"\n   n  inverse  mu(n)")
    for n in range(1, args.show + 1):
        v = inv.coeffs.get(elems[n - 1])
        got = 0 if v is None else v.re
        print(f"{n:4d}  {str(got):>7}  {mu[n]:5d}")


if __name__ == "__main__":
    main()
