"""Integer sieves shared by the log-prime basis and the multiplicative layer."""

from __future__ import annotations


def primes_upto(x: int) -> list[int]:
    if x < 2:
        return []
    sieve = bytearray([1]) * (x + 1)
    sieve[0] = sieve[1] = 0
    p = 2
    while p * p <= x:
        if sieve[p]:
            sieve[p * p:: p] = bytearray(len(range(p * p, x + 1, p)))
        p += 1
    return [i for i in range(2, x + 1) if sieve[i]]


def spf_sieve(x: int) -> list[int]:
    """Smallest prime factor table for 0..x (spf[0]=spf[1]=0)."""
    spf = list(range(x + 1))
    if x >= 1:
        spf[1] = 0
    if x >= 0:
        spf[0] = 0
    i = 2
    while i * i <= x:
        if spf[i] == i:  # prime
            for j in range(i * i, x + 1, i):
                if spf[j] == j:
                    spf[j] = i
        i += 1
    return spf


def factorize(n: int, spf=None) -> dict[int, int]:
    """Prime factorization via an spf table (or trial division for small n)."""
    if n < 1:
        raise ValueError("positive integer required")
    out: dict[int, int] = {}
    if spf is not None and n < len(spf):
        while n > 1:
            p = spf[n]
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
