"""Prime-field arithmetic: primality, factoring, quadratic residues, primitive
roots, discrete-log tables, multiplicative characters and orders.

Everything here targets primes p > 3 at desk scale.  Tables are built once per
prime, are immutable afterwards, and may be shared freely across threads.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import RefusedError

# Witness set making Miller-Rabin deterministic below 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# ind tables take O(p) words; larger p must opt in explicitly.
INDEX_TABLE_LIMIT = 1 << 22


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor(n: int) -> list[tuple[int, int]]:
    """Complete factorization by trial division, as (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("factor requires n >= 1")
    out = []
    for q in (2, 3):
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        if e:
            out.append((q, e))
    d = 5
    while d * d <= n:
        for q in (d, d + 2):
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e:
                out.append((q, e))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


def mod_pow(base: int, exp: int, p: int) -> int:
    """base**exp mod p (square-and-multiply)."""
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(base, exp, p)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} via the Euler criterion."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class PrimeModulus:
    """A checked prime p > 3 together with the factorization of p - 1."""

    p: int
    p_minus_1_factors: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, p: int) -> "PrimeModulus":
        if p <= 3 or not is_prime(p):
            raise ValueError(f"{p} is not a prime > 3")
        return cls(p, tuple(factor(p - 1)))


@dataclass(frozen=True)
class ResidueTable:
    """Quadratic-residue table for one prime.

    qr[x] is 1 exactly for the (p-1)/2 nonzero squares; qr[0] stays 0.
    leg[x] holds the Legendre symbol as int8 (leg[0] = 0), which is the form
    the trace sweeps consume.
    """

    p: int
    qr: np.ndarray
    leg: np.ndarray

    @classmethod
    def build(cls, p: int) -> "ResidueTable":
        if p <= 2 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        x = np.arange(1, p, dtype=np.int64)
        qr = np.zeros(p, dtype=np.uint8)
        qr[(x * x) % p] = 1
        leg = qr.astype(np.int8) * 2 - 1
        leg[0] = 0
        qr.setflags(write=False)
        leg.setflags(write=False)
        return cls(p, qr, leg)


def primitive_root(p: int) -> int:
    """Smallest g in [2, p) of multiplicative order p - 1."""
    if p == 2:
        return 1
    n = p - 1
    prime_divs = [q for q, _ in factor(n)]
    g = 2
    while True:
        if all(pow(g, n // q, p) != 1 for q in prime_divs):
            return g
        g += 1


@dataclass(frozen=True)
class IndexTable:
    """Discrete-log table: ind[g**z mod p] = z for z in [0, p-2].

    ind is a bijection {1..p-1} -> {0..p-2}; ind[0] is the sentinel -1.
    """

    p: int
    g: int
    ind: np.ndarray

    @classmethod
    def build(cls, p: int, allow_large: bool = False) -> "IndexTable":
        if p > INDEX_TABLE_LIMIT and not allow_large:
            raise RefusedError(
                f"index table for p={p} exceeds the {INDEX_TABLE_LIMIT} limit "
                "(pass allow_large to override)"
            )
        g = primitive_root(p)
        ind = np.full(p, -1, dtype=np.int64)
        w = 1
        for z in range(p - 1):
            ind[w] = z
            w = w * g % p
        ind.setflags(write=False)
        return cls(p, g, ind)


def character_eval(s: int, w: int, tbl: IndexTable) -> complex:
    """Value of the multiplicative character chi_s at w: e(s * ind(w) / (p-1)).

    chi_0 is the trivial character; chi_{(p-1)/2} is the quadratic one.
    """
    w %= tbl.p
    if w == 0:
        raise ValueError("character undefined at 0 mod p")
    z = int(tbl.ind[w])
    return cmath.exp(2j * cmath.pi * (s * z % (tbl.p - 1)) / (tbl.p - 1))


def mult_order(lam: int, p: int) -> int:
    """Least r >= 1 with lam**r = 1 mod p, found by stripping factors of p-1."""
    lam %= p
    if lam == 0:
        raise ValueError("order undefined: p divides lambda")
    r = p - 1
    for q, e in factor(p - 1):
        for _ in range(e):
            if pow(lam, r // q, p) == 1:
                r //= q
            else:
                break
    return r
