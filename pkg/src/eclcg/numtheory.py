"""Exact integer number theory: gcds, inverses, primes and square roots.

Every scalar here is a plain Python ``int``; there is no floating point
anywhere on the attack path.
"""

from __future__ import annotations

import math
import random
from functools import reduce
from typing import Optional

DEFAULT_MR_ROUNDS = 40

_SMALL_PRIMES = (
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233,
)


class NotInvertible(ArithmeticError):
    """Raised when an element shares the factor ``g`` with the modulus."""

    def __init__(self, g: int, modulus: int):
        super().__init__(f"not invertible: gcd = {g} with modulus {modulus}")
        self.g = g
        self.modulus = modulus


def gcd(*values: int) -> int:
    """Nonnegative gcd of any number of integers; gcd() == gcd(0, 0) == 0."""
    return reduce(math.gcd, values, 0)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b)`` and g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    if old_r == 0:
        return 0, 0, 0
    return old_r, old_s, old_t


def mod_inv(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m`` in ``[0, m)``.

    Raises :class:`NotInvertible` carrying ``gcd(a, m)`` when it is not 1.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    g, s, _ = ext_gcd(a % m, m)
    if g != 1:
        raise NotInvertible(g, m)
    return s % m


def coprime_part(m: int, w: int) -> int:
    """Largest divisor of ``m`` coprime to ``w``."""
    if m < 1 or w < 1:
        raise ValueError("coprime_part needs m >= 1 and w >= 1")
    g = math.gcd(m, w)
    while g > 1:
        m //= g
        g = math.gcd(m, g)
    return m


def is_probable_prime(n: int, rounds: int = DEFAULT_MR_ROUNDS,
                      rng: Optional[random.Random] = None) -> bool:
    """Miller-Rabin test with ``rounds`` random bases.

    Without an explicit ``rng`` the bases are drawn from a generator seeded
    by ``n`` itself, so the answer is reproducible.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if rng is None:
        rng = random.Random(n)
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random,
                 rounds: int = DEFAULT_MR_ROUNDS) -> int:
    """Random probable prime of exactly ``bits`` bits, coprime to 6."""
    if bits < 3:
        raise ValueError("bits must be >= 3")
    top = 1 << (bits - 1)
    while True:
        n = rng.getrandbits(bits) | top | 1
        if n % 3 == 0:
            continue
        if is_probable_prime(n, rounds, rng):
            return n


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a | p) for an odd prime p, in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_prime(a: int, p: int) -> Optional[int]:
    """Square root of ``a`` modulo an odd prime ``p`` (Tonelli-Shanks).

    Returns ``None`` when ``a`` is a quadratic non-residue.
    """
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c = s, pow(z, q, p)
    t, r = pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine residues modulo pairwise coprime moduli."""
    x, n = 0, 1
    for r, m in zip(residues, moduli):
        x += n * ((r - x) * mod_inv(n, m) % m)
        n *= m
    return x % n
