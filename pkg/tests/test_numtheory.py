import math
import random

import pytest
from hypothesis import given, strategies as st

from eclcg.numtheory import (NotInvertible, coprime_part, crt, ext_gcd, gcd,
                             is_probable_prime, mod_inv, random_prime,
                             sqrt_mod_prime)

ints = st.integers(min_value=-2 ** 200, max_value=2 ** 200)


def subtraction_gcd(a, b):
    a, b = abs(a), abs(b)
    while a and b:
        if a >= b:
            a -= b
        else:
            b -= a
    return a + b


def trial_division_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@pytest.mark.parametrize("a,b,g", [(0, 7, 7), (12, -18, 6), (0, 0, 0), (-5, 0, 5)])
def test_gcd_small(a, b, g):
    assert gcd(a, b) == g


def test_gcd_large_against_residue_subtraction():
    a = 2 ** 500 + 1
    # reduce first so the subtraction oracle only sees residues
    assert gcd(a, 3) == subtraction_gcd(a % 3, 3) == 1


def test_gcd_against_subtraction_oracle(rng):
    for _ in range(1000):
        a, b = rng.randrange(-5000, 5000), rng.randrange(-5000, 5000)
        assert gcd(a, b) == subtraction_gcd(a, b)


def test_gcd_folds_many():
    assert gcd(12, 18, 30, -42) == 6


def test_ext_gcd_examples():
    assert ext_gcd(5, 3) == (1, -1, 2)
    assert ext_gcd(0, 0) == (0, 0, 0)
    assert ext_gcd(7, 0) == (7, 1, 0)
    assert ext_gcd(-7, 0) == (7, -1, 0)


@given(ints, ints)
def test_bezout_identity(a, b):
    g, s, t = ext_gcd(a, b)
    assert g == math.gcd(a, b) and g >= 0
    assert s * a + t * b == g


def test_mod_inv_examples():
    assert mod_inv(2, 5) == 3
    with pytest.raises(NotInvertible) as exc:
        mod_inv(6, 9)
    assert exc.value.g == 3


def test_mod_inv_brute_force(rng):
    for p in (2, 3, 5, 97, 101, 997):
        for a in range(1, p):
            expected = next(u for u in range(p) if a * u % p == 1)
            assert mod_inv(a, p) == expected


@given(st.integers(-10 ** 30, 10 ** 30), st.integers(2, 10 ** 20))
def test_mod_inv_iff_coprime(a, m):
    if math.gcd(a, m) == 1:
        assert a * mod_inv(a, m) % m == 1
    else:
        with pytest.raises(NotInvertible):
            mod_inv(a, m)


def test_coprime_part_examples():
    assert coprime_part(24, 6) == 1
    assert coprime_part(90, 6) == 5
    assert coprime_part(101 * 2 ** 17, 2) == 101


@given(st.integers(1, 10 ** 12), st.integers(1, 10 ** 6))
def test_coprime_part_properties(m, w):
    c = coprime_part(m, w)
    assert m % c == 0 and math.gcd(c, w) == 1
    # maximality: every divisor of m coprime to w divides c
    for d in (math.gcd(m, k) for k in range(1, 60)):
        if math.gcd(d, w) == 1:
            assert c % d == 0


def test_miller_rabin_examples():
    assert not is_probable_prime(561)
    assert is_probable_prime(2 ** 31 - 1)
    assert trial_division_prime(2 ** 31 - 1)
    assert not is_probable_prime(1)
    assert not is_probable_prime(0)
    assert is_probable_prime(2) and is_probable_prime(3)


def test_miller_rabin_against_trial_division(rng):
    sample = list(range(2000)) + [rng.randrange(2, 10 ** 9) for _ in range(1000)]
    for n in sample:
        assert is_probable_prime(n) == trial_division_prime(n), n


def test_carmichael_numbers_rejected():
    for n in (561, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265, 321197185):
        assert not is_probable_prime(n)


def test_random_prime_three_bits(rng):
    seen = {random_prime(3, rng) for _ in range(50)}
    assert seen == {5, 7}


def test_random_prime_500_bits():
    p = random_prime(500, random.Random(1))
    assert p.bit_length() == 500 and math.gcd(p, 6) == 1
    assert is_probable_prime(p, 40, random.Random(99))


def test_random_prime_deterministic():
    assert random_prime(128, random.Random(42)) == random_prime(128, random.Random(42))


def test_sqrt_examples():
    assert sqrt_mod_prime(4, 7) in (2, 5)
    assert sqrt_mod_prime(3, 7) is None
    assert sqrt_mod_prime(0, 7) == 0


@pytest.mark.parametrize("p", [5, 7, 13, 17, 41, 97, 113, 193, 257, 65537])
def test_sqrt_brute_force(p):
    squares = {y * y % p for y in range(p)}
    for a in range(p) if p < 1000 else range(0, p, 97):
        r = sqrt_mod_prime(a, p)
        if a in squares:
            assert r is not None and r * r % p == a
        else:
            assert r is None


def test_sqrt_random_large_residues(rng):
    for bits in (64, 256, 500):
        p = random_prime(bits, rng)
        for _ in range(20):
            t = rng.randrange(p)
            r = sqrt_mod_prime(t * t % p, p)
            assert r * r % p == t * t % p


def test_crt():
    assert crt([2, 3], [5, 7]) == 17
