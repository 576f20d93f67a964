import json
import random
from fractions import Fraction

import pytest

from eclcg.curve import (INFINITY, AdditionFailure, Curve, Point, PrimeField,
                         Rationals, ResidueRing, add, discriminant, negate,
                         random_point, reduce_point, scalar_mul, sub)
from eclcg.harness import brute_force_oracle, small_curves
from eclcg.numtheory import crt, random_prime


def brute_points(p, A, B):
    return [Point(x, y) for x in range(p) for y in range(p)
            if (y * y - x ** 3 - A * x - B) % p == 0]


def test_textbook_examples():
    E = Curve(PrimeField(5), 1, 1)
    assert add(Point(0, 1), Point(2, 1), E) == Point(3, 4)
    assert add(Point(0, 1), Point(0, 1), E) == Point(4, 2)
    assert add(Point(0, 1), Point(0, 4), E) == INFINITY
    assert add(INFINITY, Point(0, 1), E) == Point(0, 1)


def test_residue_ring_failure_reveals_factor():
    E = Curve(ResidueRing(35), 1, 1)
    P, Q = E.point(0, 1), E.point(crt([0, 2], [5, 7]), crt([1, 2], [5, 7]))
    with pytest.raises(AdditionFailure) as exc:
        add(P, Q, E)
    assert exc.value.g == 5 and exc.value.modulus == 35


def test_residue_ring_mismatched_y_fails():
    # same x, y values that agree mod 5 but are opposite mod 7
    E = Curve(ResidueRing(35), 1, 1)
    P = E.point(0, 1)
    Q = E.point(0, crt([1, 6], [5, 7]))
    with pytest.raises(AdditionFailure) as exc:
        add(P, Q, E)
    assert exc.value.g == 7


def test_singular_rejected():
    with pytest.raises(ValueError):
        Curve(PrimeField(7), 0, 0)
    with pytest.raises(ValueError):
        Curve(ResidueRing(35), 0, 5)
    with pytest.raises(ValueError):
        PrimeField(3)
    with pytest.raises(ValueError):
        ResidueRing(12)


def test_point_validation():
    E = Curve(PrimeField(5), 1, 1)
    with pytest.raises(ValueError):
        E.point(0, 2)
    assert E.contains(INFINITY)


def test_points_enumeration_matches_brute_force():
    for p in (5, 7, 11, 13):
        for E in small_curves(p):
            assert E.points() == [INFINITY] + brute_points(p, E.A, E.B)


def test_hasse_bound():
    for p in (5, 7, 11, 13, 17):
        for E in small_curves(p):
            assert abs(len(E.points()) - (p + 1)) <= 2 * p ** 0.5


@pytest.mark.parametrize("p", [5, 7])
def test_group_axioms_exhaustive(p):
    checked = 0
    for sc in brute_force_oracle(p):
        if sc.p != p:
            continue
        E, pts, T = sc.curve, sc.points, sc.table
        for P in pts:
            assert T[P, INFINITY] == P
            assert T[P, negate(P, E)] == INFINITY
            for Q in pts:
                R = T[P, Q]
                assert R == T[Q, P]
                assert E.contains(R)
                for S in pts:
                    assert T[R, S] == T[P, T[Q, S]]
                    checked += 1
    assert checked > 0


@pytest.mark.parametrize("p", [11, 13])
def test_group_axioms_sampled(p):
    rng = random.Random(p)
    for E in small_curves(p):
        pts = E.points()
        for _ in range(60):
            P, Q, S = (rng.choice(pts) for _ in range(3))
            assert add(P, Q, E) == add(Q, P, E)
            assert add(add(P, Q, E), S, E) == add(P, add(Q, S, E), E)
            assert add(P, negate(P, E), E) == INFINITY


@pytest.mark.parametrize("p,q", [(5, 7), (5, 11)])
def test_crt_consistency(p, q):
    rng = random.Random(p * q)
    m = p * q
    curves = [(A, B) for A in range(m) for B in range(m)
              if (4 * A ** 3 + 27 * B ** 2) % p and (4 * A ** 3 + 27 * B ** 2) % q]
    successes = failures = 0
    for A, B in rng.sample(curves, 25):
        Ep, Eq, Em = Curve(PrimeField(p), A, B), Curve(PrimeField(q), A, B), \
            Curve(ResidueRing(m), A, B)
        Pp, Pq = Ep.points()[1:], Eq.points()[1:]
        pts = [(P, Q, Em.point(crt([P.x, Q.x], [p, q]), crt([P.y, Q.y], [p, q])))
               for P in Pp for Q in Pq]
        for P1, Q1, X in pts:
            for P2, Q2, Y in pts:
                rp, rq = add(P1, P2, Ep), add(Q1, Q2, Eq)
                try:
                    Z = add(X, Y, Em)
                except AdditionFailure as exc:
                    failures += 1
                    g = exc.g
                    assert g in (p, q)
                    # the failure sits at a prime where the x-coordinates collide
                    assert (X.x - Y.x) % g == 0
                    continue
                successes += 1
                if Z.is_infinity:
                    assert rp.is_infinity and rq.is_infinity
                else:
                    assert reduce_point(Z, p) == rp and reduce_point(Z, q) == rq
    assert successes and failures


def test_scalar_mul_matches_repeated_addition():
    E = Curve(PrimeField(97), 2, 3)
    P = E.points()[5]
    R = INFINITY
    for n in range(60):
        assert scalar_mul(n, P, E) == R
        R = add(R, P, E)
    with pytest.raises(ValueError):
        scalar_mul(-1, P, E)


def test_group_order_annihilates():
    for p in (13, 31, 101):
        for E in list(small_curves(p))[:5]:
            pts = E.points()
            for P in pts[:10]:
                assert scalar_mul(len(pts), P, E) == INFINITY


def test_sub_inverts_add(rng):
    p = random_prime(128, rng)
    E = Curve(PrimeField(p), rng.randrange(p), rng.randrange(p))
    for _ in range(30):
        P, Q = random_point(E, rng), random_point(E, rng)
        assert sub(add(P, Q, E), Q, E) == P


def test_rational_curve_arithmetic():
    E = Curve(Rationals(), -2, 1)
    P = E.point(0, 1)
    Q = add(P, P, E)
    assert E.contains(Q) and isinstance(Q.x, Fraction)
    R = add(Q, P, E)
    assert reduce_point(R, 101) == add(reduce_point(Q, 101), reduce_point(P, 101),
                                       Curve(PrimeField(101), -2, 1))


def test_discriminant():
    assert discriminant(1, 1, PrimeField(5)) == (4 + 27) % 5


def test_json_roundtrip(rng):
    p = random_prime(256, rng)
    E = Curve(PrimeField(p), 3, 7)
    P = random_point(E, rng)
    E2 = Curve.from_json(json.loads(json.dumps(E.to_json())))
    assert E2 == E
    assert E2.point_from_json(json.loads(json.dumps(P.to_json()))) == P
    assert E2.point_from_json(INFINITY.to_json()) == INFINITY
    Q = Curve(Rationals(), Fraction(1, 3), 2)
    assert Curve.from_json(json.loads(json.dumps(Q.to_json()))) == Q


def test_random_point_on_curve(rng):
    E = Curve(PrimeField(1009), 2, 3)
    for _ in range(100):
        assert E.contains(random_point(E, rng))
