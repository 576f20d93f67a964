import random

import pytest

from eclcg.curve import Curve, PrimeField
from eclcg.generator import GeneratorInstance, emit_sequence
from eclcg.harness import sample_instance

ACCEPTANCE = {}


def record(criterion, ok, detail=""):
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def small_instance():
    """A fixed attackable instance over p = 1009."""
    p = 1009
    curve = Curve(PrimeField(p), 2, 3)
    pts = curve.points()[1:]
    r = random.Random(5)
    while True:
        G, W0 = r.choice(pts), r.choice(pts)
        inst = GeneratorInstance(curve, G, W0)
        s = emit_sequence(inst, 30)
        head = s.values[:7]
        if len(s.values) == 30 and len(set(head)) == 7 and not any(
                "hit_plus_minus_G" in f for f in s.flags):
            return inst


def make_instance(bits, seed, revealed=7):
    return sample_instance(bits, random.Random(seed), revealed)[0]
