import math
import sys

import pytest
from hypothesis import settings

settings.register_profile("charlab", deadline=None, max_examples=60)
settings.load_profile("charlab")


def trial_factor(n):
    """Plain trial division; the reference for factorisation tests."""
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path / "out"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_OUT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s[7:9])):
            terminalreporter.write_line(line)
