"""Shared fixtures: seeded scene generators and an arbitrary-precision Hankel oracle."""

from __future__ import annotations

import numpy as np
import pytest

from multipoint.direct import ScattererSet


def mp_hankel0(x: float, dps: int = 40) -> complex:
    """H0^(1)(x) from mpmath at ``dps`` digits, independent of the package's code path."""
    import mpmath as mp

    with mp.workdps(dps):
        xm = mp.mpf(x)
        return complex(mp.besselj(0, xm) + 1j * mp.bessely(0, xm))


def random_strengths(rng, n: int, lo: float = 0.5, hi: float = 2.0) -> np.ndarray:
    mag = rng.uniform(lo, hi, n)
    return mag * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def random_points(rng, n: int, d: int, half_width: float = 0.5, min_sep: float = 0.0, tries: int = 10_000):
    """n points uniform in [-half_width, half_width]^d with pairwise separation >= min_sep."""
    pts = []
    for _ in range(tries):
        if len(pts) == n:
            break
        cand = rng.uniform(-half_width, half_width, d)
        if all(np.linalg.norm(cand - q) >= min_sep for q in pts):
            pts.append(cand)
    if len(pts) != n:
        raise RuntimeError("could not place points with the requested separation")
    return np.array(pts).reshape(n, d)


def random_scene(rng, n: int, d: int, half_width: float = 0.5, min_sep: float = 0.05, **kw) -> ScattererSet:
    return ScattererSet(d, random_points(rng, n, d, half_width, min_sep), random_strengths(rng, n, **kw))


def random_unit(rng, d: int) -> np.ndarray:
    v = rng.normal(size=d)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled by test_acceptance and echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
