import numpy as np
import pytest
from hypothesis import strategies as st

from sepcover.instance import CoverageInstance, generate


@pytest.fixture
def abc_instance():
    # A (w=5) covers both points, B (w=2) only the left one, C (w=2) only the right one
    return CoverageInstance(
        1.0,
        [(0.0, 0.3), (1.2, 0.3)],
        [(0.6, -0.2), (-0.5, -0.2), (1.7, -0.2)],
        [5, 2, 2],
    )


@st.composite
def small_instances(draw, max_n=10, max_m=10):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    seed = draw(st.integers(0, 10**6))
    profile = draw(st.sampled_from(["uniform", "clustered", "adversarial-overlap"]))
    return generate(n, m, seed, profile)


@st.composite
def raw_instances(draw, max_n=8, max_m=8):
    """Arbitrary coordinates on a coarse grid: many near-degenerate and uncovered cases."""
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    coord = st.integers(-12, 12).map(lambda v: v / 4)
    height = st.integers(0, 8).map(lambda v: v / 8)
    xs = draw(st.lists(coord, min_size=n, max_size=n, unique=True))
    pts = [(x, draw(height)) for x in xs]
    cens = [(draw(coord), -draw(height)) for _ in range(m)]
    ws = [draw(st.integers(1, 9)) for _ in range(m)]
    return CoverageInstance(1.0, pts, cens, ws)


def grid_points(rng: np.random.Generator, k: int, lo=-3.0, hi=3.0):
    return rng.uniform(lo, hi, size=(k, 2))


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
        lines.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
