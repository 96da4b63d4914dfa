import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from horolab.groups import catalog, enumerate_ball
from horolab.moebius import MoebiusTransform

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def sl2(draw, bound=3.0):
    """Random unit-determinant matrix built from a, b, c with a bounded away from 0."""
    a = draw(st.floats(0.2, bound)) * draw(st.sampled_from([1.0, -1.0]))
    b = draw(st.floats(-bound, bound))
    c = draw(st.floats(-bound, bound))
    return MoebiusTransform(a, b, c, (1.0 + b * c) / a)


@st.composite
def uhp_points(draw, xlim=2.0, ylo=0.25, yhi=4.0):
    return complex(draw(st.floats(-xlim, xlim)), draw(st.floats(ylo, yhi)))


boundary_points = st.one_of(st.just(math.inf), st.floats(-2.0, 2.0))


@pytest.fixture(scope="session")
def octagon():
    return catalog("octagon")


@pytest.fixture(scope="session")
def tight():
    return catalog("tight")


@pytest.fixture(scope="session")
def schottky():
    return catalog("schottky")


@pytest.fixture(scope="session")
def octagon_ball4(octagon):
    return enumerate_ball(octagon, 4)


@pytest.fixture(scope="session")
def tight_ball5(tight):
    return enumerate_ball(tight, 5)


@pytest.fixture(scope="session")
def schottky_ball6(schottky):
    return enumerate_ball(schottky, 6)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
