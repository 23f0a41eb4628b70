import math

import pytest
from hypothesis import strategies as st

from singularity_pricing.model import ModelParams


@st.composite
def model_params(draw, delta_theta=None, p_max=0.02):
    """Valid parameter vectors in a neighbourhood of the calibrated economy."""
    return ModelParams(
        beta=draw(st.floats(0.85, 0.99)),
        g=draw(st.floats(0.0, 0.05)),
        gamma=draw(st.floats(1.5, 8.0)),
        p=draw(st.floats(0.0, p_max)),
        xi=draw(st.floats(0.0, 1.0)),
        eta=draw(st.floats(0.0, 2.0)),
        phi=draw(st.floats(0.3, 1.0)),
        theta=draw(st.floats(0.05, 0.9)),
        delta_theta=draw(st.floats(0.0, 0.5)) if delta_theta is None else delta_theta,
    )


def rel_err(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def baseline():
    return ModelParams()


# Table 1 as printed: (p, xi) -> (AI, non-AI, ratio)
PUBLISHED_TABLE1 = {
    (0.001, 0.00): (10.4, 9.8, 1.1),
    (0.001, 0.05): (10.4, 9.8, 1.1),
    (0.001, 0.10): (10.3, 9.7, 1.1),
    (0.001, 0.20): (10.2, 9.7, 1.1),
    (0.002, 0.00): (11.5, 10.1, 1.1),
    (0.002, 0.05): (11.4, 10.0, 1.1),
    (0.002, 0.10): (11.3, 10.0, 1.1),
    (0.002, 0.20): (11.0, 9.9, 1.1),
    (0.005, 0.00): (15.5, 11.1, 1.4),
    (0.005, 0.05): (15.0, 11.0, 1.4),
    (0.005, 0.10): (14.6, 10.8, 1.3),
    (0.005, 0.20): (13.8, 10.6, 1.3),
    (0.008, 0.00): (21.2, 12.3, 1.7),
    (0.008, 0.05): (20.2, 12.1, 1.7),
    (0.008, 0.10): (19.2, 11.8, 1.6),
    (0.008, 0.20): (17.4, 11.4, 1.5),
    (0.010, 0.00): (26.5, 13.3, 2.0),
    (0.010, 0.05): (24.8, 12.9, 1.9),
    (0.010, 0.10): (23.2, 12.6, 1.8),
    (0.010, 0.20): (20.5, 12.0, 1.7),
}


def isclose(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
