import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def admissible_states(min_rho=0.05, max_rho=5.0, max_vel=3.0, min_p=0.05, max_p=30.0):
    """Hypothesis strategy for a single primitive state ``(rho, u, v, w, p)``."""
    f = lambda lo, hi: st.floats(lo, hi, allow_nan=False, allow_infinity=False)  # noqa: E731
    return st.tuples(
        f(min_rho, max_rho), f(-max_vel, max_vel), f(-max_vel, max_vel), f(-max_vel, max_vel), f(min_p, max_p)
    ).map(np.array)


def random_states(rng, shape=(), min_rho=0.05, max_rho=5.0, max_vel=3.0, min_p=0.05, max_p=30.0):
    q = np.empty(tuple(shape) + (5,))
    q[..., 0] = rng.uniform(min_rho, max_rho, shape)
    q[..., 1:4] = rng.uniform(-max_vel, max_vel, tuple(shape) + (3,))
    q[..., 4] = rng.uniform(min_p, max_p, shape)
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# {{{ acceptance report

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion, shown at session end."""

    def record(number, ok: bool, detail: str) -> bool:
        line = f"criterion {str(number):>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[str(number)] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    # "9+" (a supplementary check) sorts right after 9
    for number in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("+")), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


# }}}
