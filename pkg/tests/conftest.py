import numpy as np
import pytest

from diracjump.medium import MediumParams

# criterion id -> (passed, detail); filled by test_acceptance, printed at session end
ACCEPTANCE_LINES: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        ok, detail = ACCEPTANCE_LINES[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key:>2}: {detail}")


def draw_params(rng, n, a_range=2.0, m_max=3.0):
    """Propagating draws with E above both gaps and |a / v_F| < 3."""
    out = []
    for _ in range(n):
        m_l, m_r = rng.uniform(0.0, m_max, 2)
        v = rng.uniform(0.7, 2.0)
        gap = max(m_l, m_r) * v * v
        energy = gap + rng.uniform(0.05, 3.0) * max(gap, 0.5)
        out.append(MediumParams(m_l, m_r, v, rng.uniform(-a_range, a_range), energy))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
