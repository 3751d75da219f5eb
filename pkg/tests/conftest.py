import numpy as np
import pytest

from wapeq.core import exp_bottom, gamma_one_plus_y, make_environment

# q used in the manufactured-solution and TL experiments
REFERENCE_Q = complex(0.252252311, -1.35135138e-2)

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def reference_env():
    """Manufactured-solution setup: alpha=2, p=q+1/2, gamma=1+y, s=exp(r), R=1."""
    return make_environment(2.0, REFERENCE_Q + 0.5, REFERENCE_Q, exp_bottom(), gamma_one_plus_y, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(rng, J):
    v = np.zeros(J + 1, dtype=complex)
    v[1:-1] = rng.normal(size=J - 1) + 1j * rng.normal(size=J - 1)
    return v


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
