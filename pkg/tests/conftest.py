import numpy as np
import pytest

from fdfb.bootstrap import generate_bootstrap_keys, generate_secret_keys
from fdfb.params import get_preset
from fdfb.sampling import Sampler

# criterion number -> (ok, detail), filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")


@pytest.fixture(scope="session")
def toy_params():
    return get_preset("TOY")


@pytest.fixture(scope="session")
def toy_secrets(toy_params):
    return generate_secret_keys(toy_params, Sampler("toy-tests").fork("secrets"))


@pytest.fixture(scope="session")
def toy_keys(toy_params, toy_secrets):
    return generate_bootstrap_keys(toy_params, toy_secrets, Sampler("toy-tests").fork("eval"))


@pytest.fixture
def sampler(request):
    return Sampler(request.node.name)


def second_moment(errors) -> float:
    e = np.asarray(errors, dtype=np.float64)
    return float(np.mean(e * e))
