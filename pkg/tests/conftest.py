import numpy as np
import pytest

from lbblab.process import smile_ma_spec, stable_sin_ar_spec


@pytest.fixture(scope="session")
def smile_ma():
    return smile_ma_spec()


@pytest.fixture(scope="session")
def sin_ar():
    return stable_sin_ar_spec()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(name: str, ok: bool, detail: str):
        ACCEPTANCE[name] = (bool(ok), detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
