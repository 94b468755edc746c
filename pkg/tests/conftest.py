import sys

import pytest
from hypothesis import HealthCheck, settings

from rulelab import _core
from rulelab.txdb import TransactionDatabase

# kernel fixtures are stateless module handles, safe to share across examples
settings.register_profile("rulelab", derandomize=True, database=None,
                          suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("rulelab")

BACKENDS = [pytest.param(_core.pure, id="python")]
if _core.compiled is not None:
    BACKENDS.append(pytest.param(_core.compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernel(request):
    return request.param


@pytest.fixture
def tiny_db():
    # a,b / b / a,c
    return TransactionDatabase.from_label_rows([["a", "b"], ["b"], ["a", "c"]])


@pytest.fixture
def basket(tmp_path):
    def write(text, name="db.basket"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
