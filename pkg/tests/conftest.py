import numpy as np
import pytest

from wiretap_tas import stepwise


@pytest.fixture(autouse=True)
def validate_every_step(monkeypatch):
    # test mode: every incremental extension is checked against a rebuild
    monkeypatch.setattr(stepwise, "VALIDATE", True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    # repeat the acceptance verdicts, which -v would otherwise hide for passing tests
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            lines += [s for s in rep.capstdout.splitlines() if s.startswith("[C")]
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in sorted(lines):
            terminalreporter.write_line(line)
