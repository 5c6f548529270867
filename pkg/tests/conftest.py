from contextlib import contextmanager
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from zetascope.primes import generate_primes
from zetascope.stats import load_zeros

DATA = Path(__file__).parent / "data"
ZEROS_FILE = DATA / "zeros_1e5.txt"

settings.register_profile(
    "default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_GATES = {}


@contextmanager
def gate(key: str, title: str):
    """Record a pass/fail line for an acceptance criterion; failures still propagate."""
    entry = _GATES.setdefault(key, {"title": title, "ok": True, "notes": []})
    try:
        yield entry["notes"]
    except BaseException:
        entry["ok"] = False
        raise


def pytest_terminal_summary(terminalreporter):
    if not _GATES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_GATES, key=lambda k: int(k)):
        e = _GATES[key]
        status = "PASS" if e["ok"] else "FAIL"
        detail = "; ".join(e["notes"])
        terminalreporter.write_line(f"[{status}] {key}. {e['title']}" + (f" -- {detail}" if detail else ""))


@pytest.fixture(scope="session")
def true_zeros():
    return load_zeros(ZEROS_FILE)


@pytest.fixture(scope="session")
def primes_1e5():
    return generate_primes(100_000)
