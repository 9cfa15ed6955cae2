import random

import pytest


@pytest.fixture
def rng():
    return random.Random(1234)


def random_trace(rng, length, alphabet):
    return [f"T{rng.randrange(alphabet)}" for _ in range(length)]


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
