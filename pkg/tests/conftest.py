import sys
from pathlib import Path

import pytest

from couponfriends import kernels

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


def pytest_report_header(config):
    return f"couponfriends kernels: {kernels.BACKEND} (available: {', '.join(sorted(kernels.BACKENDS))})"


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, title, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
