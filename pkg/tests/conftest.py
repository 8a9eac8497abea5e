import numpy as np
import pytest

from nlft_lab import _backend, _kernels_py
from nlft_lab.potential import Potential

try:
    from nlft_lab import _kernels as _compiled
except ImportError:  # pragma: no cover - extension not built
    _compiled = None

BACKENDS = ["python"] + (["compiled"] if _compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per propagation kernel."""
    kernel = _kernels_py.propagate if request.param == "python" else _compiled.propagate
    monkeypatch.setattr(_backend, "propagate_kernel", kernel)
    return request.param


def random_piecewise(rng, max_support=4.0, max_q=2.0, max_pieces=5):
    n = int(rng.integers(1, max_pieces + 1))
    cuts = np.sort(rng.uniform(0, max_support, n - 1))
    breaks = [0.0, *cuts.tolist(), float(rng.uniform(cuts[-1] if n > 1 else 0.1, max_support))]
    breaks = sorted(set(breaks))
    values = rng.uniform(-max_q, max_q, len(breaks) - 1).tolist()
    return Potential.piecewise(breaks, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record_acceptance(number, passed, elapsed, limit, detail):
    line = (f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  "
            f"({elapsed:.2f}s / {limit:g}s)  {detail}")
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
