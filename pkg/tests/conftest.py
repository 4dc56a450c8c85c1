import numpy as np
import pytest

from qlossless.verify import random_density, random_unitary

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE_RESULTS.append((criterion, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rotated(probs, seed):
    """Density operator with the given spectrum in a Haar-random basis."""
    u = random_unitary(len(probs), seed)
    return (u * np.asarray(probs, dtype=float)) @ u.conj().T


__all__ = ["record", "rotated", "random_density"]
