import numpy as np
import pytest

from subspace_doa.array_signal import ArrayGeometry, NoiseSpec, SourceSpec, synthesize_snapshots

PAPER_GEOM = ArrayGeometry(8, 0.5)
PAPER_SOURCES = (SourceSpec(60.0, 0.35), SourceSpec(100.0, 0.36))


@pytest.fixture
def paper_geom():
    return PAPER_GEOM


@pytest.fixture
def paper_sources():
    return PAPER_SOURCES


@pytest.fixture
def noiseless_paper_snapshots():
    return synthesize_snapshots(PAPER_GEOM, PAPER_SOURCES, 5, NoiseSpec(0.0, 0))


def random_psd(m, rng):
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    R = Z @ Z.conj().T / m
    return 0.5 * (R + R.conj().T)


def subspace_distance(A, B):
    """Frobenius distance between the orthogonal projectors onto span(A) and span(B)."""
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    return np.linalg.norm(Qa @ Qa.conj().T - Qb @ Qb.conj().T)


# acceptance criteria report: (number, passed, detail), filled by test_acceptance
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
