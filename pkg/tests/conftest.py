from __future__ import annotations

import numpy as np
import pytest

from fdpc.construction import CodeSpec, SparseBitMatrix, build_base, build_order_s, shorten

# column index pairs (1-based rows) of the worked t=2 base matrix, in its column order
EXAMPLE1_PAIRS = [(1, 2), (1, 4), (2, 3), (2, 5), (3, 4), (3, 6), (4, 5), (4, 7),
                  (5, 6), (5, 8), (6, 7), (1, 6), (7, 8), (2, 7), (1, 8), (3, 8)]
# columns 1, 2, 3, 5 of that matrix form the loop 1-2-3-4-1
EXAMPLE2_COLUMNS = [0, 1, 2, 4]

ACCEPTANCE_LINES: list[str] = []


def example1_dense() -> np.ndarray:
    m = np.zeros((8, 16), dtype=np.uint8)
    for c, (i, j) in enumerate(EXAMPLE1_PAIRS):
        m[i - 1, c] = m[j - 1, c] = 1
    return m


@pytest.fixture(scope="session")
def example1() -> SparseBitMatrix:
    return SparseBitMatrix.from_dense(example1_dense())


@pytest.fixture(scope="session")
def example2_word() -> np.ndarray:
    x = np.zeros(16, dtype=np.uint8)
    x[EXAMPLE2_COLUMNS] = 1
    return x


@pytest.fixture(scope="session")
def hb2() -> SparseBitMatrix:
    return build_base(2)


@pytest.fixture(scope="session")
def code256() -> SparseBitMatrix:
    return build_order_s(CodeSpec.from_seed(8, 2, 1))


@pytest.fixture(scope="session")
def spec1023() -> CodeSpec:
    return shorten(CodeSpec.from_seed(16, 2, 1), {4: 1})


@pytest.fixture(scope="session")
def code1023(spec1023) -> SparseBitMatrix:
    return build_order_s(spec1023)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
