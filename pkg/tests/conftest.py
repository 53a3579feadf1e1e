import numpy as np
import pytest
from hypothesis import strategies as st

from ildlimit.bucketizer import AggregatedDataset


@st.composite
def datasets(draw, max_buckets=8, max_count=20, both_classes=True):
    """Aggregated datasets with nonempty buckets; optionally both classes present."""
    n = draw(st.integers(1, max_buckets))
    counts = draw(
        st.lists(
            st.tuples(st.integers(0, max_count), st.integers(0, max_count)).filter(
                lambda c: c[0] + c[1] > 0
            ),
            min_size=n,
            max_size=n,
        )
    )
    if both_classes:
        total0 = sum(c[0] for c in counts)
        total1 = sum(c[1] for c in counts)
        if total0 == 0:
            counts[0] = (1, counts[0][1])
        if total1 == 0:
            counts[-1] = (counts[-1][0], 1)
    return AggregatedDataset.from_counts(counts)


def random_dataset(rng, max_buckets, max_count, both_classes=True):
    n = int(rng.integers(1, max_buckets + 1))
    while True:
        m0 = rng.integers(0, max_count + 1, size=n)
        m1 = rng.integers(0, max_count + 1, size=n)
        ok = (m0 + m1) > 0
        if ok.all() and (not both_classes or (m0.sum() > 0 and m1.sum() > 0)):
            return AggregatedDataset.from_counts(np.column_stack([m0, m1]))


@pytest.fixture
def toy():
    # Two buckets used throughout: (m0, m1) = (2, 5) and (3, 1).
    return AggregatedDataset.from_counts([(2, 5), (3, 1)])


# Filled by test_acceptance.py; printed once at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
