import random

import pytest
from hypothesis import strategies as st

LABELS = ["PER", "LOC", "DISO", "ANAT"]
WELL_FORMED = ["O"] + [f"{p}-{l}" for p in "BI" for l in LABELS]
ILL_FORMED = ["I-", "B-", "X-PER", "PER", "O-PER", "E-LOC", "S-DISO", ""]

WORKED_GOLD = ["B-PER", "I-PER", "O", "O", "O", "B-LOC"]
WORKED_PRED = ["B-PER", "O", "O", "O", "O", "B-LOC"]


@pytest.fixture
def worked_pair():
    return [list(WORKED_GOLD)], [list(WORKED_PRED)]


@pytest.fixture
def rng():
    return random.Random(20231019)


@st.composite
def entity_sets(draw, max_length=30, labels=LABELS):
    """Non-overlapping entity spans over a sentence of random length."""
    from nereval.tagging import EntitySpan

    length = draw(st.integers(0, max_length))
    pieces = draw(st.lists(
        st.tuples(st.integers(0, 3), st.integers(1, 4), st.sampled_from(labels)), max_size=10
    ))
    spans, i = [], 0
    for gap, size, label in pieces:
        start = i + gap
        end = start + size - 1
        if end >= length:
            break
        spans.append(EntitySpan(label, start, end))
        i = end + 1
    return spans, length


any_tags = st.lists(st.sampled_from(WELL_FORMED + ILL_FORMED), max_size=30)
