import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_p(name: str) -> np.ndarray:
    """Fixture vector, divided by its sum (the reference values are rounded)."""
    p = np.array(json.loads((FIXTURES / name).read_text())["p"], dtype=float)
    return p / p.sum()


def expected() -> dict:
    return json.loads((FIXTURES / "expected.json").read_text())


def zero_based(sets):
    return [sorted(i - 1 for i in s) for s in sets]


def rand_dist(rng, n, floor=0.0):
    p = rng.dirichlet(np.ones(n))
    if floor:
        p = (p + floor) / (1 + n * floor)
    return p


@st.composite
def distributions(draw, min_size=1, max_size=6, positive=False):
    n = draw(st.integers(min_size, max_size))
    lo = 0.05 if positive else 0.0
    w = draw(st.lists(st.floats(lo, 1.0, allow_nan=False), min_size=n, max_size=n))
    w = np.array(w) + 1e-3
    return w / w.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
