"""Hypothesis strategies shared by the test modules.

Vector-valued draws go through a seeded numpy generator so that shrinking
stays cheap and every example is a genuine random configuration.
"""

import numpy as np
from hypothesis import strategies as st

seeds = st.integers(0, 2**32 - 1)


def _unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


@st.composite
def unit_vectors(draw):
    return _unit(np.random.default_rng(draw(seeds)))


@st.composite
def distinct_unit_vectors(draw, n, max_abs_cos=0.999):
    rng = np.random.default_rng(draw(seeds))
    out = []
    while len(out) < n:
        v = _unit(rng)
        if all(abs(float(v @ w)) < max_abs_cos for w in out):
            out.append(v)
    return np.array(out)


@st.composite
def rotations(draw):
    rng = np.random.default_rng(draw(seeds))
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
