"""Random generators and brute-force oracles shared by the test modules.

The oracles work on frozensets of labels, not bit masks, so they do not share
code paths with the library.
"""

from itertools import chain, combinations

import numpy as np
from hypothesis import strategies as st

from evidential import MassFunction, make_frame, validate_mass


def powerset(items):
    items = list(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))]


def as_sets(m):
    return {frozenset(a.labels): v for a, v in m.items()}


def bel_oracle(m, labels):
    target = frozenset(labels)
    return sum(v for a, v in as_sets(m).items() if a <= target)


def pl_oracle(m, labels):
    target = frozenset(labels)
    return sum(v for a, v in as_sets(m).items() if a & target)


def mobius_oracle(frame_labels, bel_by_set):
    """m(A) = sum over B subset of A of (-1)**|A - B| Bel(B)."""
    return {
        a: sum((-1) ** len(a - b) * bel_by_set[b] for b in powerset(a))
        for a in powerset(frame_labels)
    }


def dempster_oracle(m1, m2):
    """Returns ({set: mass}, conflict) from an explicit pairwise table."""
    joint = {}
    conflict = 0.0
    for a, v1 in as_sets(m1).items():
        for b, v2 in as_sets(m2).items():
            c = a & b
            if c:
                joint[c] = joint.get(c, 0.0) + v1 * v2
            else:
                conflict += v1 * v2
    return {c: v / (1 - conflict) for c, v in joint.items()}, conflict


def frame_of_size(n):
    return make_frame([f"w{i}" for i in range(n)])


def random_mass(rng, frame, max_focal=8):
    full = frame.full_bits
    count = int(rng.integers(1, min(max_focal, full) + 1))
    bits = rng.choice(np.arange(1, full + 1), size=count, replace=False)
    weights = rng.random(count) + 1e-3
    weights = weights / weights.sum()
    raw = {frame.from_bits(int(b)): float(w) for b, w in zip(bits, weights)}
    total = sum(raw.values())
    return validate_mass(frame, {a: v / total for a, v in raw.items()})


@st.composite
def frames(draw, min_size=1, max_size=6):
    return frame_of_size(draw(st.integers(min_size, max_size)))


@st.composite
def mass_functions(draw, frame=None, max_size=6, singletons_only=False, full_support=False):
    if frame is None:
        frame = draw(frames(max_size=max_size))
    if singletons_only:
        bits = [1 << i for i in range(frame.size)]
        if not full_support:
            bits = draw(st.lists(st.sampled_from(bits), min_size=1, max_size=frame.size, unique=True))
    else:
        bits = draw(st.lists(st.integers(1, frame.full_bits), min_size=1, max_size=6, unique=True))
    weights = draw(st.lists(st.floats(0.01, 1.0), min_size=len(bits), max_size=len(bits)))
    total = sum(weights)
    raw = {frame.from_bits(b): w / total for b, w in zip(bits, weights)}
    s = sum(raw.values())
    return validate_mass(frame, {a: v / s for a, v in raw.items()})


def masses_close(m1: MassFunction, m2: MassFunction, tol: float) -> bool:
    keys = set(m1) | set(m2)
    return all(abs(m1.mass(a) - m2.mass(a)) <= tol for a in keys)
