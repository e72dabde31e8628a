"""
Meta-level probability distributions over a discretized probability simplex.

A first-order distribution over ``n`` outcomes is a grid point: an integer
count vector ``(k_1, ..., k_n)`` with ``sum(k) == d``, read as ``p_i = k_i / d``.
A :class:`MetaDistribution` puts a weight on every grid point and is updated
with Bayes' rule from counts of observed events.

Likelihoods are accumulated in log space and shifted by their maximum before
exponentiation, so ten thousand observations do not underflow. Binomial
coefficients are left out of the likelihood: they do not depend on the grid
point and cancel in the normalization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import EvidenceError, FrameMismatchError, GridError
from .frame import Frame, Subset

DEFAULT_MAX_POINTS = 10**8
WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SimplexGrid:
    outcomes: Frame
    denominator: int
    points: np.ndarray = field(repr=False)
    _lookup: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.points.setflags(write=False)
        object.__setattr__(self, "_lookup", {tuple(p): i for i, p in enumerate(self.points.tolist())})

    @property
    def n(self) -> int:
        return self.outcomes.size

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point: Sequence[int]) -> int:
        try:
            return self._lookup[tuple(int(k) for k in point)]
        except KeyError:
            raise GridError(f"{tuple(point)} is not a point of the d={self.denominator} grid") from None

    def probabilities(self) -> np.ndarray:
        return self.points / self.denominator

    def event_counts(self, event: Subset) -> np.ndarray:
        """``sum_{i in event} k_i`` for every point (exact integers)."""
        if event.frame != self.outcomes:
            raise FrameMismatchError("event is not a subset of the grid's outcome frame")
        return self.points[:, list(event.indices)].sum(axis=1)


def grid_size(n: int, d: int) -> int:
    return math.comb(d + n - 1, n - 1)


def compositions(n: int, d: int) -> np.ndarray:
    """All weak compositions of ``d`` into ``n`` parts, lexicographically ascending."""
    if n == 1:
        return np.array([[d]], dtype=np.int64)
    # stars and bars: bar positions among d + n - 1 slots
    bars = np.array(list(itertools.combinations(range(d + n - 1), n - 1)), dtype=np.int64)
    bars = bars.reshape(-1, n - 1)
    edges = np.hstack([
        np.full((len(bars), 1), -1, dtype=np.int64),
        bars,
        np.full((len(bars), 1), d + n - 1, dtype=np.int64),
    ])
    return np.diff(edges, axis=1) - 1


def build_grid(outcomes: Frame, d: int, max_points: int = DEFAULT_MAX_POINTS) -> SimplexGrid:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise GridError(f"denominator must be a positive integer, got {d!r}")
    size = grid_size(outcomes.size, int(d))
    if size > max_points:
        raise GridError(f"grid would have {size} points, above the cap of {max_points}")
    return SimplexGrid(outcomes, int(d), compositions(outcomes.size, int(d)))


@dataclass(frozen=True, eq=False)
class MetaDistribution:
    grid: SimplexGrid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (len(self.grid),):
            raise GridError(f"expected {len(self.grid)} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise GridError("meta-level weights must be finite and non-negative")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise GridError(f"meta-level weights must sum to 1, got {total!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def weight(self, point: Sequence[int]) -> float:
        return float(self.weights[self.grid.index(point)])

    def mass_on(self, indices: Iterable[int]) -> float:
        return math.fsum(self.weights[list(indices)])

    def support(self, tol: float = WEIGHT_TOL) -> np.ndarray:
        return np.flatnonzero(self.weights > tol)


def _normalized(weights: np.ndarray) -> np.ndarray:
    # fsum runs in index order and is correctly rounded
    return weights / math.fsum(weights)


def uniform_prior(grid: SimplexGrid) -> MetaDistribution:
    return MetaDistribution(grid, np.full(len(grid), 1.0 / len(grid)))


def peaked_prior(grid: SimplexGrid, center: Sequence[int], concentration: float) -> MetaDistribution:
    """Weight proportional to ``exp(-concentration * |p - center|_1 / d)``.

    Concentration 0 gives the uniform prior.
    """
    if concentration < 0:
        raise GridError(f"concentration must be non-negative, got {concentration}")
    c = np.asarray(grid.points[grid.index(center)])
    if concentration == 0:
        return uniform_prior(grid)
    dist = np.abs(grid.points - c).sum(axis=1) / grid.denominator
    logw = -concentration * dist
    return MetaDistribution(grid, _normalized(np.exp(logw - logw.max())))


@dataclass(frozen=True)
class EvidenceRecord:
    """``successes`` of ``trials`` observations fell in ``event``."""

    event: Subset
    successes: int
    trials: int

    def __post_init__(self):
        for name in ("successes", "trials"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise EvidenceError(f"{name} must be an integer, got {value!r}")
        if not 0 <= self.successes <= self.trials:
            raise EvidenceError(
                f"need 0 <= successes <= trials, got successes={self.successes}, trials={self.trials}"
            )

    @property
    def failures(self) -> int:
        return self.trials - self.successes


def _log_term(count: int, prob: float) -> float:
    if count == 0:
        return 0.0
    if prob == 0.0:
        return -math.inf
    return count * math.log(prob)


def event_likelihood(point: Sequence[int], evidence: EvidenceRecord) -> float:
    """Log-likelihood of the counts under one first-order distribution.

    ``successes * log P(A) + failures * log(1 - P(A))`` with ``P(A)`` read off
    the integer point; a zero-probability term with a positive count gives -inf.
    """
    point = [int(k) for k in point]
    if len(point) != evidence.event.frame.size:
        raise FrameMismatchError("grid point and event frame have different sizes")
    d = sum(point)
    inside = sum(point[i] for i in evidence.event.indices)
    return _log_term(evidence.successes, inside / d) + _log_term(evidence.failures, (d - inside) / d)


def log_likelihoods(grid: SimplexGrid, evidence: Iterable[EvidenceRecord]) -> np.ndarray:
    """Summed log-likelihood of all records, one value per grid point."""
    total = np.zeros(len(grid))
    d = grid.denominator
    for record in evidence:
        inside = grid.event_counts(record.event)
        # each distinct P(A) is a multiple of 1/d; tabulate once per record
        table = np.array([
            _log_term(record.successes, k / d) + _log_term(record.failures, (d - k) / d)
            for k in range(d + 1)
        ])
        total += table[inside]
    return total


def update(prior: MetaDistribution, evidence: Sequence[EvidenceRecord]) -> MetaDistribution:
    """Posterior meta-level distribution: prior times likelihood, renormalized.

    Points whose likelihood (or prior weight) is zero get weight exactly 0.
    Raises EvidenceError when every point is ruled out.
    """
    evidence = list(evidence)
    if not evidence:
        return prior
    with np.errstate(divide="ignore"):
        logpost = np.log(prior.weights) + log_likelihoods(prior.grid, evidence)
    top = logpost.max()
    if not np.isfinite(top):
        raise EvidenceError("evidence is impossible under every grid point; posterior undefined")
    return MetaDistribution(prior.grid, _normalized(np.exp(logpost - top)))


@dataclass(frozen=True)
class LinearConstraint:
    """``sum_{i in subset} p_i == target``."""

    subset: Subset
    target: Fraction

    def __post_init__(self):
        target = Fraction(self.target)
        if not 0 <= target <= 1:
            raise GridError(f"constraint target {target} lies outside [0, 1]")
        object.__setattr__(self, "target", target)

    def scaled_target(self, d: int) -> int:
        scaled = self.target * d
        if scaled.denominator != 1:
            raise GridError(f"target {self.target} is not a multiple of 1/{d}")
        return int(scaled)

    def holds(self, point: Sequence[int]) -> bool:
        d = sum(int(k) for k in point)
        return sum(int(point[i]) for i in self.subset.indices) == self.scaled_target(d)


def constraint_filter(grid: SimplexGrid, constraints: Sequence[LinearConstraint]) -> np.ndarray:
    """Indices of the grid points satisfying every constraint, in grid order.

    Comparison is in exact integer arithmetic on the count vectors.
    """
    keep = np.ones(len(grid), dtype=bool)
    for c in constraints:
        keep &= grid.event_counts(c.subset) == c.scaled_target(grid.denominator)
    return np.flatnonzero(keep)


@dataclass(frozen=True)
class Summary:
    expected: tuple[float, ...]
    support_size: int
    top: tuple[tuple[tuple[int, ...], float], ...]


def summarize(md: MetaDistribution, top_k: int = 5) -> Summary:
    """Mean first-order distribution, support size and heaviest points.

    Ties in the ranking are broken by grid order.
    """
    expected = md.weights @ md.grid.probabilities()
    order = np.argsort(-md.weights, kind="stable")[:top_k]
    top = tuple((tuple(int(k) for k in md.grid.points[i]), float(md.weights[i])) for i in order)
    return Summary(
        expected=tuple(float(x) for x in expected),
        support_size=int(np.count_nonzero(md.weights > WEIGHT_TOL)),
        top=top,
    )
