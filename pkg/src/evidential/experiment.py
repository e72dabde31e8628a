"""
The die / two-sensor thought experiment, run through both calculi.

An odd/even sensor and a large/small sensor each watch ``N`` throws of a
six-sided die and each report a 50/50 split. The metaprobability side updates
a uniform prior over a ``d``-grid of first-order distributions; the
Dempster-Shafer side estimates a bpa on each sensor frame, extends both to
the die frame and combines them with Dempster's rule.

The finite-sample bpa ``m(odd) = m(even) = 1/2 - eps/2, m(frame) = eps`` is
taken as given: ``eps`` is a scenario parameter rather than something
estimated from ``N``. In ``simulated`` mode with no explicit ``eps`` the
default mapping ``eps = 1 / (N + 1)`` is used; this mapping is a convenience,
not part of the original analysis.

Singleton "support" values are reported as singleton beliefs; for the bpas
built here the two coincide.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .belief import MassFunction, bel, dempster_combine, pl, validate_mass, vacuous_extension
from .errors import EvidentialError, FrameError
from .frame import Frame, Subset, make_frame, make_refining
from .metaprob import (
    EvidenceRecord,
    LinearConstraint,
    MetaDistribution,
    Summary,
    build_grid,
    constraint_filter,
    summarize,
    uniform_prior,
    update,
)

DIE = make_frame(["1", "2", "3", "4", "5", "6"])
ODD_EVEN = make_frame(["odd", "even"])
LARGE_SMALL = make_frame(["large", "small"])
OMEGA_OE = make_refining(ODD_EVEN, DIE, {"odd": ["1", "3", "5"], "even": ["2", "4", "6"]})
OMEGA_LS = make_refining(LARGE_SMALL, DIE, {"large": ["4", "5", "6"], "small": ["1", "2", "3"]})

# relabeling that swaps odd<->even and large<->small at once
DIE_SYMMETRY = {"1": "4", "2": "5", "3": "6", "4": "1", "5": "2", "6": "3"}

MODES = ("exact_half", "simulated")

# the nine focal candidates of the finite-eps combination, in display order
FOCAL_CANDIDATES = (
    ("1", "3"), ("2",), ("4", "6"), ("5",),
    ("1", "2", "3"), ("4", "5", "6"), ("1", "3", "5"), ("2", "4", "6"),
    ("1", "2", "3", "4", "5", "6"),
)


def sensor_constraints(frame: Frame = DIE) -> list[LinearConstraint]:
    """Each of odd, even, small, large has probability 1/2."""
    if frame != DIE:
        raise FrameError("the preset sensor constraints are defined on the six-face die frame only")
    half = Fraction(1, 2)
    return [
        LinearConstraint(frame.subset(["1", "2", "3"]), half),
        LinearConstraint(frame.subset(["4", "5", "6"]), half),
        LinearConstraint(frame.subset(["1", "3", "5"]), half),
        LinearConstraint(frame.subset(["2", "4", "6"]), half),
    ]


def default_epsilon_of_n(n: int) -> float:
    return 1.0 / (n + 1)


@dataclass(frozen=True)
class DieScenario:
    N: int = 10_000
    d: int = 6
    epsilon: float | None = None
    mode: str = "exact_half"
    seed: int = 0
    true_die: tuple[float, ...] = (1 / 6,) * 6
    epsilon_of_n: Callable[[int], float] = field(default=default_epsilon_of_n, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise EvidentialError(f"mode must be one of {MODES}, got {self.mode!r}")
        if isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 0:
            raise EvidentialError(f"N must be a non-negative integer, got {self.N!r}")
        if self.mode == "exact_half" and self.N % 2:
            raise EvidentialError(f"exact_half mode needs an even N, got {self.N}")
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise EvidentialError(f"d must be a positive integer, got {self.d!r}")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise EvidentialError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        die = tuple(float(p) for p in self.true_die)
        if len(die) != 6 or min(die) < 0 or abs(math.fsum(die) - 1.0) > 1e-9:
            raise EvidentialError("true_die must be six non-negative probabilities summing to 1")
        object.__setattr__(self, "true_die", die)

    @property
    def effective_epsilon(self) -> float:
        if self.epsilon is not None:
            return float(self.epsilon)
        if self.mode == "exact_half":
            return 0.0
        eps = float(self.epsilon_of_n(self.N))
        if not 0.0 <= eps <= 1.0:
            raise EvidentialError(f"epsilon_of_n({self.N}) = {eps} lies outside [0, 1]")
        return eps

    def provenance(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "epsilon_of_n"}
        out["true_die"] = list(self.true_die)
        out["effective_epsilon"] = self.effective_epsilon
        return out


@dataclass(frozen=True)
class SensorCounts:
    """Throws reported odd by the first sensor and large by the second, of N each."""

    odd: int
    large: int
    trials: int

    @property
    def odd_frequency(self) -> float:
        return self.odd / self.trials if self.trials else 0.5

    @property
    def large_frequency(self) -> float:
        return self.large / self.trials if self.trials else 0.5


def sensor_counts(s: DieScenario) -> SensorCounts:
    if s.mode == "exact_half":
        return SensorCounts(s.N // 2, s.N // 2, s.N)
    rng = np.random.default_rng(s.seed)
    faces = np.arange(1, 7)
    first = rng.choice(faces, size=s.N, p=s.true_die)
    second = rng.choice(faces, size=s.N, p=s.true_die)
    return SensorCounts(int(np.count_nonzero(first % 2 == 1)), int(np.count_nonzero(second >= 4)), s.N)


def sensor_evidence(counts: SensorCounts) -> list[EvidenceRecord]:
    return [
        EvidenceRecord(DIE.subset(["1", "3", "5"]), counts.odd, counts.trials),
        EvidenceRecord(DIE.subset(["4", "5", "6"]), counts.large, counts.trials),
    ]


@dataclass(frozen=True)
class MetaprobResult:
    posterior: MetaDistribution
    summary: Summary
    constrained: np.ndarray
    constrained_mass: float
    evidence: tuple[EvidenceRecord, ...]

    def constraint_partition(self) -> dict[Fraction, int]:
        """How many constrained points have each value of p(1) + p(3)."""
        grid = self.posterior.grid
        k13 = grid.points[self.constrained][:, [0, 2]].sum(axis=1)
        out: dict[Fraction, int] = {}
        for k in sorted(k13.tolist(), reverse=True):
            key = Fraction(k, grid.denominator)
            out[key] = out.get(key, 0) + 1
        return out


def run_metaprob(s: DieScenario) -> MetaprobResult:
    grid = build_grid(DIE, s.d)
    evidence = sensor_evidence(sensor_counts(s))
    posterior = update(uniform_prior(grid), evidence)
    constrained = constraint_filter(grid, sensor_constraints())
    return MetaprobResult(
        posterior=posterior,
        summary=summarize(posterior),
        constrained=constrained,
        constrained_mass=posterior.mass_on(constrained),
        evidence=tuple(evidence),
    )


def estimate_bpa(event_frame: Frame, epsilon: float, frequency: float = 0.5) -> MassFunction:
    """Sensor bpa: ``(1 - eps)`` split by the observed frequency, ``eps`` on the frame.

    At the default frequency 1/2 this is ``m(a) = m(b) = 1/2 - eps/2`` and
    ``m(frame) = eps``; at ``eps = 0`` it has no mass left on the frame.
    ``frequency`` belongs to the first label of the binary frame.
    """
    if event_frame.size != 2:
        raise FrameError(f"sensor frames are binary, got {list(event_frame.labels)}")
    if not 0.0 <= epsilon <= 1.0:
        raise EvidentialError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not 0.0 <= frequency <= 1.0:
        raise EvidentialError(f"frequency must lie in [0, 1], got {frequency}")
    first, second = event_frame.singletons()
    return validate_mass(event_frame, {
        first: frequency - frequency * epsilon,
        second: (1.0 - frequency) - (1.0 - frequency) * epsilon,
        event_frame.full: epsilon,
    })


def ds_closed_form(epsilon: float) -> dict[tuple[str, ...], float]:
    """Exact combined masses for the symmetric sensor bpas at a given eps."""
    a = 0.5 - epsilon / 2
    out = {}
    for labels in FOCAL_CANDIDATES:
        if len(labels) <= 2:
            out[labels] = a * a
        elif len(labels) == 3:
            out[labels] = a * epsilon
        else:
            out[labels] = epsilon * epsilon
    return out


def truncated_singletons(epsilon: float) -> dict[str, tuple[float, float]]:
    """Singleton (Bel, Pl) to first order in eps, dropping eps**2 terms."""
    return {
        label: ((0.25 - epsilon / 2) if label in ("2", "5") else 0.0, 0.25 + epsilon / 2)
        for label in DIE.labels
    }


@dataclass(frozen=True)
class DsResult:
    epsilon: float
    bpa_odd_even: MassFunction
    bpa_large_small: MassFunction
    extended_odd_even: MassFunction
    extended_large_small: MassFunction
    combined: MassFunction
    conflict: float

    def singleton_rows(self) -> list[dict]:
        approx = truncated_singletons(self.epsilon)
        rows = []
        for single in DIE.singletons():
            (label,) = single.labels
            rows.append({
                "outcome": label,
                "m": self.combined.mass(single),
                "bel": bel(self.combined, single),
                "pl": pl(self.combined, single),
                "bel_first_order": approx[label][0],
                "pl_first_order": approx[label][1],
            })
        return rows

    def focal_rows(self) -> list[dict]:
        closed = ds_closed_form(self.epsilon)
        rows = []
        for labels in FOCAL_CANDIDATES:
            a = DIE.subset(labels)
            rows.append({
                "subset": a.key(),
                "m": self.combined.mass(a),
                "m_closed_form": closed[labels],
                "bel": bel(self.combined, a),
                "pl": pl(self.combined, a),
            })
        return rows


def run_ds(s: DieScenario) -> DsResult:
    eps = s.effective_epsilon
    counts = sensor_counts(s)
    m_oe = estimate_bpa(ODD_EVEN, eps, counts.odd_frequency)
    m_ls = estimate_bpa(LARGE_SMALL, eps, counts.large_frequency)
    ext_oe = vacuous_extension(m_oe, OMEGA_OE)
    ext_ls = vacuous_extension(m_ls, OMEGA_LS)
    combined, conflict = dempster_combine(ext_oe, ext_ls)
    return DsResult(eps, m_oe, m_ls, ext_oe, ext_ls, combined, conflict)


def permute_subset(subset: Subset, mapping: dict[str, str] = DIE_SYMMETRY) -> Subset:
    return subset.frame.subset(mapping[label] for label in subset.labels)


def permute_mass(m: MassFunction, mapping: dict[str, str] = DIE_SYMMETRY) -> MassFunction:
    return MassFunction(m.frame, {permute_subset(a, mapping).bits: v for a, v in m.items()})


def permute_weights(md: MetaDistribution, mapping: dict[str, str] = DIE_SYMMETRY) -> np.ndarray:
    """Weights of ``md`` after relabeling the outcomes by ``mapping``."""
    frame = md.grid.outcomes
    target = [frame.index(mapping[label]) for label in frame.labels]
    moved = np.zeros_like(md.grid.points)
    moved[:, target] = md.grid.points
    out = np.empty(len(md.grid))
    for i, point in enumerate(moved.tolist()):
        out[md.grid.index(point)] = md.weights[i]
    return out


@dataclass(frozen=True)
class ComparisonReport:
    scenario: DieScenario
    metaprob: MetaprobResult
    ds: DsResult
    ds_symmetric: bool
    metaprob_symmetry_error: float

    @property
    def metaprob_symmetric(self) -> bool:
        return self.metaprob_symmetry_error <= 1e-12


def compare(s: DieScenario) -> ComparisonReport:
    mp = run_metaprob(s)
    ds = run_ds(s)
    return ComparisonReport(
        scenario=s,
        metaprob=mp,
        ds=ds,
        ds_symmetric=permute_mass(ds.combined) == ds.combined,
        metaprob_symmetry_error=float(np.max(np.abs(permute_weights(mp.posterior) - mp.posterior.weights))),
    )
