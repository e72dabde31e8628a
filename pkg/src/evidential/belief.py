"""
Basic probability assignments and the belief functions they induce.

Masses are stored sparsely: only subsets with mass above :data:`ZERO_TOL` are
kept. Belief and plausibility are evaluated on demand from the focal elements.
The dense ``2**n`` tables are only built by :func:`bel_table`,
:func:`pl_table` and the inverse :func:`mass_from_bel`.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping
from functools import reduce
from typing import Iterable, Iterator, NamedTuple

from .errors import FrameMismatchError, MassFunctionError, TotalConflictError
from .frame import Frame, Refining, Subset, refine_subset

ZERO_TOL = 1e-12
SUM_TOL = 1e-12
INVERSION_TOL = 1e-9


class MassFunction(Mapping):
    """An immutable basic probability assignment over a frame.

    Behaves as a read-only mapping from focal :class:`Subset` to mass. Use
    :meth:`mass` to read the (possibly zero) mass of an arbitrary subset.
    Construct through :func:`validate_mass` or :meth:`from_labels`.
    """

    __slots__ = ("frame", "_m")

    def __init__(self, frame: Frame, masses: Mapping[int, float]):
        # trusted constructor: callers have already validated ``masses``
        self.frame = frame
        self._m = dict(sorted(masses.items()))

    @classmethod
    def from_labels(cls, frame: Frame, masses: Mapping[Iterable[str] | str, float]) -> MassFunction:
        """``{("1", "3"): 0.5, "odd": ...}`` style construction, validated."""
        return validate_mass(frame, {frame.subset(k): v for k, v in masses.items()})

    @classmethod
    def vacuous(cls, frame: Frame) -> MassFunction:
        return cls(frame, {frame.full_bits: 1.0})

    def __getitem__(self, subset: Subset) -> float:
        self._check(subset)
        return self._m[subset.bits]

    def __iter__(self) -> Iterator[Subset]:
        return (Subset(self.frame, bits) for bits in self._m)

    def __len__(self) -> int:
        return len(self._m)

    def __eq__(self, other) -> bool:
        if isinstance(other, MassFunction):
            return self.frame == other.frame and self._m == other._m
        return NotImplemented

    __hash__ = None

    def _check(self, subset: Subset) -> None:
        if subset.frame != self.frame:
            raise FrameMismatchError("subset does not belong to the mass function's frame")

    def mass(self, subset: Subset) -> float:
        self._check(subset)
        return self._m.get(subset.bits, 0.0)

    def bit_items(self) -> list[tuple[int, float]]:
        return list(self._m.items())

    def to_dict(self) -> dict:
        return {
            "frame": list(self.frame.labels),
            "masses": {Subset(self.frame, bits).key(): v for bits, v in self._m.items()},
        }

    def __repr__(self) -> str:
        body = ", ".join(f"{Subset(self.frame, b)!r}: {v:.6g}" for b, v in self._m.items())
        return f"MassFunction({body})"


def validate_mass(frame: Frame, raw: Mapping[Subset, float]) -> MassFunction:
    """Check ``m(empty) = 0``, non-negativity and unit total, then prune zeros.

    Entries naming the same subset twice are summed.
    """
    masses: dict[int, float] = {}
    for subset, value in raw.items():
        if not isinstance(subset, Subset):
            raise TypeError(f"mass keys must be Subsets, got {type(subset).__name__}")
        if subset.frame != frame:
            raise FrameMismatchError(f"{subset!r} is not a subset of frame {list(frame.labels)}")
        value = float(value)
        if not math.isfinite(value):
            raise MassFunctionError(f"m({subset!r}) = {value} is not a finite number")
        if value < -ZERO_TOL:
            raise MassFunctionError(f"m({subset!r}) = {value} is negative; masses must lie in [0, 1]")
        if subset.is_empty and abs(value) > ZERO_TOL:
            raise MassFunctionError(f"m(∅) must be 0, got {value}")
        masses[subset.bits] = masses.get(subset.bits, 0.0) + value
    total = math.fsum(masses.values())
    if abs(total - 1.0) > SUM_TOL:
        raise MassFunctionError(f"masses must sum to 1 (Σ m(A) = 1), got {total!r}")
    for bits, value in masses.items():
        if value > 1.0 + ZERO_TOL:
            raise MassFunctionError(f"m({Subset(frame, bits)!r}) = {value} exceeds 1")
    kept = {bits: v for bits, v in masses.items() if bits and v > ZERO_TOL}
    return MassFunction(frame, kept)


def bel(m: MassFunction, a: Subset) -> float:
    """Lower probability: total mass of focal elements contained in ``a``."""
    m._check(a)
    return math.fsum(v for bits, v in m._m.items() if bits & ~a.bits == 0)


def pl(m: MassFunction, a: Subset) -> float:
    """Upper probability: total mass of focal elements meeting ``a``.

    Equal to ``1 - bel(m, ~a)`` up to rounding; summing the intersecting masses
    directly keeps ``pl(m, empty) == 0`` exact.
    """
    m._check(a)
    return math.fsum(v for bits, v in m._m.items() if bits & a.bits)


def bel_table(m: MassFunction) -> dict[Subset, float]:
    return {a: bel(m, a) for a in m.frame.all_subsets()}


def pl_table(m: MassFunction) -> dict[Subset, float]:
    return {a: pl(m, a) for a in m.frame.all_subsets()}


def mobius_inverse(values: list[float]) -> list[float]:
    """In-place-style subset Möbius inversion over a dense ``2**n`` table.

    Returns ``m`` with ``m[A] = sum_{B <= A} (-1)**|A - B| * values[B]``.
    """
    m = list(values)
    size = len(m)
    bit = 1
    while bit < size:
        for mask in range(size):
            if mask & bit:
                m[mask] -= m[mask ^ bit]
        bit <<= 1
    return m


def mass_from_bel(frame: Frame, bel_values: Mapping[Subset, float]) -> MassFunction:
    """Recover the unique mass function whose belief function is ``bel_values``.

    ``bel_values`` must cover all ``2**n`` subsets. Raises MassFunctionError when
    the table is not a belief function (negative inverted mass beyond 1e-9,
    ``Bel(empty) != 0`` or ``Bel(frame) != 1``).
    """
    dense = [None] * (frame.full_bits + 1)
    for subset, value in bel_values.items():
        if subset.frame != frame:
            raise FrameMismatchError(f"{subset!r} is not a subset of frame {list(frame.labels)}")
        dense[subset.bits] = float(value)
    missing = [frame.from_bits(b) for b, v in enumerate(dense) if v is None]
    if missing:
        raise MassFunctionError(f"belief table is missing {len(missing)} subsets, e.g. {missing[0]!r}")
    if abs(dense[0]) > INVERSION_TOL:
        raise MassFunctionError(f"Bel(∅) must be 0, got {dense[0]}")
    masses = mobius_inverse(dense)
    raw = {}
    for bits, value in enumerate(masses):
        if value < -INVERSION_TOL:
            raise MassFunctionError(
                f"not a belief function: inversion gives m({frame.from_bits(bits)!r}) = {value:.3g} < 0"
            )
        if bits and value > ZERO_TOL:
            raw[frame.from_bits(bits)] = value
    total = math.fsum(raw.values())
    if abs(total - 1.0) > INVERSION_TOL:
        raise MassFunctionError(f"Bel(Θ) must be 1, got {total!r}")
    # absorb inversion round-off so the sum check in validate_mass is met
    if total != 1.0:
        raw = {a: v / total for a, v in raw.items()}
    return validate_mass(frame, raw)


def focal_elements(m: MassFunction) -> list[Subset]:
    return list(m)


def core(m: MassFunction) -> Subset:
    return m.frame.from_bits(reduce(lambda acc, bits: acc | bits, m._m, 0))


class Classification(str, enum.Enum):
    SUPPORT = "support"
    QUASI_SUPPORT = "quasi_support"
    OTHER = "other"


def is_quasi_support(m: MassFunction) -> bool:
    """All focal elements pairwise disjoint (mass on mutually exclusive sets)."""
    seen = 0
    for bits in m._m:
        if seen & bits:
            return False
        seen |= bits
    return True


def is_support(m: MassFunction) -> bool:
    """The core carries mass itself, leaving every proper part of it with Bel < Pl."""
    c = core(m)
    if m.mass(c) <= ZERO_TOL:
        return False
    for bits in range(1, c.bits):
        if bits & ~c.bits:
            continue
        a = m.frame.from_bits(bits)
        if not bel(m, a) < pl(m, a):
            return False
    return True


def classify(m: MassFunction) -> Classification:
    """Support test first, then quasi-support; ``OTHER`` when neither holds.

    A mass function with a single focal element passes both tests and is
    reported as ``SUPPORT``. Note these are the narrow readings described in
    the module docs, not Shafer's separable/support hierarchy.
    """
    if is_support(m):
        return Classification.SUPPORT
    if is_quasi_support(m):
        return Classification.QUASI_SUPPORT
    return Classification.OTHER


def vacuous_extension(m: MassFunction, refining: Refining) -> MassFunction:
    """Carry each coarse focal mass onto its image in the fine frame."""
    if m.frame != refining.coarse:
        raise FrameMismatchError("mass function is not over the refining's coarse frame")
    moved = {}
    for subset, value in m.items():
        moved[refine_subset(refining, subset).bits] = value
    return MassFunction(refining.fine, moved)


class Combination(NamedTuple):
    mass: MassFunction
    conflict: float


def dempster_combine(m1: MassFunction, m2: MassFunction) -> Combination:
    """Dempster's rule of combination.

    Products of focal masses are pooled on the intersections; the mass landing
    on the empty set (the conflict) is removed and the rest renormalized by
    ``1 / (1 - conflict)``. The rule presumes the two sources are distinct,
    independent bodies of evidence, which cannot be checked here.

    Raises TotalConflictError when the conflict is 1 within 1e-12.
    """
    if m1.frame != m2.frame:
        raise FrameMismatchError(
            f"cannot combine mass functions over {list(m1.frame.labels)} and {list(m2.frame.labels)}"
        )
    pooled: dict[int, list[float]] = {}
    for b1, v1 in m1._m.items():
        for b2, v2 in m2._m.items():
            pooled.setdefault(b1 & b2, []).append(v1 * v2)
    conflict = math.fsum(pooled.pop(0, []))
    if conflict >= 1.0 - SUM_TOL:
        raise TotalConflictError(f"total conflict ({conflict!r}): Dempster's rule is undefined")
    combined = {bits: math.fsum(products) for bits, products in pooled.items()}
    if conflict > 0.0:
        norm = math.fsum(combined.values())
        combined = {bits: v / norm for bits, v in combined.items()}
    return Combination(MassFunction(m1.frame, {b: v for b, v in combined.items() if v > ZERO_TOL}), conflict)


def combine_all(masses: Iterable[MassFunction]) -> Combination:
    """Fold :func:`dempster_combine` over ``masses`` in order.

    The reported conflict is the one of the final pairwise step.
    """
    masses = list(masses)
    if not masses:
        raise ValueError("combine_all needs at least one mass function")
    result = Combination(masses[0], 0.0)
    for m in masses[1:]:
        result = dempster_combine(result.mass, m)
    return result
