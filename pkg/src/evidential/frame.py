"""
Frames of discernment, their subsets, and refinings between frames.

A :class:`Frame` is an ordered tuple of distinct outcome labels. Subsets are
stored as integer bit masks over the label indices, so a frame holds at most
64 outcomes. Every :class:`Subset` remembers its frame and set operations
between subsets of different frames raise :class:`FrameMismatchError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import FrameError, FrameMismatchError

MAX_FRAME_SIZE = 64
LABEL_SEPARATOR = "+"


@dataclass(frozen=True)
class Frame:
    labels: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise FrameError("a frame needs at least one outcome")
        if len(labels) > MAX_FRAME_SIZE:
            raise FrameError(f"a frame holds at most {MAX_FRAME_SIZE} outcomes, got {len(labels)}")
        for label in labels:
            if not isinstance(label, str) or not label:
                raise FrameError(f"outcome labels must be non-empty strings, got {label!r}")
            if LABEL_SEPARATOR in label:
                raise FrameError(f"outcome label {label!r} may not contain {LABEL_SEPARATOR!r}")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise FrameError(f"duplicate outcome labels: {dupes}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def full_bits(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise FrameError(f"{label!r} is not an outcome of frame {list(self.labels)}") from None

    def subset(self, labels: Iterable[str] = ()) -> Subset:
        """Subset made of the named outcomes. A single string is one label."""
        if isinstance(labels, str):
            labels = [labels]
        bits = 0
        for label in labels:
            bits |= 1 << self.index(label)
        return Subset(self, bits)

    def singleton(self, label: str) -> Subset:
        return Subset(self, 1 << self.index(label))

    def singletons(self) -> list[Subset]:
        return [Subset(self, 1 << i) for i in range(len(self.labels))]

    def from_bits(self, bits: int) -> Subset:
        return Subset(self, bits)

    @property
    def empty(self) -> Subset:
        return Subset(self, 0)

    @property
    def full(self) -> Subset:
        return Subset(self, self.full_bits)

    def all_subsets(self) -> Iterator[Subset]:
        """Every subset, in increasing bit-mask order (empty set first)."""
        for bits in range(self.full_bits + 1):
            yield Subset(self, bits)

    def parse_key(self, key: str) -> Subset:
        """Inverse of :meth:`Subset.key`; label order in the key is irrelevant."""
        if key == "":
            return self.empty
        return self.subset(key.split(LABEL_SEPARATOR))


@dataclass(frozen=True)
class Subset:
    frame: Frame
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits > self.frame.full_bits:
            raise FrameError(
                f"mask {self.bits:#x} sets bits outside a frame of size {self.frame.size}"
            )

    def _check(self, other: Subset) -> None:
        if not isinstance(other, Subset):
            raise TypeError(f"expected a Subset, got {type(other).__name__}")
        if other.frame is not self.frame and other.frame != self.frame:
            raise FrameMismatchError(
                f"subsets belong to different frames: {list(self.frame.labels)} "
                f"vs {list(other.frame.labels)}"
            )

    def union(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.frame, self.bits | other.bits)

    def intersection(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.frame, self.bits & other.bits)

    def difference(self, other: Subset) -> Subset:
        self._check(other)
        return Subset(self.frame, self.bits & ~other.bits)

    def complement(self) -> Subset:
        return Subset(self.frame, self.frame.full_bits ^ self.bits)

    def issubset(self, other: Subset) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def issuperset(self, other: Subset) -> bool:
        return other.issubset(self)

    def isdisjoint(self, other: Subset) -> bool:
        self._check(other)
        return self.bits & other.bits == 0

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset
    __ge__ = issuperset

    def __invert__(self) -> Subset:
        return self.complement()

    def __lt__(self, other: Subset) -> bool:
        return self.issubset(other) and self.bits != other.bits

    def __gt__(self, other: Subset) -> bool:
        return other < self

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, label: str) -> bool:
        return bool(self.bits >> self.frame.index(label) & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.frame.size) if self.bits >> i & 1)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.frame.labels[i] for i in self.indices)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_full(self) -> bool:
        return self.bits == self.frame.full_bits

    def key(self) -> str:
        """Serialization key: labels joined by ``+`` in frame order."""
        return LABEL_SEPARATOR.join(self.labels)

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"


def make_frame(labels: Sequence[str]) -> Frame:
    """Build a frame whose index order follows ``labels``.

    Raises FrameError on an empty list, duplicates or more than 64 labels.
    """
    return Frame(tuple(labels))


@dataclass(frozen=True)
class Refining:
    """A refining map carrying each coarse outcome to a block of the fine frame.

    ``images[i]`` is the fine subset assigned to ``coarse.labels[i]``. The images
    are non-empty, pairwise disjoint and cover the fine frame, so together they
    partition it.
    """

    coarse: Frame
    fine: Frame
    images: tuple[Subset, ...]

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.coarse.size:
            raise FrameError(
                f"refining needs one image per coarse outcome: "
                f"{self.coarse.size} outcomes, {len(images)} images"
            )
        seen = 0
        for label, image in zip(self.coarse.labels, images):
            if image.frame != self.fine:
                raise FrameMismatchError(f"image of {label!r} is not a subset of the fine frame")
            if image.is_empty:
                raise FrameError(f"image of {label!r} is empty (every outcome must refine to something)")
            if seen & image.bits:
                raise FrameError(f"image of {label!r} overlaps another image (images must be disjoint)")
            seen |= image.bits
        if seen != self.fine.full_bits:
            missing = self.fine.from_bits(self.fine.full_bits ^ seen)
            raise FrameError(f"images do not cover the fine frame; missing {missing!r}")

    def image(self, label: str) -> Subset:
        return self.images[self.coarse.index(label)]

    def refine(self, subset: Subset) -> Subset:
        return refine_subset(self, subset)

    def as_mapping(self) -> dict[str, list[str]]:
        return {label: list(image.labels) for label, image in zip(self.coarse.labels, self.images)}


def make_refining(
    coarse: Frame,
    fine: Frame,
    images: Sequence[Subset] | Mapping[str, Iterable[str]],
) -> Refining:
    """Validate a refining given as a list of fine subsets or as ``{coarse_label: fine_labels}``."""
    if isinstance(images, Mapping):
        unknown = set(images) - set(coarse.labels)
        if unknown:
            raise FrameError(f"refining names outcomes not in the coarse frame: {sorted(unknown)}")
        missing = [label for label in coarse.labels if label not in images]
        if missing:
            raise FrameError(f"refining has no image for coarse outcomes {missing}")
        images = [fine.subset(images[label]) for label in coarse.labels]
    return Refining(coarse, fine, tuple(images))


def refine_subset(refining: Refining, subset: Subset) -> Subset:
    """Image of a coarse subset: the union of the images of its outcomes."""
    if subset.frame != refining.coarse:
        raise FrameMismatchError("subset does not belong to the refining's coarse frame")
    bits = 0
    for i in subset.indices:
        bits |= refining.images[i].bits
    return Subset(refining.fine, bits)
