"""Exception hierarchy shared by the calculi and the command line."""


class EvidentialError(ValueError):
    """Base class for every validation failure raised by this package."""


class FrameError(EvidentialError):
    """Invalid frame, subset or refining."""


class FrameMismatchError(FrameError):
    """Operands belong to different frames of discernment."""


class MassFunctionError(EvidentialError):
    """A basic probability assignment violates its constraints."""


class TotalConflictError(EvidentialError):
    """Dempster's rule is undefined because the sources fully conflict."""


class GridError(EvidentialError):
    """Invalid simplex grid, grid point or constraint."""


class EvidenceError(EvidentialError):
    """Malformed or impossible evidence."""


class FormatError(EvidentialError):
    """Input JSON or CSV does not follow the expected schema."""
