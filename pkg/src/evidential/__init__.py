"""Belief functions and meta-level probability for evidential reasoning."""

from .belief import (
    Classification,
    Combination,
    MassFunction,
    bel,
    bel_table,
    classify,
    combine_all,
    core,
    dempster_combine,
    focal_elements,
    mass_from_bel,
    pl,
    pl_table,
    vacuous_extension,
    validate_mass,
)
from .errors import (
    EvidenceError,
    EvidentialError,
    FormatError,
    FrameError,
    FrameMismatchError,
    GridError,
    MassFunctionError,
    TotalConflictError,
)
from .frame import Frame, Refining, Subset, make_frame, make_refining, refine_subset
from .metaprob import (
    EvidenceRecord,
    LinearConstraint,
    MetaDistribution,
    SimplexGrid,
    build_grid,
    constraint_filter,
    event_likelihood,
    peaked_prior,
    summarize,
    uniform_prior,
    update,
)

__version__ = "0.1.0"
