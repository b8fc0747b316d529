"""Splitting authentication codes, splitting BIBDs and AMD codes."""

from .algebra import AbelianGroup, GroupError
from .designs import (
    AmdCode,
    BaseBlocks,
    BibdParams,
    DesignError,
    Gdd,
    OrderedGdd,
    SchemaError,
    SourceDistribution,
    SplittingGdd,
    SplittingSystem,
    c_splitting_profile,
)

__version__ = "0.1.0"
