"""Exact spectral sequences of multicomplexes, two ways.

The witness route computes every page inside single columns from the
explicit cycle/boundary/differential formulas; the filtered route
computes the same pages from the column filtration of the total complex.
`mcss.filtered.compare` checks that the two agree, cell by cell.
"""

from .builders import RandomSpec, WallParams, hurtubise, random_mcx, staircase, wall
from .filtered import (
    FilteredPages,
    HomologyGroup,
    compare,
    homology,
    lift_to_total,
    psi,
)
from .linalg import (
    InclusionError,
    Mat,
    MembershipError,
    QuotientPresentation,
    SubmodulePresentation,
    determinant,
    image,
    kernel,
    snf,
    solve,
    subquotient,
)
from .mcxio import MCXParseError, emit, parse
from .multicomplex import (
    Multicomplex,
    MulticomplexMorphism,
    rebase,
    validate,
    validate_morphism,
)
from .pages import (
    CoWitnessTuple,
    Page,
    PageDifferential,
    PageEntry,
    SpectralPages,
    WellDefinednessError,
    WitnessTuple,
    prop25_witness,
)
from .rings import GF, QQ, ZZ, Ring
from .total import FilteredVector, TotalComplex, filtration_basis, project, totalize

__version__ = "0.1.0"
