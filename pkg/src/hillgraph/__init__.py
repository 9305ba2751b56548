"""Spectral analysis of periodic quantum graphs: the Hill operator on an
edge, hexagonal (graphene) lattices and carbon nanotubes."""

from ._backend import BACKEND
from .eigenstates import (
    build_dumbbell,
    build_hexagon_loop,
    build_three_leaf,
    build_tube_loop,
    dirichlet_eigenfunction,
    verify_state,
)
from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    HillGraphError,
    NumericError,
    ResolutionError,
    UnavailableError,
)
from .graphene import (
    Quasimomentum,
    bloch_factor,
    bloch_factor_modified,
    bloch_laplacian_check,
    dirac_cone_slopes,
    dispersion_lambda,
    dispersion_surface,
    graphene_spectrum,
)
from .hill import (
    BandStructure,
    MonodromyData,
    band_structure,
    dirichlet_spectrum,
    discriminant,
    invert_discriminant_on_band,
    monodromy,
)
from .nanotube import (
    TubeVector,
    alpha,
    armchair_dispersion,
    classify,
    quasimomentum_lines,
    tube_spectrum,
    xi_levels,
    zigzag_dispersion,
)
from .potential import Potential

__version__ = "0.1.0"
