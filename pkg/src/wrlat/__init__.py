"""wrlat: exact counting of well-rounded sublattices of planar lattices.

Exact-arithmetic enumeration and classification of planar sublattices,
coincidence reflection indices, the Dirichlet-series coefficient engine for
the square and hexagonal well-rounded counting sequences, and numerical
verification of their asymptotic growth laws.
"""

from .quadratic import QuadValue, RadicandMismatchError, parse_quad, quad_sqrt_int
from .lattice import (
    GramMatrix2,
    IntMatrix2,
    PlanarLattice,
    ShapeClass,
    WELL_ROUNDED_SHAPES,
    classify,
    is_well_rounded,
    lagrange_reduce,
    minima,
    parse_gram,
    square_lattice,
    sublattice_gram,
    triangle_lattice,
)
from .hnf import (
    CountTable,
    SublatticeHNF,
    SummatoryReport,
    count_by_shape,
    count_table,
    diag_irrational_wr_table,
    enumerate_hnf,
    find_sublattice_witness,
    hnf_of_matrix,
    hnf_triples,
    sigma,
    sigma_table,
    summatory,
)
from .csl import (
    CoincidenceScan,
    HarnessReport,
    HarnessVerdict,
    ReflectionMatrix,
    ReflectionWitness,
    coincidence_reflections,
    csl_index,
    is_rational_up_to_scale,
    reflection_matrix,
    theorem1_harness,
)
from .series import (
    CoeffSeries,
    convolve,
    invert_unit,
    primitive_similar,
    standard_series,
    window_series,
    wr_series_square,
    wr_series_triangle,
)
from .asympt import (
    AsymptoticModel,
    ConstantBundle,
    compute_c_square,
    constant_bundle,
    estimate_laurent_constant,
    fit_two_term,
    residual_report,
)
from .highdim import (
    LatticeD,
    OrthoSpec,
    fullsign_lattice,
    is_well_rounded_d,
    shortest_vectors,
    subset_sign_lattice,
)

__version__ = "0.1.0"
