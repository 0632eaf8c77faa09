"""Nearly Kähler structures and pseudoholomorphic curves, numerically.

Backgrounds: the round S6 inside the imaginary octonions, the left-invariant
S3 x S3 family, and a flat-torus counterexample testbed.  Curves are
quadrature meshes; families of curves support volume-drift measurement and a
discrete Stokes identity check.
"""

from .backgrounds import (
    NKBackground,
    S6Background,
    TorusBackground,
    domega_type_fraction,
    lambda_estimate,
    s6_background,
    second_structure_equation_residual,
    structure_invariants,
    tangent_project,
    torus_testbed,
)
from .curves import (
    CurveMesh,
    cr_residual,
    curve_volume,
    great_sphere_curve,
    icosphere,
    riemannian_area,
    subtorus_family,
)
from .exceptions import (
    DegenerateStructureError,
    MeshQualityError,
    PreconditionError,
    StructureNotApplicableError,
)
from .fields import TrigPolynomial
from .forms import (
    FormField,
    TypeSpectrum,
    UnitaryCoframe,
    exterior_derivative,
    type_decompose,
    wedge,
)
from .moduli import (
    ContinuationResult,
    FamilyPath,
    StokesReport,
    continue_curve,
    g2_orbit_family,
    g2_path_drive,
    hausdorff_distance,
    random_normal_drive,
    stokes_check,
    subtorus_exact_family,
    volume_drift,
)
from .octonion import (
    G2Element,
    basic_triple_automorphism,
    cross,
    oct_conj,
    oct_mul,
    oct_norm,
    random_g2,
)
from .s3s3 import S3S3MetricParams, S3S3Structure, find_nk_metric, s3s3_background

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
