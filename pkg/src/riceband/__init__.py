"""Expected surface area of random zero sets.

Closed-form evaluators for the expected area of the zero set of random
fields (Kac, algebraic, Kostlan, trigonometric, homogeneous), an
oscillatory-integral area formula for fixed fields, integral-geometry
measurement of implicit surfaces, and Monte-Carlo verification.
"""

from .core import DomainBox, Estimate, GridSpec, QuadSpec, ScalarField, box_rule, tensor_grid
from .ensembles import (
    EnsembleSpec,
    LinearFieldModel,
    SpectralMeasure,
    algebraic_expected_area,
    gamma_bounds,
    homogeneous_expected_area,
    kac_density,
    kac_expected_roots,
    kostlan_expected_area,
    moment_field,
    moment_field_linear,
    realize_field,
    sample_coefficients,
    trig_expected_area,
)
from .kac_rice import (
    MomentField,
    area_deterministic,
    coarea_check,
    expected_area,
    expected_area_centered,
    expected_area_level,
)
from .montecarlo import McConfig, compare, grid_refinement_study, mc_expected_area
from .sphere import SphereRule, build_sphere_rule, expected_norm_gaussian, integrate_sphere
from .zeroset import ZeroSetMesh, count_zeros_1d, extract_zero_set, favard_area, mesh_area

__version__ = "0.1.0"
