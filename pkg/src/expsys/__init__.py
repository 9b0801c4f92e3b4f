"""Generalized exponential systems E(Lambda, phi) over finite Borel measures.

Numerical verification of orthonormal-basis and frame properties, essential
injectivity probes, pushforward identities, measure preservation, lattice
tiling, and group-representation discretizations.
"""

from . import analysis, measures, phases, reconstruct, repdisc, spectra, tiling
from .analysis import (
    FrameBoundsReport,
    GramReport,
    OnbReport,
    TestFunction,
    default_test_battery,
    dyadic_indicator_basis,
    frame_bounds,
    gram,
    legendre_basis,
    periodic_test_battery,
    unimodular_conjugation_check,
    verify_onb,
)
from .errors import (
    ConfigError,
    DomainError,
    ExprError,
    ExpSysError,
    InversionError,
    ProductFormulaError,
    QuadratureError,
    SchemeMismatchError,
)
from .measures import (
    LebesgueBox,
    LebesgueDisc,
    Measure,
    PushforwardMeasure,
    QuadratureSpec,
    SelfSimilar,
    adaptive,
    digit,
    fourier_transform,
    gauss,
    integrate,
    middle_fourth_cantor,
    middle_third_cantor,
    monte_carlo,
    pushforward,
    sample,
)
from .phases import (
    Affine,
    CollisionReport,
    CustomPhase,
    DigitMap,
    Holhos,
    Identity,
    PhaseMap,
    Triangular2D,
    Unipotent,
    axis_band_exclusion,
    binary_to_quaternary,
    compose,
    essential_injectivity_probe,
    measure_preservation_check,
    ternary_to_quaternary,
)
from .reconstruct import CoefficientSet, coefficients, l2_error, synthesize
from .repdisc import (
    GroupData,
    GroupExpPhase,
    WindowSystem,
    axb_group,
    build_system,
    heisenberg_group,
    phase_from_group,
    poly2d_group,
    shearlet_group,
    verify_system_on_window,
)
from .spectra import (
    DensityReport,
    SpectrumSet,
    beurling_density,
    dual_lattice,
    explicit,
    integer_lattice,
    lambda4,
    lattice,
    window_count,
)
from .tiling import (
    HistogramReport,
    OverlapReport,
    TilingReport,
    frac_histogram_test,
    overlap_volume,
    tiling_verdict,
)

__version__ = "0.1.0"
