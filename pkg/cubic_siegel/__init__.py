from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _pkg_version

from .capture import (
    CapturePolynomialTower,
    CensusError,
    CensusReport,
    ComponentTrace,
    RayPath,
    RayTraceError,
    ZakeriBracketError,
    ZakeriTrace,
    capture_centers,
    capture_polys,
    param_map_phi,
    quasicircle_diagnostic,
    trace_component_boundary,
    trace_parameter_ray,
    trace_zakeri,
)
from .classify import (
    OrbitTag,
    ParamClass,
    PointClass,
    classify_orbit,
    classify_parameter_a,
    classify_parameter_c,
    symmetry_agreement,
)
from .config import (
    AppConfig,
    ServerConfig,
    get_config,
    reset_config,
)
from .family import (
    GOLDEN,
    CubicSiegelMap,
    MapSlice,
    RotationNumber,
    a_to_c,
    conjugacy_witness,
    eta,
    iterate_orbit,
    make_rotation,
)
from .numerics import (
    ComplexPolynomial,
    NumericsError,
    PowerSeries,
    RootFindingError,
    find_roots,
    poly_eval,
    radius_of_convergence,
)
from .render import (
    ImageBuffer,
    Palette,
    Plane,
    RenderJob,
    render_dynamical_plane,
    render_parameter_plane,
    write_image,
)
from .siegel import (
    BoundaryCriticalVerdict,
    BoundaryVerdict,
    InteriorVerdict,
    LinearizationData,
    LinearizationError,
    ResonanceError,
    boundary_critical_point,
    build_linearization,
    in_siegel_disk,
    linearization_series,
    phi_eval,
    siegel_boundary,
)

try:
    __version__ = _pkg_version("cubic-siegel")
except PackageNotFoundError:
    # Package not installed (e.g. running from a source checkout without `pip install -e .`)
    __version__ = "0.0.0+unknown"

__all__ = [
    # Numerics
    "ComplexPolynomial",
    "PowerSeries",
    "poly_eval",
    "find_roots",
    "radius_of_convergence",
    "NumericsError",
    "RootFindingError",
    # Family
    "RotationNumber",
    "GOLDEN",
    "make_rotation",
    "MapSlice",
    "CubicSiegelMap",
    "eta",
    "a_to_c",
    "conjugacy_witness",
    "iterate_orbit",
    # Siegel disk
    "LinearizationData",
    "linearization_series",
    "build_linearization",
    "siegel_boundary",
    "in_siegel_disk",
    "phi_eval",
    "boundary_critical_point",
    "BoundaryVerdict",
    "BoundaryCriticalVerdict",
    "InteriorVerdict",
    "ResonanceError",
    "LinearizationError",
    # Classification
    "OrbitTag",
    "PointClass",
    "ParamClass",
    "classify_orbit",
    "classify_parameter_c",
    "classify_parameter_a",
    "symmetry_agreement",
    # Capture components
    "CapturePolynomialTower",
    "CensusReport",
    "capture_polys",
    "capture_centers",
    "param_map_phi",
    "trace_parameter_ray",
    "trace_component_boundary",
    "quasicircle_diagnostic",
    "trace_zakeri",
    "RayPath",
    "ComponentTrace",
    "ZakeriTrace",
    "CensusError",
    "RayTraceError",
    "ZakeriBracketError",
    # Rendering
    "Plane",
    "Palette",
    "RenderJob",
    "ImageBuffer",
    "render_parameter_plane",
    "render_dynamical_plane",
    "write_image",
    # Configuration
    "get_config",
    "reset_config",
    "AppConfig",
    "ServerConfig",
    "__version__",
]
