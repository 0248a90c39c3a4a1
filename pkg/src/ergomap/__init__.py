"""Deterministic iterated maps that sample a prescribed density.

Build a target density, wrap it in a forward/inverse transformation to the
uniform cube, pick a measure-preserving map of the cube, and conjugate: the
resulting iterated map leaves the target density invariant and its orbits
histogram to it.  Diagnostics quantify invariance, Lyapunov exponents and
distance to the target.
"""

from .densities import (
    Arcsine,
    Density,
    Density1D,
    Grid1D,
    Grid2D,
    MarginalTable,
    Ramp,
    Triangular,
    Uniform1D,
    arcsine,
    checkerboard,
    density_to_csv,
    grid1d,
    grid2d,
    load_image_density,
    parse_density_spec,
    ramp,
    triangular,
    uniform1d,
    uniform2d,
)
from .diagnostics import (
    HistogramGrid,
    LyapunovEstimate,
    ergodic_average,
    fp_residual,
    histogram,
    histogram_to_csv,
    histogram_to_pgm,
    kronecker_sequence,
    ks_uniformity,
    lyapunov_empirical,
    lyapunov_theoretical,
    model_bin_masses,
    tv_distance,
)
from .errors import (
    CapabilityError,
    DomainError,
    ErgomapError,
    KindError,
    NormalizationError,
    ParameterError,
    ParseError,
)
from .iterated import (
    IteratedMap,
    Orbit,
    conjugate_uniform,
    factorize,
    orbit,
    orbit_via_uniform,
    transport,
)
from .pgm import read_pgm, write_pgm
from .rosenblatt import RosenblattTransform, build_transform, load_transform
from .uniform_maps import (
    JITTER_SHIFT,
    ArnoldCat,
    AsymTriangle,
    Baker,
    Compose,
    Identity,
    Product,
    Sawtooth,
    Translation,
    Triangle,
    UniformMap,
    compose,
    iterate,
    make_uniform,
    period,
    product,
    with_jitter,
)

__version__ = "0.1.0"

__all__ = [
    "Arcsine",
    "ArnoldCat",
    "AsymTriangle",
    "Baker",
    "CapabilityError",
    "Compose",
    "Density",
    "Density1D",
    "DomainError",
    "ErgomapError",
    "Grid1D",
    "Grid2D",
    "HistogramGrid",
    "Identity",
    "IteratedMap",
    "JITTER_SHIFT",
    "KindError",
    "LyapunovEstimate",
    "MarginalTable",
    "NormalizationError",
    "Orbit",
    "ParameterError",
    "ParseError",
    "Product",
    "Ramp",
    "RosenblattTransform",
    "Sawtooth",
    "Translation",
    "Triangle",
    "Triangular",
    "Uniform1D",
    "UniformMap",
    "arcsine",
    "build_transform",
    "checkerboard",
    "compose",
    "conjugate_uniform",
    "density_to_csv",
    "ergodic_average",
    "factorize",
    "fp_residual",
    "grid1d",
    "grid2d",
    "histogram",
    "histogram_to_csv",
    "histogram_to_pgm",
    "iterate",
    "kronecker_sequence",
    "ks_uniformity",
    "load_image_density",
    "load_transform",
    "lyapunov_empirical",
    "lyapunov_theoretical",
    "make_uniform",
    "model_bin_masses",
    "orbit",
    "orbit_via_uniform",
    "parse_density_spec",
    "period",
    "product",
    "ramp",
    "read_pgm",
    "transport",
    "triangular",
    "tv_distance",
    "uniform1d",
    "uniform2d",
    "with_jitter",
    "write_pgm",
]
