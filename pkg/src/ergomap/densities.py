"""Target densities on the unit interval and unit square.

Every model lives on [0,1]^d and integrates to one.  1-D models expose the
PDF, the CDF and its inverse; 2-D models are piecewise constant on a uniform
cell grid and expose the marginal and conditional cumulative structure needed
to build triangular transformations to the uniform distribution.

Grid-backed models clamp zero cells to a small positive floor before
normalizing, so every CDF in this module is strictly increasing and inverses
are unique.  All models are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CapabilityError,
    DomainError,
    NormalizationError,
    ParameterError,
    ParseError,
)
from .pgm import read_pgm

# Zero cells are lifted to this fraction of the largest cell value before
# normalization, keeping cumulative tables strictly increasing.
EPS_FLOOR_FACTOR = 1e-8

# Bisection fallback for 1-D inverses without a closed form.
_BISECT_TOL = 1e-13
_BISECT_MAX_ITER = 200


def cell_index(x: float, n: int) -> int:
    """Uniform-cell index of x in [0,1]; exact edge values go to the lower cell."""
    i = math.ceil(x * n) - 1
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


def _cell_index_vec(x: np.ndarray, n: int) -> np.ndarray:
    i = np.ceil(x * n).astype(np.int64) - 1
    return np.clip(i, 0, n - 1)


def _check_unit(x: np.ndarray, what: str = "point") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size and (np.min(x) < 0.0 or np.max(x) > 1.0):
        raise DomainError(f"{what} outside [0,1]")
    return x


@dataclass(frozen=True)
class MarginalTable:
    """Piecewise-linear cumulative table of a 1-D (marginal) density.

    ``cum`` holds the cumulative mass at the n+1 uniform cell edges k/n,
    starting at 0 and ending at 1; ``dens`` holds the per-cell density value
    (the slope of the cumulative).  Interpolation is piecewise linear.
    """

    axis: int
    cum: np.ndarray
    dens: np.ndarray

    @classmethod
    def from_masses(cls, masses: np.ndarray, axis: int = 1) -> "MarginalTable":
        m = np.asarray(masses, dtype=float)
        total = m.sum()
        if not np.isfinite(total) or total <= 0.0:
            raise NormalizationError("marginal has no mass")
        m = m / total
        cum = np.concatenate(([0.0], np.cumsum(m)))
        cum[-1] = 1.0
        return cls(axis=axis, cum=cum, dens=m * m.size)

    @property
    def cells(self) -> int:
        return self.dens.size

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        n = self.cells
        i = _cell_index_vec(x, n)
        out = self.cum[i] + (x - i / n) * self.dens[i]
        out = np.clip(out, 0.0, 1.0)
        out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, out))
        return out if out.ndim else float(out)

    def inverse(self, p):
        p = np.asarray(p, dtype=float)
        n = self.cells
        k = np.clip(np.searchsorted(self.cum, p, side="right") - 1, 0, n - 1)
        out = k / n + (p - self.cum[k]) / self.dens[k]
        out = np.clip(out, 0.0, 1.0)
        out = np.where(p <= 0.0, 0.0, np.where(p >= 1.0, 1.0, out))
        return out if out.ndim else float(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.dens[_cell_index_vec(x, self.cells)]
        return out if out.ndim else float(out)

    def cdf_scalar(self):
        """Plain-float CDF closure for hot loops."""
        cum = self.cum.tolist()
        dens = self.dens.tolist()
        n = self.cells
        w = 1.0 / n

        def _cdf(x: float) -> float:
            if x <= 0.0:
                return 0.0
            if x >= 1.0:
                return 1.0
            i = math.ceil(x * n) - 1
            if i < 0:
                i = 0
            elif i >= n:
                i = n - 1
            z = cum[i] + (x - i * w) * dens[i]
            return 0.0 if z < 0.0 else (1.0 if z > 1.0 else z)

        return _cdf

    def inverse_scalar(self):
        """Plain-float inverse-CDF closure for hot loops."""
        from bisect import bisect_right

        cum = self.cum.tolist()
        dens = self.dens.tolist()
        n = self.cells
        w = 1.0 / n

        def _inv(p: float) -> float:
            if p <= 0.0:
                return 0.0
            if p >= 1.0:
                return 1.0
            k = bisect_right(cum, p) - 1
            if k < 0:
                k = 0
            elif k >= n:
                k = n - 1
            x = k * w + (p - cum[k]) / dens[k]
            return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)

        return _inv


class Density:
    """Base class for target densities on [0,1]^d."""

    kind: str = "abstract"
    dim: int = 0

    def pdf(self, x):
        raise NotImplementedError


class Density1D(Density):
    dim = 1

    def cdf(self, x):
        raise NotImplementedError

    def idf(self, p):
        """Inverse CDF; monotone bisection fallback when no closed form exists."""
        p_arr = np.asarray(p, dtype=float)
        if p_arr.size and (p_arr.min() < 0.0 or p_arr.max() > 1.0):
            raise DomainError("probability outside [0,1]")
        inv = self._bisect_inverse()
        out = np.vectorize(inv, otypes=[float])(p_arr)
        return out if out.ndim else float(out)

    def _bisect_inverse(self):
        cdf = self.cdf

        def _inv(p: float) -> float:
            lo, hi = 0.0, 1.0
            for _ in range(_BISECT_MAX_ITER):
                mid = 0.5 * (lo + hi)
                if hi - lo <= _BISECT_TOL:
                    break
                if cdf(mid) < p:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        return _inv

    def breakpoints(self) -> tuple:
        """Interior kinks of the density (quadrature cell boundaries)."""
        return ()

    def singular_points(self) -> tuple:
        """Points where the density is zero or unbounded."""
        return ()

    def log_pdf_idf(self, w):
        """log rho(F^{-1}(w)), overridable where the composition is unstable.

        Near a point where the inverse CDF flattens onto a density pole, the
        naive pdf(idf(w)) saturates in floating point; subclasses with such
        poles supply a cancellation-free form.
        """
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(self.idf(w)))

    # Scalar closures used by orbit loops; subclasses override with math-module
    # implementations, the defaults just defer to the vectorized methods.
    def pdf_scalar(self):
        f = self.pdf
        return lambda x: float(f(x))

    def cdf_scalar(self):
        f = self.cdf
        return lambda x: float(f(x))

    def idf_scalar(self):
        f = self.idf
        return lambda p: float(f(p))


class Triangular(Density1D):
    """Symmetric triangular density peaking at 1/2: rho(x) = 2 - 4|x - 1/2|."""

    kind = "triangular"

    def pdf(self, x):
        x = _check_unit(x)
        # branch forms 4x / 4(1-x) avoid the cancellation of 2-4|x-1/2| at the feet
        out = np.where(x <= 0.5, 4.0 * x, 4.0 * (1.0 - x))
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = _check_unit(x)
        out = np.where(x <= 0.5, 2.0 * x * x, 1.0 - 2.0 * (1.0 - x) ** 2)
        return out if out.ndim else float(out)

    def idf(self, p):
        p = _check_unit(p, "probability")
        out = np.where(p <= 0.5, np.sqrt(p / 2.0), 1.0 - np.sqrt((1.0 - p) / 2.0))
        return out if out.ndim else float(out)

    def breakpoints(self):
        return (0.5,)

    def singular_points(self):
        return (0.0, 1.0)

    def log_pdf_idf(self, w):
        # rho(idf(w)) = sqrt(8w) rising, sqrt(8(1-w)) falling
        w = np.asarray(w, dtype=float)
        with np.errstate(divide="ignore"):
            out = 0.5 * np.where(
                w <= 0.5, np.log(8.0 * w), np.log(8.0 * (1.0 - w))
            )
        return out if out.ndim else float(out)

    def pdf_scalar(self):
        return lambda x: 4.0 * x if x <= 0.5 else 4.0 * (1.0 - x)

    def cdf_scalar(self):
        def _cdf(x: float) -> float:
            if x <= 0.5:
                return 2.0 * x * x
            return 1.0 - 2.0 * (1.0 - x) * (1.0 - x)

        return _cdf

    def idf_scalar(self):
        sqrt = math.sqrt

        def _idf(p: float) -> float:
            if p <= 0.5:
                return sqrt(0.5 * p)
            return 1.0 - sqrt(0.5 * (1.0 - p))

        return _idf


class Ramp(Density1D):
    """Linearly increasing density rho(x) = 2x."""

    kind = "ramp"

    def pdf(self, x):
        x = _check_unit(x)
        out = 2.0 * x
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = _check_unit(x)
        out = x * x
        return out if out.ndim else float(out)

    def idf(self, p):
        p = _check_unit(p, "probability")
        out = np.sqrt(p)
        return out if out.ndim else float(out)

    def singular_points(self):
        return (0.0,)

    def pdf_scalar(self):
        return lambda x: 2.0 * x

    def cdf_scalar(self):
        return lambda x: x * x

    def idf_scalar(self):
        return math.sqrt


class Arcsine(Density1D):
    """Arcsine density 1/(pi sqrt(x(1-x))), the invariant density of the logistic map."""

    kind = "arcsine"

    def pdf(self, x):
        x = _check_unit(x)
        with np.errstate(divide="ignore"):
            out = 1.0 / (math.pi * np.sqrt(x * (1.0 - x)))
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = _check_unit(x)
        out = np.clip((2.0 / math.pi) * np.arcsin(np.sqrt(x)), 0.0, 1.0)
        return out if out.ndim else float(out)

    def idf(self, p):
        p = _check_unit(p, "probability")
        out = 0.5 * (1.0 - np.cos(math.pi * p))
        return out if out.ndim else float(out)

    def singular_points(self):
        return (0.0, 1.0)

    def log_pdf_idf(self, w):
        # rho(idf(w)) = 2 / (pi sin(pi w)): stable where idf saturates at 0/1
        w = np.asarray(w, dtype=float)
        with np.errstate(divide="ignore"):
            out = math.log(2.0 / math.pi) - np.log(np.abs(np.sin(math.pi * w)))
        return out if out.ndim else float(out)

    def pdf_scalar(self):
        inv_pi = 1.0 / math.pi
        sqrt = math.sqrt

        def _pdf(x: float) -> float:
            t = x * (1.0 - x)
            if t <= 0.0:
                return math.inf
            return inv_pi / sqrt(t)

        return _pdf

    def cdf_scalar(self):
        two_over_pi = 2.0 / math.pi
        asin = math.asin
        sqrt = math.sqrt

        def _cdf(x: float) -> float:
            if x <= 0.0:
                return 0.0
            if x >= 1.0:
                return 1.0
            z = two_over_pi * asin(sqrt(x))
            return 1.0 if z > 1.0 else z

        return _cdf

    def idf_scalar(self):
        pi = math.pi
        cos = math.cos

        def _idf(p: float) -> float:
            return 0.5 * (1.0 - cos(pi * p))

        return _idf


class Uniform1D(Density1D):
    """Uniform density on [0,1]."""

    kind = "uniform"

    def pdf(self, x):
        x = _check_unit(x)
        out = np.ones_like(x)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = _check_unit(x)
        return x if x.ndim else float(x)

    def idf(self, p):
        p = _check_unit(p, "probability")
        return p if p.ndim else float(p)

    def pdf_scalar(self):
        return lambda x: 1.0

    def cdf_scalar(self):
        return lambda x: x

    def idf_scalar(self):
        return lambda p: p


def _clamp_normalize(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ParameterError("non-finite density value")
    if v.size == 0:
        raise ParameterError("empty density grid")
    if v.min() < 0.0:
        raise ParameterError("negative density value")
    vmax = v.max()
    if vmax <= 0.0:
        raise NormalizationError("density grid has zero total mass")
    v = np.maximum(v, EPS_FLOOR_FACTOR * vmax)
    return v / v.mean()


def _check_prenormalized(v: np.ndarray) -> np.ndarray:
    """Validate an already-normalized grid (deserialization path, bit-stable)."""
    if not np.all(np.isfinite(v)) or v.size == 0 or v.min() <= 0.0:
        raise NormalizationError("prenormalized grid must be finite and positive")
    if abs(v.mean() - 1.0) > 1e-9:
        raise NormalizationError("prenormalized grid does not integrate to 1")
    return v.copy()


class Grid1D(Density1D):
    """Piecewise-constant density on uniform cells of [0,1]."""

    kind = "grid1d"

    def __init__(self, values, *, prenormalized: bool = False):
        v = np.asarray(values, dtype=float).reshape(-1)
        if prenormalized:
            v = _check_prenormalized(v)
        else:
            v = _clamp_normalize(v)
        self.values = v
        self.values.setflags(write=False)
        self._table = MarginalTable.from_masses(v / v.size)

    def pdf(self, x):
        x = _check_unit(x)
        return self._table.pdf(x)

    def cdf(self, x):
        x = _check_unit(x)
        return self._table.cdf(x)

    def idf(self, p):
        p = _check_unit(p, "probability")
        return self._table.inverse(p)

    def breakpoints(self):
        n = self.values.size
        return tuple(k / n for k in range(1, n))

    def pdf_scalar(self):
        dens = self.values.tolist()
        n = self.values.size

        def _pdf(x: float) -> float:
            i = math.ceil(x * n) - 1
            if i < 0:
                i = 0
            elif i >= n:
                i = n - 1
            return dens[i]

        return _pdf

    def cdf_scalar(self):
        return self._table.cdf_scalar()

    def idf_scalar(self):
        return self._table.inverse_scalar()


class Grid2D(Density):
    """Piecewise-constant density on a uniform cell grid of the unit square.

    ``values[i2, i1]`` is the density over the cell with x1 in
    [i1/n1, (i1+1)/n1] and x2 in [i2/n2, (i2+1)/n2]; i.e. rows run along the
    second coordinate, from x2 = 0 upward.
    """

    dim = 2
    kind = "grid2d"

    def __init__(self, values, kind: str | None = None, *, prenormalized: bool = False):
        v = np.asarray(values, dtype=float)
        if v.ndim != 2:
            raise ParameterError("2-D density grid must be a matrix")
        self.values = _check_prenormalized(v) if prenormalized else _clamp_normalize(v)
        self.values.setflags(write=False)
        if kind is not None:
            self.kind = kind
        n2, n1 = self.values.shape
        self.shape = (n2, n1)
        cell_area = 1.0 / (n1 * n2)
        # marginal of x1: column masses
        self._marginal1 = MarginalTable.from_masses(
            self.values.sum(axis=0) * cell_area, axis=1
        )
        # conditional mass profile of x2 within each x1-column
        col = self.values / self.values.sum(axis=0, keepdims=True)  # (n2, n1)
        ccum = np.zeros((n1, n2 + 1))
        ccum[:, 1:] = np.cumsum(col.T, axis=1)
        ccum[:, -1] = 1.0
        self._cond_cum = ccum
        self._cond_dens = col.T * n2  # (n1, n2) conditional density values
        self._cond_cum.setflags(write=False)
        self._cond_dens.setflags(write=False)

    def transposed(self) -> "Grid2D":
        """Same density with the two coordinates swapped."""
        return Grid2D(self.values.T, kind=self.kind, prenormalized=True)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise DomainError("2-D density expects points with two coordinates")
        _check_unit(x)
        n2, n1 = self.shape
        i1 = _cell_index_vec(x[..., 0], n1)
        i2 = _cell_index_vec(x[..., 1], n2)
        out = self.values[i2, i1]
        return out if out.ndim else float(out)

    def marginal(self, axis: int = 1) -> MarginalTable:
        """Cumulative marginal of the given axis (1 or 2)."""
        if axis == 1:
            return self._marginal1
        if axis == 2:
            return self.transposed()._marginal1
        raise ParameterError(f"axis must be 1 or 2, got {axis}")

    def conditional_cdf(self, x_first: float) -> MarginalTable:
        """Conditional CDF of the second axis given the first coordinate."""
        if not 0.0 <= x_first <= 1.0:
            raise DomainError("conditioning coordinate outside [0,1]")
        n2, n1 = self.shape
        i1 = cell_index(x_first, n1)
        return MarginalTable(
            axis=2, cum=self._cond_cum[i1], dens=self._cond_dens[i1]
        )

    def breakpoints_axis(self, axis: int) -> tuple:
        n = self.shape[1] if axis == 1 else self.shape[0]
        return tuple(k / n for k in range(1, n))

    def cell_masses(self) -> np.ndarray:
        """Exact probability mass of each cell, shape (n2, n1)."""
        n2, n1 = self.shape
        return self.values / (n1 * n2)

    def pdf_scalar(self):
        vals = [row.tolist() for row in self.values]
        n2, n1 = self.shape
        ceil = math.ceil

        def _pdf(x1: float, x2: float) -> float:
            i1 = ceil(x1 * n1) - 1
            if i1 < 0:
                i1 = 0
            elif i1 >= n1:
                i1 = n1 - 1
            i2 = ceil(x2 * n2) - 1
            if i2 < 0:
                i2 = 0
            elif i2 >= n2:
                i2 = n2 - 1
            return vals[i2][i1]

        return _pdf


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def triangular() -> Triangular:
    return Triangular()


def ramp() -> Ramp:
    return Ramp()


def arcsine() -> Arcsine:
    return Arcsine()


def uniform1d() -> Uniform1D:
    return Uniform1D()


def grid1d(values) -> Grid1D:
    return Grid1D(values)


def grid2d(values) -> Grid2D:
    return Grid2D(values)


def uniform2d() -> Grid2D:
    return Grid2D([[1.0]], kind="uniform2d")


def checkerboard(cells_per_axis: int = 4, low: float = 0.25, high: float = 1.75) -> Grid2D:
    """Alternating-cell density; the cell at the origin takes the high value."""
    if cells_per_axis < 1:
        raise ParameterError("cells_per_axis must be >= 1")
    if high <= 0.0:
        raise ParameterError("high cell density must be positive")
    if low < 0.0:
        raise ParameterError("low cell density must be non-negative")
    n = int(cells_per_axis)
    i1, i2 = np.meshgrid(np.arange(n), np.arange(n))
    values = np.where((i1 + i2) % 2 == 0, float(high), float(low))
    return Grid2D(values, kind="checkerboard")


def load_image_density(source) -> Grid2D:
    """Build a 2-D grid density from a grayscale PGM image.

    Image row 0 (the top) maps to x2 near 1, so the density is oriented the
    way the image is displayed.  Values are clamped to a positive floor and
    normalized to integrate to one.
    """
    samples = read_pgm(source).astype(float)
    return Grid2D(np.flipud(samples), kind="image")


# ---------------------------------------------------------------------------
# density spec strings and CSV export
# ---------------------------------------------------------------------------

_ANALYTIC = {
    "triangular": triangular,
    "ramp": ramp,
    "arcsine": arcsine,
    "uniform": uniform1d,
    "uniform2d": uniform2d,
}


def parse_density_spec(spec: str) -> Density:
    """Parse a density spec string: an analytic name, ``checkerboard[:n:low:high]``
    or a path to a ``.pgm`` image."""
    s = spec.strip()
    if s.lower().endswith(".pgm"):
        return load_image_density(s)
    head, _, rest = s.partition(":")
    head = head.strip().lower()
    if head in _ANALYTIC:
        if rest:
            raise ParseError(f"density '{head}' takes no parameters", position=len(head))
        return _ANALYTIC[head]()
    if head == "checkerboard":
        if not rest:
            return checkerboard()
        parts = rest.split(":")
        if len(parts) != 3:
            raise ParseError(
                "checkerboard takes either no parameters or cells:low:high",
                position=len(head),
            )
        try:
            cells = int(parts[0])
            low, high = float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError("malformed checkerboard parameters", position=len(head)) from None
        return checkerboard(cells, low, high)
    raise ParseError(f"unknown density spec '{head}'", position=0)


def density_to_csv(model: Density, path) -> None:
    """Export a grid-backed density as row-major CSV with full precision."""
    if isinstance(model, Grid1D):
        rows = [model.values]
    elif isinstance(model, Grid2D):
        rows = list(model.values)
    else:
        raise CapabilityError("CSV export is defined for grid-backed densities only")
    with open(path, "w", newline="") as fh:
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
