"""Triangular transformations between a target density and the uniform cube.

The forward transformation sends target-distributed points to uniformly
distributed points on [0,1]^d by evaluating the first ordered coordinate's
marginal CDF and then the conditional CDF of the remaining coordinate.  In
one dimension it is simply the CDF.  The inverse performs exact
piecewise-linear (grid kinds) or analytic inversion in the same coordinate
order, which is the standard conditional-distribution sampling recipe.

The Jacobian determinant of the forward transformation equals the target
density itself, which this module exploits instead of differentiating
components.

Transforms are immutable after construction; evaluation is pure and safe for
concurrent use.
"""

from __future__ import annotations

import math

import numpy as np

from . import jsonio
from .densities import (
    Arcsine,
    Density,
    Density1D,
    Grid1D,
    Grid2D,
    Ramp,
    Triangular,
    Uniform1D,
    _cell_index_vec,
)
from .errors import DomainError, KindError, ParameterError, ParseError


def _rowwise_segment(cum_rows: np.ndarray, rows: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Vectorized searchsorted: per point, the segment k with cum[rows,k] <= z < cum[rows,k+1]."""
    m = z.shape[0]
    n = cum_rows.shape[1] - 1
    lo = np.zeros(m, dtype=np.int64)
    hi = np.full(m, n, dtype=np.int64)
    while np.any(hi - lo > 1):
        mid = (lo + hi) // 2
        le = cum_rows[rows, mid] <= z
        lo = np.where(le, mid, lo)
        hi = np.where(le, hi, mid)
    return np.clip(lo, 0, n - 1)


class RosenblattTransform:
    """Forward/inverse map between a density model and Unif([0,1]^d).

    ``ordering`` is a permutation of the axis labels (1,) or (1, 2)/(2, 1);
    the first listed axis is transformed through its marginal CDF, the second
    through the conditional CDF given the first.  There are d! such
    transforms for a d-dimensional model.
    """

    def __init__(self, model: Density, ordering=None):
        self.model = model
        self.dim = model.dim
        if ordering is None:
            ordering = tuple(range(1, self.dim + 1))
        ordering = tuple(int(a) for a in ordering)
        if sorted(ordering) != list(range(1, self.dim + 1)):
            raise ParameterError(
                f"ordering {ordering} is not a permutation of axes 1..{self.dim}"
            )
        self.ordering = ordering
        if self.dim == 1:
            if not isinstance(model, Density1D):
                raise KindError("1-D transform requires a 1-D density")
            self._om = model
        elif self.dim == 2:
            if not isinstance(model, Grid2D):
                raise KindError("2-D transform requires a grid-backed 2-D density")
            self._om = model if ordering == (1, 2) else model.transposed()
        else:
            raise KindError("only 1-D and 2-D models are supported")

    # -- evaluation ---------------------------------------------------------

    def forward(self, x):
        """Map target points to the unit cube; accepts (..., d) arrays."""
        if self.dim == 1:
            x = np.asarray(x, dtype=float)
            out = np.clip(self.model.cdf(x), 0.0, 1.0)
            return out if np.ndim(out) else float(out)
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != 2:
            raise DomainError("expected points with two coordinates")
        if np.min(x) < 0.0 or np.max(x) > 1.0:
            raise DomainError("point outside [0,1]^2")
        a, b = self.ordering
        xa, xb = x[..., a - 1], x[..., b - 1]
        om = self._om
        n2, n1 = om.shape
        za = om._marginal1.cdf(xa)
        i1 = _cell_index_vec(xa, n1)
        k2 = _cell_index_vec(xb, n2)
        zb = om._cond_cum[i1, k2] + (xb - k2 / n2) * om._cond_dens[i1, k2]
        zb = np.where(xb <= 0.0, 0.0, np.where(xb >= 1.0, 1.0, np.clip(zb, 0.0, 1.0)))
        # components stay at their axis positions, so the uniform density
        # maps to the identity under every ordering
        out = np.empty(np.shape(za) + (2,))
        out[..., a - 1] = za
        out[..., b - 1] = zb
        return out

    def inverse(self, z):
        """Map unit-cube points back to the target space."""
        if self.dim == 1:
            z = np.asarray(z, dtype=float)
            out = np.clip(self.model.idf(z), 0.0, 1.0)
            return out if np.ndim(out) else float(out)
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != 2:
            raise DomainError("expected points with two coordinates")
        if np.min(z) < 0.0 or np.max(z) > 1.0:
            raise DomainError("point outside [0,1]^2")
        om = self._om
        n2, n1 = om.shape
        shape = z.shape[:-1]
        a, b = self.ordering
        za = z[..., a - 1].reshape(-1)
        zb = z[..., b - 1].reshape(-1)
        xa = np.asarray(om._marginal1.inverse(za))
        i1 = _cell_index_vec(xa, n1)
        k2 = _rowwise_segment(om._cond_cum, i1, zb)
        xb = k2 / n2 + (zb - om._cond_cum[i1, k2]) / om._cond_dens[i1, k2]
        xb = np.where(zb <= 0.0, 0.0, np.where(zb >= 1.0, 1.0, np.clip(xb, 0.0, 1.0)))
        out = np.empty(za.shape + (2,))
        out[..., a - 1] = xa
        out[..., b - 1] = xb
        return out.reshape(shape + (2,))

    def jacobian_abs(self, x):
        """|det J| of the forward map, which equals the target density at x."""
        return self.model.pdf(x)

    # -- scalar hot-loop closures -------------------------------------------

    def forward_scalar(self):
        if self.dim == 1:
            return self.model.cdf_scalar()
        om = self._om
        mcdf = om._marginal1.cdf_scalar()
        ccum = [row.tolist() for row in om._cond_cum]
        cdens = [row.tolist() for row in om._cond_dens]
        n2, n1 = om.shape
        w2 = 1.0 / n2
        ceil = math.ceil
        swap = self.ordering == (2, 1)

        def _fwd(pt):
            x1, x2 = pt
            if swap:
                xa, xb = x2, x1
            else:
                xa, xb = x1, x2
            za = mcdf(xa)
            i1 = ceil(xa * n1) - 1
            if i1 < 0:
                i1 = 0
            elif i1 >= n1:
                i1 = n1 - 1
            if xb <= 0.0:
                zb = 0.0
            elif xb >= 1.0:
                zb = 1.0
            else:
                k2 = ceil(xb * n2) - 1
                if k2 < 0:
                    k2 = 0
                elif k2 >= n2:
                    k2 = n2 - 1
                zb = ccum[i1][k2] + (xb - k2 * w2) * cdens[i1][k2]
                if zb < 0.0:
                    zb = 0.0
                elif zb > 1.0:
                    zb = 1.0
            if swap:
                return (zb, za)
            return (za, zb)

        return _fwd

    def inverse_scalar(self):
        if self.dim == 1:
            return self.model.idf_scalar()
        from bisect import bisect_right

        om = self._om
        minv = om._marginal1.inverse_scalar()
        ccum = [row.tolist() for row in om._cond_cum]
        cdens = [row.tolist() for row in om._cond_dens]
        n2, n1 = om.shape
        w2 = 1.0 / n2
        ceil = math.ceil
        swap = self.ordering == (2, 1)

        def _inv(pt):
            if swap:
                zb, za = pt
            else:
                za, zb = pt
            xa = minv(za)
            i1 = ceil(xa * n1) - 1
            if i1 < 0:
                i1 = 0
            elif i1 >= n1:
                i1 = n1 - 1
            if zb <= 0.0:
                xb = 0.0
            elif zb >= 1.0:
                xb = 1.0
            else:
                row = ccum[i1]
                k2 = bisect_right(row, zb) - 1
                if k2 < 0:
                    k2 = 0
                elif k2 >= n2:
                    k2 = n2 - 1
                xb = k2 * w2 + (zb - row[k2]) / cdens[i1][k2]
                if xb < 0.0:
                    xb = 0.0
                elif xb > 1.0:
                    xb = 1.0
            if swap:
                return (xb, xa)
            return (xa, xb)

        return _inv

    # -- serialization -------------------------------------------------------

    def to_doc(self) -> dict:
        doc = {
            "format": "ergomap-transform",
            "version": 1,
            "ordering": list(self.ordering),
            "density": _density_doc(self.model),
        }
        if isinstance(self.model, Grid1D):
            doc["tables"] = {"marginal_cum": self.model._table.cum.tolist()}
        elif isinstance(self.model, Grid2D):
            om = self._om
            doc["tables"] = {
                "marginal_cum": om._marginal1.cum.tolist(),
                "conditional_cum": om._cond_cum.tolist(),
            }
        return doc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(jsonio.dumps_g17(self.to_doc()) + "\n")


def build_transform(model: Density, ordering=None) -> RosenblattTransform:
    return RosenblattTransform(model, ordering)


_ANALYTIC_KINDS = {
    "triangular": Triangular,
    "ramp": Ramp,
    "arcsine": Arcsine,
    "uniform": Uniform1D,
}


def _density_doc(model: Density) -> dict:
    if isinstance(model, (Grid2D,)):
        return {"kind": model.kind, "dim": 2, "values": model.values.tolist()}
    if isinstance(model, Grid1D):
        return {"kind": model.kind, "dim": 1, "values": model.values.tolist()}
    return {"kind": model.kind, "dim": 1}


def density_from_doc(doc: dict) -> Density:
    kind = doc.get("kind")
    if kind in _ANALYTIC_KINDS:
        return _ANALYTIC_KINDS[kind]()
    if doc.get("dim") == 2:
        return Grid2D(np.array(doc["values"], dtype=float), kind=kind, prenormalized=True)
    if kind == "grid1d":
        return Grid1D(np.array(doc["values"], dtype=float), prenormalized=True)
    raise ParseError(f"unknown density kind {kind!r} in transform document")


def transform_from_doc(doc: dict) -> RosenblattTransform:
    if doc.get("format") != "ergomap-transform":
        raise ParseError("not a transform document")
    model = density_from_doc(doc["density"])
    tr = RosenblattTransform(model, tuple(doc["ordering"]))
    tables = doc.get("tables")
    if tables and "marginal_cum" in tables:
        stored = np.array(tables["marginal_cum"], dtype=float)
        if isinstance(model, Grid1D):
            rebuilt = model._table.cum
        else:
            rebuilt = tr._om._marginal1.cum
        if stored.shape != rebuilt.shape or not np.array_equal(stored, rebuilt):
            raise ParseError("transform tables do not match the stored density")
    return tr


def load_transform(path) -> RosenblattTransform:
    with open(path) as fh:
        try:
            doc = jsonio.loads(fh.read())
        except ValueError as exc:
            raise ParseError(f"malformed JSON: {exc}", source=str(path)) from None
    return transform_from_doc(doc)
