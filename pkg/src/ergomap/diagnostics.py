"""Quantitative verification of constructed maps.

Provides the two Lyapunov-exponent estimators (orbit average of the exact
chain-rule log-Jacobian, and quadrature of log|J| against the target
density), the invariance residual of the transfer equation, histograms with
exact total-variation distance to the target, ergodic averages, and
Kolmogorov-Smirnov uniformity statistics.

All operations are pure over immutable inputs; histogram accumulation can be
partitioned across workers and merged by summing counts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .densities import Density, Density1D, Grid2D
from .errors import KindError, ParameterError
from .iterated import IteratedMap, Orbit, orbit
from .pgm import write_pgm

# power-graded refinement toward integrable singularities: cell edges are
# placed at W*(k/K)^p from the singular point (see lyapunov_theoretical)
_GRADE_POWER = 5
_DECAY_BANDS = 60


@dataclass
class LyapunovEstimate:
    """Lyapunov exponent in nats with the resolution it was computed at."""

    value: float
    mode: str  # "empirical" | "theoretical"
    n: int  # orbit length, or quadrature resolution

    def __str__(self):
        return f"h={self.value:.6f} mode={self.mode} n={self.n}"


def lyapunov_empirical(
    m: IteratedMap, x0=None, n: int = 10_000, *, jitter=None
) -> LyapunovEstimate:
    """Orbit average of log|J_M| over n steps from x0 (default 0.3 per axis)."""
    if n < 1:
        raise ParameterError("orbit length must be >= 1")
    orb = orbit(m, x0, n, jitter=jitter, store=False)
    return LyapunovEstimate(value=orb.log_jac_sum / n, mode="empirical", n=n)


def lyapunov_theoretical(m: IteratedMap, quad_cells: int = 16_384) -> LyapunovEstimate:
    """Quadrature of log|J_M(x)| rho(x) dx over [0,1].

    Midpoint rule on cells aligned with every kink of the integrand (density
    breakpoints, uniform-map branch boundaries pulled back through the
    transform, and preimages of density kinks), plus geometric cell
    refinement toward integrable log singularities.  Divergence across
    refinement levels signals a non-integrable singularity and raises a
    numerical warning.
    """
    if m.dim != 1:
        raise KindError("theoretical Lyapunov exponent is defined for 1-D maps")
    if quad_cells < 64:
        raise ParameterError("quad_cells must be >= 64")
    model_in: Density1D = m.transform_in.model
    model_out: Density1D = m.transform_out.model
    u = m.uniform

    align = {0.0, 1.0}
    align.update(model_in.breakpoints())
    align.update(model_in.singular_points())
    for b in u.branch_points():
        align.add(float(m.transform_in.inverse(b)))
    singular = set(model_in.singular_points())
    for s in set(model_out.singular_points()) | set(model_out.breakpoints()):
        pre = m.preimages(float(s))
        align.update(float(p) for p in pre)
        if s in model_out.singular_points():
            singular.update(float(p) for p in pre)
    for b in set(model_out.breakpoints()):
        align.add(float(b))

    pts = sorted(p for p in align if 0.0 <= p <= 1.0)
    merged = [0.0]
    for p in pts:
        if p - merged[-1] > 1e-13:
            merged.append(p)
    if merged[-1] != 1.0:
        merged[-1] = 1.0 if 1.0 - merged[-1] <= 1e-13 else merged[-1]
        if merged[-1] != 1.0:
            merged.append(1.0)

    def _is_singular(p: float) -> bool:
        return any(abs(p - s) <= 1e-12 for s in singular)

    mids, widths, tags = [], [], []  # tag: -1 base cell, k >= 0 distance band

    grade_cells = max(512, quad_cells // 4)

    def _graded(anchor: float, width: float, direction: int):
        # cell edges at width*(k/K)^p measured from the singular point, so the
        # mesh refines polynomially toward it; handles 1/sqrt and log edges
        offs = width * (np.arange(grade_cells + 1) / grade_cells) ** _GRADE_POWER
        cw = np.diff(offs)
        cm = 0.5 * (offs[:-1] + offs[1:])
        keep = cw > 0.0
        cw, cm = cw[keep], cm[keep]
        band = np.minimum(
            np.floor(np.log2(width / cm)).astype(int), _DECAY_BANDS - 1
        )
        for smid, sw, bd in zip(cm, cw, band):
            mids.append(anchor + direction * smid)
            widths.append(sw)
            tags.append(max(0, int(bd)))

    h_base = 1.0 / quad_cells
    for a, b in zip(merged[:-1], merged[1:]):
        s = b - a
        lad_a = _is_singular(a)
        lad_b = _is_singular(b)
        # the graded mesh must span the whole approach to a singular point,
        # not just a few base cells, to resolve power-law density edges
        wa = s / 4.0 if lad_a else 0.0
        wb = s / 4.0 if lad_b else 0.0
        if lad_a:
            _graded(a, wa, +1)
        if lad_b:
            _graded(b, wb, -1)
        lo, hi = a + wa, b - wb
        if hi > lo:
            n_mid = max(1, int(round((hi - lo) / h_base)))
            edges = np.linspace(lo, hi, n_mid + 1)
            for cmid, cw in zip(0.5 * (edges[:-1] + edges[1:]), np.diff(edges)):
                mids.append(cmid)
                widths.append(cw)
                tags.append(-1)

    mids_arr = np.asarray(mids)
    widths_arr = np.asarray(widths)
    tags_arr = np.asarray(tags)

    z = np.asarray(m.transform_in.forward(mids_arr))
    lj_u = u.log_jacobian_batch(z)
    w = u.apply_batch(z)
    rho = np.asarray(model_in.pdf(mids_arr))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = (np.log(rho) - np.asarray(model_out.log_pdf_idf(w)) + lj_u) * rho
    bad = ~np.isfinite(g)
    if np.any(bad):
        # cells this close to a singular point saturate the log in double
        # precision; their true contribution is O(width * |log width|), far
        # below the method's accuracy, so only gross coverage loss warns
        if float(widths_arr[bad].sum()) > 1e-6:
            warnings.warn(
                "non-finite integrand at quadrature midpoints; result may be unreliable",
                RuntimeWarning,
            )
        g = np.where(bad, 0.0, g)

    contrib = g * widths_arr
    graded_mask = tags_arr >= 0
    if np.any(graded_mask):
        # contributions binned by dyadic distance to the singular point must
        # decay for an integrable singularity
        bands = tags_arr[graded_mask]
        per_band = np.zeros(_DECAY_BANDS)
        np.add.at(per_band, bands, np.abs(contrib[graded_mask]))
        occupied = np.nonzero(per_band > 0.0)[0]
        if occupied.size >= 8:
            deep = per_band[occupied[-6:]]
            if np.all(deep[1:] >= deep[:-1]) and deep[-1] > 1e-10:
                warnings.warn(
                    "quadrature contributions diverge under refinement; "
                    "possible non-integrable singularity",
                    RuntimeWarning,
                )

    return LyapunovEstimate(value=float(contrib.sum()), mode="theoretical", n=quad_cells)


def fp_residual(m: IteratedMap, ys) -> float:
    """Max transfer-equation residual |sum rho(x)/|M'(x)| - rho(y)| over ys.

    Preimages of the map are obtained as inverse-transformed preimages of
    the uniform map; derivatives come from the exact chain rule.
    """
    if m.dim != 1:
        raise KindError("the invariance residual check is 1-D")
    if not m.is_factorized:
        raise KindError("invariance holds for factorized maps (same source and target)")
    model: Density1D = m.transform_in.model
    worst = 0.0
    for y in np.atleast_1d(np.asarray(ys, dtype=float)):
        y = float(y)
        total = 0.0
        for x in m.preimages(y):
            total += model.pdf(x) / math.exp(m.log_jacobian(x))
        worst = max(worst, abs(total - model.pdf(y)))
    return worst


@dataclass
class HistogramGrid:
    """Normalized density histogram over a uniform bin grid of [0,1]^d."""

    bins: tuple
    counts: np.ndarray
    density: np.ndarray  # probability density per unit volume
    n: int

    @property
    def dim(self) -> int:
        return len(self.bins)

    def masses(self) -> np.ndarray:
        return self.counts / self.n


def histogram(orbit_or_points, bins) -> HistogramGrid:
    """Bin orbit points on [0,1]^d and normalize to a density."""
    pts = orbit_or_points.points if isinstance(orbit_or_points, Orbit) else orbit_or_points
    if pts is None:
        raise ParameterError("orbit has no stored points")
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        dim = 1
    elif pts.ndim == 2 and pts.shape[1] in (1, 2):
        dim = pts.shape[1]
    else:
        raise ParameterError("points must be (n,), (n,1) or (n,2)")
    if isinstance(bins, (int, np.integer)):
        bins = (int(bins),) * dim
    else:
        bins = tuple(int(b) for b in bins)
    if len(bins) != dim or any(b < 1 for b in bins):
        raise ParameterError(f"need {dim} positive bin counts, got {bins}")
    if dim == 1:
        counts, _ = np.histogram(pts.reshape(-1), bins=bins[0], range=(0.0, 1.0))
    else:
        counts, _, _ = np.histogram2d(
            pts[:, 0], pts[:, 1], bins=bins, range=((0.0, 1.0), (0.0, 1.0))
        )
    n = int(pts.shape[0])
    vol = 1.0
    for b in bins:
        vol /= b
    return HistogramGrid(bins=bins, counts=counts, density=counts / (n * vol), n=n)


def _grid2d_mass_below(model: Grid2D, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Exact mass of [0,x] x [0,y] for all edge pairs; shape (len(xs), len(ys))."""
    n2, n1 = model.shape
    cell = model.cell_masses()  # (n2, n1)
    cm = np.zeros((n1 + 1, n2 + 1))
    cm[1:, 1:] = np.cumsum(np.cumsum(cell.T, axis=0), axis=1)
    sx = np.clip(np.asarray(xs, dtype=float), 0.0, 1.0) * n1
    sy = np.clip(np.asarray(ys, dtype=float), 0.0, 1.0) * n2
    i = np.minimum(np.floor(sx).astype(int), n1 - 1)
    j = np.minimum(np.floor(sy).astype(int), n2 - 1)
    fx = sx - i
    fy = sy - j
    ii, jj = np.meshgrid(i, j, indexing="ij")
    fxx, fyy = np.meshgrid(fx, fy, indexing="ij")
    base = cm[ii, jj]
    dx = cm[ii + 1, jj] - base
    dy = cm[ii, jj + 1] - base
    corner = cell.T[ii, jj]
    return base + fxx * dx + fyy * dy + fxx * fyy * corner


def model_bin_masses(model: Density, bins: tuple) -> np.ndarray:
    """Exact probability mass of each histogram bin under the model."""
    if model.dim == 1:
        edges = np.linspace(0.0, 1.0, bins[0] + 1)
        return np.diff(np.asarray(model.cdf(edges)))
    if not isinstance(model, Grid2D):
        raise KindError("2-D bin masses require a grid-backed density")
    ex = np.linspace(0.0, 1.0, bins[0] + 1)
    ey = np.linspace(0.0, 1.0, bins[1] + 1)
    below = _grid2d_mass_below(model, ex, ey)
    return np.diff(np.diff(below, axis=0), axis=1)


def tv_distance(hist: HistogramGrid, model: Density) -> float:
    """Total-variation distance between histogram and model, by exact bin masses."""
    if model.dim != hist.dim:
        raise ParameterError(
            f"histogram is {hist.dim}-D but the model is {model.dim}-D"
        )
    target = model_bin_masses(model, hist.bins)
    return 0.5 * float(np.abs(hist.masses() - target).sum())


def ergodic_average(orb: Orbit, g) -> float:
    """Orbit average (1/N) sum g(x_i) of a scalar observable."""
    if orb.points is None or len(orb.points) == 0:
        raise ParameterError("orbit has no stored points")
    vals = np.asarray(g(orb.points), dtype=float)
    if vals.shape[0] != len(orb.points):
        raise ParameterError("observable must map points to one value each")
    return float(vals.mean())


def ks_uniformity(zs) -> np.ndarray:
    """One-sample Kolmogorov-Smirnov statistic against Unif[0,1], per axis."""
    z = np.asarray(zs, dtype=float)
    if z.size == 0:
        raise ParameterError("empty sample")
    if z.ndim == 1:
        z = z[:, None]
    n = z.shape[0]
    stats = np.empty(z.shape[1])
    grid_hi = np.arange(1, n + 1) / n
    grid_lo = np.arange(0, n) / n
    for j in range(z.shape[1]):
        s = np.sort(z[:, j])
        stats[j] = max(np.max(grid_hi - s), np.max(s - grid_lo))
    return stats


def kronecker_sequence(n: int, dim: int = 1, seed: float = 0.5) -> np.ndarray:
    """Additive low-discrepancy sequence on [0,1]^dim (plastic-constant shifts)."""
    if n < 1:
        raise ParameterError("sequence length must be >= 1")
    x = 2.0
    for _ in range(64):
        x = (1.0 + x) ** (1.0 / (dim + 1))
    alpha = np.array([(1.0 / x) ** (j + 1) % 1.0 for j in range(dim)])
    idx = np.arange(1, n + 1)[:, None]
    pts = (seed + idx * alpha[None, :]) % 1.0
    return pts[:, 0] if dim == 1 else pts


# ---------------------------------------------------------------------------
# histogram export
# ---------------------------------------------------------------------------

def histogram_to_csv(hist: HistogramGrid, path) -> None:
    """1-D: bin_left,bin_right,density rows; 2-D: row-major density matrix."""
    with open(path, "w", newline="") as fh:
        if hist.dim == 1:
            edges = np.linspace(0.0, 1.0, hist.bins[0] + 1)
            fh.write("bin_left,bin_right,density\n")
            for lo, hi, d in zip(edges[:-1], edges[1:], hist.density):
                fh.write(f"{lo:.17g},{hi:.17g},{d:.17g}\n")
        else:
            # rows along the second coordinate, from x2 = 0 upward;
            # columns along the first coordinate
            for j2 in range(hist.bins[1]):
                fh.write(",".join(f"{v:.17g}" for v in hist.density[:, j2]) + "\n")


def histogram_to_pgm(hist: HistogramGrid, path) -> None:
    """Export a 2-D histogram as a max-normalized 16-bit grayscale image."""
    if hist.dim != 2:
        raise ParameterError("PGM export needs a 2-D histogram")
    dens = hist.density
    peak = dens.max()
    img = np.zeros_like(dens) if peak <= 0 else dens / peak
    # density[i1, i2] -> image row 0 at the top (largest x2)
    samples = np.rint(np.flipud(img.T) * 65535).astype(np.int64)
    write_pgm(samples, path, maxval=65535)
