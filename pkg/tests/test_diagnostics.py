import math

import numpy as np
import pytest

from ergomap import (
    AsymTriangle,
    Baker,
    Identity,
    KindError,
    ParameterError,
    Sawtooth,
    Translation,
    Triangle,
    arcsine,
    build_transform,
    checkerboard,
    ergodic_average,
    factorize,
    fp_residual,
    grid1d,
    grid2d,
    histogram,
    histogram_to_csv,
    histogram_to_pgm,
    ks_uniformity,
    lyapunov_empirical,
    lyapunov_theoretical,
    model_bin_masses,
    orbit,
    ramp,
    read_pgm,
    triangular,
    tv_distance,
    uniform1d,
)


# -- Lyapunov estimators --------------------------------------------------------

def test_empirical_logistic_short_orbit():
    m = factorize(build_transform(arcsine()), Triangle(1))
    est = lyapunov_empirical(m, 0.3, 10_000)
    assert est.mode == "empirical" and est.n == 10_000
    assert est.value == pytest.approx(math.log(2.0), abs=5e-3)


def test_empirical_identity_is_zero():
    m = factorize(build_transform(ramp()), Identity())
    assert lyapunov_empirical(m, 0.3, 1000).value == 0.0


def test_empirical_logistic_family_row():
    m = factorize(build_transform(arcsine()), Triangle(2))
    est = lyapunov_empirical(m, 0.3, 10_000)
    assert est.value == pytest.approx(math.log(4.0), abs=5e-3)


def test_theoretical_logistic_value():
    m = factorize(build_transform(arcsine()), Triangle(1))
    est = lyapunov_theoretical(m)
    assert est.mode == "theoretical"
    assert est.value == pytest.approx(math.log(2.0), abs=1e-6)


def test_theoretical_ramp_sawtooth():
    m = factorize(build_transform(ramp()), Sawtooth(3))
    assert lyapunov_theoretical(m).value == pytest.approx(math.log(3.0), abs=1e-5)


def test_theoretical_ramp_fold_is_log_two():
    m = factorize(build_transform(ramp()), Triangle(1))
    assert lyapunov_theoretical(m).value == pytest.approx(math.log(2.0), abs=1e-5)


def test_theoretical_requires_1d_and_enough_cells():
    m2 = factorize(build_transform(checkerboard()), Baker())
    with pytest.raises(KindError):
        lyapunov_theoretical(m2)
    m1 = factorize(build_transform(ramp()), Triangle(1))
    with pytest.raises(ParameterError):
        lyapunov_theoretical(m1, 32)


def test_fold_entropy_matches_quadrature_of_induced_map():
    tr = build_transform(arcsine())
    for periods in (1, 2, 4):
        u = Triangle(periods)
        m = factorize(tr, u)
        assert lyapunov_theoretical(m).value == pytest.approx(u.entropy(), abs=1e-6)


def test_estimate_print_format():
    m = factorize(build_transform(arcsine()), Triangle(1))
    text = str(lyapunov_theoretical(m))
    assert text == f"h={math.log(2.0):.6f} mode=theoretical n=16384"


# -- invariance residual ----------------------------------------------------------

def test_logistic_residual_hand_enumerated():
    # preimages of 1/2 under the quadratic map are (1 +/- sqrt(1/2))/2
    m = factorize(build_transform(arcsine()), Triangle(1))
    xs = sorted(m.preimages(0.5))
    expected = [(1 - math.sqrt(0.5)) / 2, (1 + math.sqrt(0.5)) / 2]
    assert xs == pytest.approx(expected, abs=1e-12)
    assert fp_residual(m, [0.5]) < 1e-10


def test_identity_residual_zero():
    m = factorize(build_transform(triangular()), Identity())
    assert fp_residual(m, [0.25, 0.5, 0.75]) == 0.0


def test_residual_over_catalog(rng):
    ys = rng.uniform(0.01, 0.99, 1000)
    models = [triangular(), ramp(), arcsine(), uniform1d(), grid1d([0.2, 0.8, 1.6, 1.4])]
    uniforms = [Triangle(1), Sawtooth(3), AsymTriangle(0.3), Translation(0.3)]
    for model in models:
        tr = build_transform(model)
        for u in uniforms:
            m = factorize(tr, u)
            assert fp_residual(m, ys) < 1e-8, (model.kind, u.spec())


def test_residual_requires_1d():
    m = factorize(build_transform(checkerboard()), Baker())
    with pytest.raises(KindError):
        fp_residual(m, [(0.3, 0.3)])


# -- histograms --------------------------------------------------------------------

def test_constant_orbit_single_bin():
    h = histogram(np.full(1000, 0.42), 10)
    assert h.counts[4] == 1000 and h.counts.sum() == 1000
    assert h.density.sum() / 10 == pytest.approx(1.0, abs=1e-12)


def test_histogram_normalization_2d():
    pts = np.random.default_rng(0).uniform(0, 1, (5000, 2))
    h = histogram(pts, (8, 8))
    assert h.density.mean() == pytest.approx(1.0, abs=1e-12)


def test_histogram_rejects_bad_bins():
    with pytest.raises(ParameterError):
        histogram(np.array([0.5]), 0)
    with pytest.raises(ParameterError):
        histogram(np.array([[0.5, 0.5]]), (10,))


# -- total variation distance --------------------------------------------------------

def test_tv_zero_for_exact_masses():
    from ergomap import HistogramGrid

    model = triangular()
    bins = 10
    masses = model_bin_masses(model, (bins,))
    h = HistogramGrid(bins=(bins,), counts=masses * 1000, density=masses * bins, n=1000)
    assert tv_distance(h, model) == pytest.approx(0.0, abs=1e-12)


def test_tv_one_for_disjoint_masses():
    model = grid1d([2.0, 1e-12])  # all mass in the left half
    pts = np.full(1000, 0.99)  # all samples in the right half
    h = histogram(pts, 2)
    assert tv_distance(h, model) == pytest.approx(1.0, abs=1e-6)


def test_tv_dimension_mismatch():
    h = histogram(np.array([0.5]), 10)
    with pytest.raises(ParameterError):
        tv_distance(h, checkerboard())


def test_model_bin_masses_2d_exact():
    model = grid2d([[0.5, 1.5], [1.0, 1.0]])
    masses = model_bin_masses(model, (2, 2))
    # cell masses are values / 4, transposed to (x1, x2) index order
    assert masses == pytest.approx(np.array([[0.125, 0.25], [0.375, 0.25]]), abs=1e-15)
    # misaligned bins still integrate exactly
    m3 = model_bin_masses(model, (3, 3))
    assert m3.sum() == pytest.approx(1.0, abs=1e-12)
    assert m3[0, 0] == pytest.approx(0.5 / 9, abs=1e-15)


def test_tv_decreases_with_orbit_length():
    model = triangular()
    m = factorize(build_transform(model), Triangle(1))
    tvs = []
    for n in (10_000, 100_000, 1_000_000):
        orb = orbit(m, 0.3, n)
        tvs.append(tv_distance(histogram(orb, 100), model))
    # monotone on average: factor-of-two slack per decade, strict overall
    assert tvs[1] < 2.0 * tvs[0]
    assert tvs[2] < 2.0 * tvs[1]
    assert tvs[2] < tvs[0]


# -- ergodic averages -----------------------------------------------------------------

def test_ergodic_average_symmetric_density():
    m = factorize(build_transform(triangular()), Triangle(1))
    orb = orbit(m, 0.3, 1_000_000)
    assert ergodic_average(orb, lambda x: x) == pytest.approx(0.5, abs=5e-3)


def test_ergodic_average_ramp_mean():
    m = factorize(build_transform(ramp()), Triangle(1))
    orb = orbit(m, 0.3, 1_000_000)
    assert ergodic_average(orb, lambda x: x) == pytest.approx(2.0 / 3.0, abs=5e-3)


def test_ergodic_average_constant_observable():
    m = factorize(build_transform(ramp()), Triangle(1))
    orb = orbit(m, 0.3, 1000)
    assert ergodic_average(orb, lambda x: np.ones_like(x)) == 1.0


# -- KS statistics ----------------------------------------------------------------------

def test_ks_centered_lattice_is_half_over_n():
    n = 100
    zs = (np.arange(n) + 0.5) / n
    assert ks_uniformity(zs)[0] == pytest.approx(0.5 / n, abs=1e-15)


def test_ks_degenerate_sample():
    assert ks_uniformity(np.full(1000, 0.5))[0] > 0.49


def test_ks_2d_returns_per_axis():
    pts = np.random.default_rng(1).uniform(0, 1, (10_000, 2))
    stats = ks_uniformity(pts)
    assert stats.shape == (2,)
    assert np.max(stats) < 0.02


def test_ks_empty_sample():
    with pytest.raises(ParameterError):
        ks_uniformity(np.array([]))


# -- exports -------------------------------------------------------------------------

def test_histogram_csv_1d(tmp_path):
    h = histogram(np.array([0.1, 0.4, 0.6, 0.6]), 2)
    out = tmp_path / "h.csv"
    histogram_to_csv(h, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "bin_left,bin_right,density"
    assert [float(v) for v in lines[1].split(",")] == [0.0, 0.5, 1.0]


def test_histogram_pgm_2d(tmp_path):
    pts = np.array([[0.1, 0.9], [0.1, 0.9], [0.9, 0.1]])
    h = histogram(pts, (2, 2))
    out = tmp_path / "h.pgm"
    histogram_to_pgm(h, out)
    img = read_pgm(out)
    # the densest bin (x1 low, x2 high) maps to the top-left of the image
    assert img[0, 0] == 65535
    assert img.shape == (2, 2)
