import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergomap import (
    DomainError,
    NormalizationError,
    ParameterError,
    ParseError,
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

ONE_D_MODELS = [triangular(), ramp(), arcsine(), uniform1d(), grid1d([0.2, 0.8, 1.6, 1.4])]


# -- catalog point values ----------------------------------------------------

def test_triangular_pdf_example():
    assert triangular().pdf(0.25) == pytest.approx(1.0, abs=1e-15)


def test_ramp_pdf_example():
    assert ramp().pdf(0.5) == pytest.approx(1.0, abs=1e-15)


def test_uniform_pdf_example():
    assert uniform1d().pdf(0.123) == 1.0


def test_triangular_cdf_example():
    assert triangular().cdf(0.25) == pytest.approx(0.125, abs=1e-15)


def test_ramp_cdf_example():
    assert ramp().cdf(0.5) == pytest.approx(0.25, abs=1e-15)


def test_arcsine_cdf_example():
    # arcsin(1/2) = pi/6 exactly, so F(1/4) = 1/3
    assert arcsine().cdf(0.25) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_ramp_idf_example():
    assert ramp().idf(0.25) == pytest.approx(0.5, abs=1e-15)


def test_arcsine_idf_example():
    assert arcsine().idf(0.5) == pytest.approx(0.5, abs=1e-12)


def test_triangular_idf_example():
    assert triangular().idf(0.125) == pytest.approx(0.25, abs=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        triangular().pdf(1.5)
    with pytest.raises(DomainError):
        ramp().idf(-0.1)
    with pytest.raises(DomainError):
        arcsine().cdf(np.array([0.2, 1.2]))


# -- invariants over the 1-D catalog ------------------------------------------

@pytest.mark.parametrize("model", ONE_D_MODELS, ids=lambda m: m.kind)
def test_pdf_integrates_to_one(model):
    if model.kind == "arcsine":
        pytest.skip("unbounded endpoints; covered by the convergence test below")
    mids = (np.arange(2048) + 0.5) / 2048
    if model.kind == "grid1d":
        integral = model.values.mean()
    else:
        integral = model.pdf(mids).mean()
    assert integral == pytest.approx(1.0, abs=1e-6)


def test_arcsine_integral_is_exactly_one():
    # the midpoint rule cannot see past the inverse-sqrt endpoints at any
    # practical resolution; the exact integral is the CDF span, and the
    # midpoint deficit must shrink like sqrt(h) to confirm integrability
    m = arcsine()
    assert m.cdf(1.0) - m.cdf(0.0) == pytest.approx(1.0, abs=1e-12)
    deficits = []
    for cells in (2048, 8192):
        mids = (np.arange(cells) + 0.5) / cells
        deficits.append(1.0 - m.pdf(mids).mean())
    assert deficits[1] == pytest.approx(deficits[0] / 2.0, rel=0.05)


@pytest.mark.parametrize("model", ONE_D_MODELS, ids=lambda m: m.kind)
def test_cdf_monotone(model):
    xs = np.linspace(0.0, 1.0, 10_000)
    f = model.cdf(xs)
    assert np.all(np.diff(f) >= 0.0)
    assert f[0] == 0.0 and f[-1] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("model", ONE_D_MODELS, ids=lambda m: m.kind)
def test_idf_cdf_round_trip(model):
    xs = np.linspace(0.0, 1.0, 1000)
    assert np.max(np.abs(model.idf(model.cdf(xs)) - xs)) < 1e-9


@pytest.mark.parametrize("model", ONE_D_MODELS, ids=lambda m: m.kind)
def test_cdf_derivative_matches_pdf(model):
    # central differences away from kinks and interval ends
    xs = np.linspace(0.05, 0.95, 200)
    kinks = np.array(model.breakpoints() + (0.0, 1.0))
    xs = xs[np.min(np.abs(xs[:, None] - kinks[None, :]), axis=1) > 1e-3]
    h = 1e-6
    fd = (model.cdf(xs + h) - model.cdf(xs - h)) / (2 * h)
    assert np.max(np.abs(fd - model.pdf(xs))) < 1e-4


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_cdf_pair_ordering_property(a, b):
    model = triangular()
    lo, hi = min(a, b), max(a, b)
    assert model.cdf(lo) <= model.cdf(hi)


def test_bisection_fallback_matches_analytic():
    # exercise the generic inverse against a closed form
    class Shadow(type(ramp())):
        def idf(self, p):  # force the base-class bisection path
            from ergomap.densities import Density1D

            return Density1D.idf(self, p)

    ps = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(Shadow().idf(ps) - np.sqrt(ps))) < 1e-12


# -- grid construction --------------------------------------------------------

def test_grid1d_normalizes():
    m = grid1d([1.0, 3.0])
    assert m.values.tolist() == [0.5, 1.5]
    assert m.cdf(0.5) == pytest.approx(0.25)


def test_grid1d_zero_mass_raises():
    with pytest.raises(NormalizationError):
        grid1d([0.0, 0.0])


def test_grid_negative_raises():
    with pytest.raises(ParameterError):
        grid1d([1.0, -0.5])


def test_eps_clamp_keeps_cdf_strictly_increasing():
    m = grid1d([0.0, 2.0])
    assert m.values[0] > 0.0
    xs = np.linspace(0.0, 1.0, 100)
    assert np.all(np.diff(m.cdf(xs)) > 0.0)


# -- checkerboard -------------------------------------------------------------

def test_checkerboard_single_cell_is_uniform():
    m = checkerboard(1, 1.0, 1.0)
    assert m.values.tolist() == [[1.0]]


def test_checkerboard_two_by_two_normalized_as_given():
    # mean of (0.4, 1.6) alternation is already 1
    m = checkerboard(2, 0.4, 1.6)
    assert m.values.tolist() == [[1.6, 0.4], [0.4, 1.6]]


def test_checkerboard_zero_low_clamped():
    m = checkerboard(2, 0.0, 2.0)
    assert m.values.min() > 0.0


def test_checkerboard_bad_params():
    with pytest.raises(ParameterError):
        checkerboard(0, 0.4, 1.6)
    with pytest.raises(ParameterError):
        checkerboard(2, 0.4, -1.0)


def test_checkerboard_high_cell_at_origin():
    m = checkerboard(2, 0.4, 1.6)
    assert m.pdf((0.1, 0.1)) == pytest.approx(1.6)
    assert m.pdf((0.9, 0.1)) == pytest.approx(0.4)


# -- marginals and conditionals ----------------------------------------------

def test_checkerboard_marginal_is_uniform():
    m = checkerboard(2, 0.4, 1.6)
    table = m.marginal(1)
    assert np.allclose(table.cum, [0.0, 0.5, 1.0], atol=1e-15)


def test_grid2d_marginal_example():
    # column masses 0.375 and 0.625
    m = grid2d([[0.5, 1.5], [1.0, 1.0]])
    table = m.marginal(1)
    assert np.allclose(table.cum, [0.0, 0.375, 1.0], atol=1e-15)


@pytest.mark.parametrize("axis", [1, 2])
def test_marginal_integrates_to_one(coin_pgm, axis):
    m = load_image_density(coin_pgm)
    assert m.marginal(axis).cum[-1] == pytest.approx(1.0, abs=1e-12)


def test_conditional_cdf_example():
    m = checkerboard(2, 0.4, 1.6)
    cond = m.conditional_cdf(0.25)
    assert cond.cdf(0.5) == pytest.approx(0.8, abs=1e-15)


def test_conditional_of_separable_density_is_independent():
    vals = np.outer([1.0, 3.0], [2.0, 6.0])  # rank-one: conditionals equal
    m = grid2d(vals)
    c1 = m.conditional_cdf(0.2)
    c2 = m.conditional_cdf(0.9)
    assert np.allclose(c1.cum, c2.cum, atol=1e-15)


def test_uniform2d_conditional_is_identity():
    m = uniform2d()
    xs = np.linspace(0.0, 1.0, 11)
    assert np.allclose(m.conditional_cdf(0.3).cdf(xs), xs, atol=1e-15)


def test_conditional_strictly_increasing_after_clamp():
    m = grid2d([[0.0, 1.0], [2.0, 1.0]])
    cond = m.conditional_cdf(0.25)
    assert np.all(np.diff(cond.cum) > 0.0)


# -- image loading ------------------------------------------------------------

def test_load_image_density_normalization():
    # sum 8 over 4 cells of area 1/4 -> divide by 2
    data = b"P2\n2 2\n3\n1 3\n2 2\n"
    m = load_image_density(data)
    # row 0 of the image (values 1,3) is the TOP: x2 in [1/2, 1]
    assert m.pdf((0.25, 0.75)) == pytest.approx(0.5)
    assert m.pdf((0.75, 0.75)) == pytest.approx(1.5)
    assert m.pdf((0.25, 0.25)) == pytest.approx(1.0)
    assert m.pdf((0.75, 0.25)) == pytest.approx(1.0)


def test_constant_image_is_uniform():
    data = b"P2\n3 2\n9\n5 5 5\n5 5 5\n"
    m = load_image_density(data)
    assert np.allclose(m.values, 1.0)


def test_all_zero_image_raises():
    with pytest.raises(NormalizationError):
        load_image_density(b"P2\n2 2\n255\n0 0 0 0\n")


def test_image_cells_integrate_to_one(coin_pgm):
    m = load_image_density(coin_pgm)
    assert m.cell_masses().sum() == pytest.approx(1.0, abs=1e-12)


# -- spec parsing and export --------------------------------------------------

def test_parse_density_specs(coin_pgm):
    assert parse_density_spec("ramp").kind == "ramp"
    assert parse_density_spec("checkerboard").values.shape == (4, 4)
    assert parse_density_spec("checkerboard:2:0.4:1.6").pdf((0.1, 0.1)) == pytest.approx(1.6)
    assert parse_density_spec(str(coin_pgm)).kind == "image"
    with pytest.raises(ParseError):
        parse_density_spec("nope")
    with pytest.raises(ParseError):
        parse_density_spec("checkerboard:2")
    with pytest.raises(ParseError):
        parse_density_spec("ramp:1")


def test_density_csv_export(tmp_path):
    m = grid2d([[0.5, 1.5], [1.0, 1.0]])
    out = tmp_path / "d.csv"
    density_to_csv(m, out)
    rows = out.read_text().strip().split("\n")
    assert [float(v) for v in rows[0].split(",")] == [0.5, 1.5]
    assert [float(v) for v in rows[1].split(",")] == [1.0, 1.0]
