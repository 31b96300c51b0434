import numpy as np
import pytest

from minextrap.fixtures import fixture_data
from minextrap.measures import DiscreteMeasure, FrequencySet, SpectralData, fourier_transform, tv_norm
from minextrap.special import (
    CantorParams,
    cantor_fourier,
    nu_family_1d,
    nu_family_2d,
    nu_family_coefficient,
    projection_extrapolation_norm,
    surface_fourier_diagonal,
    surface_fourier_two_lines,
)

L = FrequencySet([-1, 0, 1])
# q = 3, m = 1, K = 40 truncated product; frozen from an mpmath evaluation at 50 digits
CANTOR_3_1 = 0.37143735670876576


def test_nu_family_1d_examples():
    assert nu_family_1d(0, 2).is_close(DiscreteMeasure([0, 0.5], [1, 1]))
    nu = nu_family_1d(0.25, 2)
    assert nu.is_close(DiscreteMeasure([0.25, 0.75], [1, 1]))
    assert np.allclose(fourier_transform(nu, L).values, [0, 2, 0])
    for y in (0.0, 0.1, 0.37):
        v = fourier_transform(nu_family_1d(y, 3), L).values
        assert abs(v[0]) < 1e-12 and abs(v[2]) < 1e-12
    assert tv_norm(nu_family_1d(0.3, 7)) == pytest.approx(2)


def test_nu_family_coefficients_closed_form():
    lam = FrequencySet(range(-12, 13))
    for K in range(2, 7):
        for y in (0.0, 0.13, 0.5):
            got = fourier_transform(nu_family_1d(y, K), lam).values
            ref = [nu_family_coefficient(y, K, m[0]) for m in lam]
            assert np.allclose(got, ref, atol=1e-12)


def test_nu_family_2d_examples():
    nu = nu_family_2d(0, 2)
    assert nu.is_close(DiscreteMeasure([[0, 0], [0.5, 0.5]], [1, 1]))
    lam = FrequencySet([(1, 0), (1, 1)])
    v = fourier_transform(nu_family_2d(0.1, 3), lam).values
    assert abs(v[0]) < 1e-12 and v[1] == pytest.approx(2)
    for y in (0, 1 / 8, 0.3):
        for K in (2, 4, 5):
            p = nu_family_2d(y, K).points
            s = p.sum(axis=1)
            assert np.allclose(s - np.round(s), 0, atol=1e-15)


def test_nu_family_needs_two_atoms():
    with pytest.raises(ValueError):
        nu_family_1d(0, 1)


def _mu_y(y):
    return fourier_transform(DiscreteMeasure([0, y], [1, -1]), L)


def test_projection_norm_examples():
    assert projection_extrapolation_norm(SpectralData(L, [0, 0, 0])) == 0
    assert projection_extrapolation_norm(_mu_y(0.5)) == pytest.approx(8 / np.pi, abs=1e-6)
    assert projection_extrapolation_norm(_mu_y(0.01)) < 2


def test_projection_norm_quadrature_minimum():
    with pytest.raises(ValueError):
        projection_extrapolation_norm(_mu_y(0.3), quadrature_points=4)
    # smooth density: the minimal rule is already close to the fine one
    coarse = projection_extrapolation_norm(_mu_y(0.3), quadrature_points=64)
    fine = projection_extrapolation_norm(_mu_y(0.3), quadrature_points=8192)
    assert coarse == pytest.approx(fine, abs=1e-3)


def test_projection_norm_decreases_to_zero():
    vals = [projection_extrapolation_norm(_mu_y(2.0 ** -j)) for j in range(1, 11)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.01


def test_cantor_values():
    p = CantorParams(3, 40)
    assert cantor_fourier(p, 0) == 1.0
    assert cantor_fourier(p, 1) == pytest.approx(CANTOR_3_1, abs=1e-10)
    for n in range(1, 6):
        assert abs(cantor_fourier(p, 3 ** n) - cantor_fourier(p, 3 ** (n + 1))) < 1e-8
    val, bound = cantor_fourier(p, 9, with_bound=True)
    assert bound == pytest.approx(np.pi * 9 * 3.0 ** -40)
    assert cantor_fourier(p, -2) == pytest.approx(cantor_fourier(p, 2))


def test_cantor_params():
    with pytest.raises(ValueError):
        CantorParams(2)
    with pytest.raises(ValueError):
        CantorParams(3, 0)


def test_surface_measures():
    assert surface_fourier_diagonal((1, 1)) == 2
    assert surface_fourier_diagonal((1, 0)) == 0
    assert surface_fourier_diagonal((0, 0)) == 2
    assert [surface_fourier_two_lines(m) for m in [(0, 0), (0, 1), (0, 2), (1, 0), (0, -2)]] \
        == [2, 0, 2, 0, 2]


def test_diagonal_matches_e5_data():
    data = fixture_data("e5")
    assert np.allclose([surface_fourier_diagonal(m) for m in data.freqs], data.values, atol=1e-12)
