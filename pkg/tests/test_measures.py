import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minextrap.measures import (
    DimensionError,
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    TorusPoint,
    TrigPolynomial,
    convolve,
    fourier_transform,
    inner_product,
    measure_from_json,
    measure_to_json,
    modulate,
    product_frequencies,
    product_measure,
    spectral_from_json,
    spectral_to_json,
    translate,
    trig_eval,
    tv_norm,
)


def test_torus_point_reduction_and_tolerant_equality():
    assert TorusPoint(1.25) == TorusPoint(0.25)
    assert TorusPoint(-0.25) == TorusPoint(0.75)
    assert TorusPoint(1 - 1e-12) == TorusPoint(0.0)
    assert TorusPoint(0.1) != TorusPoint(0.1 + 1e-6)
    assert all(0 <= c < 1 for c in TorusPoint([3.7, -0.2]).coords)


def test_frequency_set_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        FrequencySet([1, 1])
    with pytest.raises(ValueError):
        FrequencySet([])


def test_fourier_transform_examples(lam, e1, e3):
    assert np.allclose(fourier_transform(e1, lam).values, [0, 2, 0])
    assert np.allclose(fourier_transform(e3, lam).values, [1 - 1j, 0, 1 + 1j])
    assert np.all(fourier_transform(DiscreteMeasure.empty(1), lam).values == 0)


def test_fourier_transform_dimension_mismatch(e1):
    with pytest.raises(DimensionError):
        fourier_transform(e1, FrequencySet.box(-1, 1, 2))


def test_tv_norm_examples(e1):
    assert tv_norm(e1) == 2
    assert tv_norm(DiscreteMeasure.empty(1)) == 0
    nu = DiscreteMeasure([3 / 8, 7 / 8], [-1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert tv_norm(nu) == pytest.approx(np.sqrt(2), abs=1e-15)


def test_atoms_merge_and_prune():
    mu = DiscreteMeasure([0.2, 0.2 + 1e-11, 0.5, 1.5], [1, 2, 1, -1])
    assert len(mu) == 1
    assert mu.weights[0] == 3
    assert len(DiscreteMeasure([0.1], [1e-13])) == 0


def test_translate_examples(e1):
    assert translate(e1, 0.25).is_close(DiscreteMeasure([0.25, 0.75], [1, 1]))
    assert translate(e1, 0).is_close(e1)
    assert translate(DiscreteMeasure.dirac(3 / 8), 3 / 4).is_close(DiscreteMeasure.dirac(1 / 8))


def test_modulate_examples(e1, e2):
    assert modulate(e1, -1).is_close(e2)
    assert modulate(e1, 0).is_close(e1)
    assert modulate(DiscreteMeasure.dirac(0.25), 2).is_close(DiscreteMeasure.dirac(0.25, -1))


def test_convolve_examples(e1, e2):
    assert len(convolve(e1, e2)) == 0
    assert convolve(e1, DiscreteMeasure.dirac(0)).is_close(e1)
    q = DiscreteMeasure.dirac(0.25)
    assert convolve(q, q).is_close(DiscreteMeasure.dirac(0.5))


def test_product_measure_examples(e1, e3):
    p = product_measure(e1, e1)
    assert p.d == 2 and len(p) == 4 and np.allclose(p.weights, 1)
    emb = product_measure(e1, DiscreteMeasure.dirac(0))
    assert emb.d == 2 and np.allclose(emb.points[:, 1], 0)
    assert tv_norm(product_measure(e3, e1)) == pytest.approx(4)


def test_trig_eval_examples(e4_phi):
    assert trig_eval(TrigPolynomial([1, -1], [0.5, 0.5]), 0.0) == pytest.approx(1)
    assert trig_eval(TrigPolynomial([0], [2 - 1j]), 0.3) == pytest.approx(2 - 1j)
    assert abs(trig_eval(e4_phi, 0.0)) == pytest.approx(1, abs=1e-12)


def test_inner_product_examples(e2, e4, e4_phi):
    cos = TrigPolynomial([1, -1], [0.5, 0.5])
    assert inner_product(cos, e2) == pytest.approx(2)
    assert inner_product(cos, DiscreteMeasure.empty(1)) == 0
    assert inner_product(e4_phi, e4) == pytest.approx(2, abs=1e-12)


def test_json_round_trip_is_lossless():
    rng = np.random.default_rng(3)
    mu = DiscreteMeasure(rng.random((5, 2)), rng.standard_normal(5) + 1j * rng.standard_normal(5))
    back = measure_from_json(json.loads(json.dumps(measure_to_json(mu))))
    assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)
    data = fourier_transform(mu, FrequencySet.box(-2, 2, 2))
    back = spectral_from_json(json.loads(json.dumps(spectral_to_json(data))))
    assert back.freqs == data.freqs and np.array_equal(back.values, data.values)


# randomized invariants

coords = st.floats(0, 1, allow_nan=False, exclude_max=True)
weights = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def measures(draw, d=1, max_atoms=4):
    k = draw(st.integers(1, max_atoms))
    pts = [[draw(coords) for _ in range(d)] for _ in range(k)]
    ws = [draw(weights) for _ in range(k)]
    return DiscreteMeasure(pts, ws, d=d)


@st.composite
def polys(draw, lam):
    return TrigPolynomial(lam, [draw(weights) for _ in range(len(lam))])


LAM = FrequencySet(range(-3, 4))


@settings(max_examples=60, deadline=None)
@given(measures(), st.data())
def test_parseval(mu, data):
    f = data.draw(polys(LAM))
    mh = fourier_transform(mu, LAM)
    rhs = np.sum(f.coefficients * np.conj(mh.values))
    assert inner_product(f, mu) == pytest.approx(rhs, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(measures(), coords)
def test_translation_identity(mu, y):
    lhs = fourier_transform(translate(mu, y), LAM).values
    rhs = np.exp(-2j * np.pi * LAM.elements[:, 0] * y) * fourier_transform(mu, LAM).values
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(measures(), st.integers(-4, 4))
def test_modulation_identity(mu, n):
    lhs = fourier_transform(modulate(mu, n), LAM).values
    rhs = fourier_transform(mu, LAM.shift(-n)).values
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(measures(), measures(d=2, max_atoms=3))
def test_product_norm(mu1, mu2):
    assert tv_norm(product_measure(mu1, mu2)) == pytest.approx(tv_norm(mu1) * tv_norm(mu2))


@settings(max_examples=60, deadline=None)
@given(measures(), measures())
def test_convolution_theorem(mu1, mu2):
    lhs = fourier_transform(convolve(mu1, mu2), LAM).values
    rhs = fourier_transform(mu1, LAM).values * fourier_transform(mu2, LAM).values
    assert np.allclose(lhs, rhs, atol=1e-8)


def test_product_frequencies_pairs():
    f = product_frequencies(FrequencySet([0, 1]), FrequencySet([-1, 2]))
    assert f.tolist() == [(0, -1), (0, 2), (1, -1), (1, 2)]


def test_spectral_data_shape_checked():
    with pytest.raises(ValueError):
        SpectralData(FrequencySet([0, 1]), [1.0])
