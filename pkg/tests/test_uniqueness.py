import numpy as np
import pytest
from sympy import QQ, I, exp, pi
from sympy.polys.matrices import DomainMatrix

from minextrap.fixtures import fixture_data
from minextrap.measures import DiscreteMeasure, FrequencySet, SpectralData, TorusPoint, fourier_transform
from minextrap.structure import SupportStructure, Tag
from minextrap.uniqueness import (
    RankDeficient,
    Verdict,
    build_E,
    has_full_column_rank,
    recover_amplitudes,
    uniqueness_verdict,
)


def _points(*xs):
    return SupportStructure(Tag.POINTS, points=tuple(TorusPoint(x) for x in xs))


def test_build_E_examples(lam):
    E = build_E(lam, [0, 0.5]).matrix
    assert np.allclose(E, [[1, -1], [1, 1], [1, -1]], atol=1e-15)
    E = build_E(lam, [3 / 8, 7 / 8]).matrix
    ref = [[np.exp(2j * np.pi * 3 / 8), np.exp(2j * np.pi * 7 / 8)], [1, 1],
           [np.exp(-2j * np.pi * 3 / 8), np.exp(-2j * np.pi * 7 / 8)]]
    assert np.allclose(E, ref)
    assert np.array_equal(build_E(lam, [0.0]).matrix, np.ones((3, 1)))
    assert np.allclose(np.abs(build_E(lam, np.random.default_rng(0).random(4)).matrix), 1)


def test_rank_examples(lam):
    assert has_full_column_rank(build_E(lam, [0, 0.5]))
    assert has_full_column_rank(build_E(lam, [0, 1 / 3]))
    assert not has_full_column_rank(build_E(FrequencySet([0]), [0, 0.5]))


def test_recover_examples(lam):
    a, res = recover_amplitudes(build_E(lam, [0, 0.5]), fixture_data("e2"))
    assert np.allclose(a, [1, -1]) and res < 1e-12
    a, res = recover_amplitudes(build_E(lam, [3 / 8, 7 / 8]), fixture_data("e3"))
    assert np.allclose(a, [-np.sqrt(0.5), np.sqrt(0.5)]) and res < 1e-12
    a, _ = recover_amplitudes(build_E(lam, [0.1, 0.6]), SpectralData(lam, [0, 0, 0]))
    assert np.all(a == 0)
    with pytest.raises(RankDeficient):
        recover_amplitudes(build_E(FrequencySet([0]), [0, 0.5]), SpectralData([0], [1]))


def test_verdict_examples(lam):
    r = uniqueness_verdict(_points(0, 0.5), lam, fixture_data("e2"))
    assert r.verdict == Verdict.UNIQUE
    assert r.measure.is_close(DiscreteMeasure([0, 0.5], [1, -1]), tol=1e-12)
    r = uniqueness_verdict(_points(0, 1 / 3), lam, fixture_data("e4"))
    assert r.verdict == Verdict.UNIQUE
    r = uniqueness_verdict(SupportStructure(Tag.UNKNOWN), lam, fixture_data("e1"))
    assert r.verdict == Verdict.NOT_APPLICABLE


def test_inconsistent_support_is_inconclusive(lam):
    r = uniqueness_verdict(_points(0.1, 0.6), lam, fixture_data("e2"))
    assert r.verdict == Verdict.INCONCLUSIVE and "inconsistent" in r.reason
    r = uniqueness_verdict(_points(0, 0.25, 0.5, 0.75), lam, fixture_data("e2"))
    assert r.verdict == Verdict.INCONCLUSIVE and "rank" in r.reason


def _exact_rank(ms, ks, N):
    K = QQ.algebraic_field(exp(2 * pi * I / N))
    z = K.from_sympy(exp(2 * pi * I / N))
    rows = [[z ** ((-m * k) % N) for k in ks] for m in ms]
    return DomainMatrix(rows, (len(ms), len(ks)), K).rank()


def test_rank_matches_cyclotomic_oracle():
    rng = np.random.default_rng(6)
    for _ in range(40):
        N = int(rng.choice([4, 6, 8]))
        J = int(rng.integers(1, 8))
        Kc = int(rng.integers(1, min(J, N) + 1))
        ms = sorted(int(m) for m in rng.choice(np.arange(-4, 5), J, replace=False))
        ks = sorted(int(k) for k in rng.choice(N, Kc, replace=False))
        E = build_E(FrequencySet(ms), [k / N for k in ks])
        assert has_full_column_rank(E) == (_exact_rank(ms, ks, N) == Kc), (ms, ks, N)


def test_recovery_reproduces_data():
    rng = np.random.default_rng(7)
    lam = FrequencySet(range(-4, 5))
    for _ in range(30):
        k = int(rng.integers(1, 5))
        pts = rng.random(k)
        mu = DiscreteMeasure(pts, rng.standard_normal(k) + 1j * rng.standard_normal(k))
        data = fourier_transform(mu, lam)
        E = build_E(lam, mu.points)
        a, res = recover_amplitudes(E, data)
        back = fourier_transform(DiscreteMeasure(mu.points, a), lam)
        assert np.max(np.abs(back.values - data.values)) <= 10 * res + 1e-12


def test_difference_of_extrapolations_vanishes():
    rng = np.random.default_rng(9)
    lam = FrequencySet(range(-3, 4))
    for _ in range(20):
        pts = np.sort(rng.random(3))
        E = build_E(lam, pts)
        a1 = rng.standard_normal(3)
        data = SpectralData(lam, E.matrix @ a1)
        a2, _ = recover_amplitudes(E, data)
        assert np.allclose(a1 - a2, 0, atol=1e-10)


def test_verdict_json(lam):
    js = uniqueness_verdict(_points(0, 0.5), lam, fixture_data("e2")).to_json()
    assert js["verdict"] == "UNIQUE" and js["measure"]["d"] == 1 and js["residual"] < 1e-12
