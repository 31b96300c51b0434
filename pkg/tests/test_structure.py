from fractions import Fraction

import numpy as np
import pytest
import sympy

from minextrap.fixtures import fixture_data, load_fixture
from minextrap.grid import refine_epsilon, solution_to_measure, solve
from minextrap.measures import DiscreteMeasure, SpectralData, tv_norm
from minextrap.pipeline import parse_input
from minextrap.structure import (
    Guarantee,
    InconsistentInput,
    Tag,
    admissibility_range,
    algorithm_failure_diagnosis,
    separation_guarantee,
    gamma_set,
    lattice_solve,
    pair_offset,
    separation_check,
    support_structure,
    verified_extrapolation_norm,
)

F = Fraction


def test_admissibility_examples():
    r = admissibility_range(fixture_data("e1"), 2.0)
    assert (r.lower, r.upper) == (2.0, 2.0) and r.is_tight
    data, pri = parse_input(load_fixture("e3"))
    norms = [verified_extrapolation_norm(nu, data) for nu in pri["extrapolations"]]
    r = admissibility_range(data, None, norms)
    assert r.lower == pytest.approx(np.sqrt(2)) and r.is_tight
    r = admissibility_range(fixture_data("e4"), 2.0)
    assert r.lower == pytest.approx(np.sqrt(3)) and r.upper == 2.0 and not r.is_tight


def test_admissibility_rejects_inverted_bounds():
    with pytest.raises(InconsistentInput):
        admissibility_range(fixture_data("e1"), 1.0)


def test_verified_norm_rejects_non_extrapolation():
    with pytest.raises(InconsistentInput):
        verified_extrapolation_norm(DiscreteMeasure.dirac(0), fixture_data("e2"))


def test_gamma_examples():
    assert gamma_set(fixture_data("e2"), 2.0).members == ((-1,), (1,))
    assert len(gamma_set(fixture_data("e4"), 2.0)) == 0
    assert set(gamma_set(fixture_data("e5"), 2.0).members) == {(0, 0), (1, 1), (-1, -1)}


def test_gamma_properties():
    rng = np.random.default_rng(2)
    for _ in range(50):
        data = SpectralData(range(-3, 4), rng.standard_normal(7) + 1j * rng.standard_normal(7))
        s = data.sup_norm()
        g = gamma_set(data, s)
        top = data.freqs.tolist()[int(np.argmax(np.abs(data.values)))]
        assert top in g
        assert len(gamma_set(data, s * (1 + 1e-5))) == 0


def test_pair_offset_examples():
    assert pair_offset(-1, 1, fixture_data("e2")) == 0.0
    assert pair_offset(1, -1, fixture_data("e3")) == pytest.approx(0.25)
    assert pair_offset(1, 1, fixture_data("e3")) == 0.0


def test_structure_examples():
    s = support_structure(gamma_set(fixture_data("e2"), 2.0), fixture_data("e2"))
    assert s.tag == Tag.POINTS and [p.coords[0] for p in s.points] == [0, 0.5]
    e3 = fixture_data("e3")
    s = support_structure(gamma_set(e3, np.sqrt(2)), e3)
    assert [p.coords[0] for p in s.points] == pytest.approx([3 / 8, 7 / 8])
    e5 = fixture_data("e5")
    s = support_structure(gamma_set(e5, 2.0), e5)
    assert s.tag == Tag.HYPERPLANES
    assert len(s.hyperplanes.reduced) == 1
    assert s.hyperplanes.reduced[0].direction == (1, 1)
    assert s.hyperplanes.reduced[0].values == (0.0,)
    assert s.contains([0.3, 0.7]) and not s.contains([0.3, 0.3])


def test_structure_tags_by_gamma_size():
    e1, e4 = fixture_data("e1"), fixture_data("e4")
    assert support_structure(gamma_set(e1, 2.0), e1).tag == Tag.UNKNOWN
    assert support_structure(gamma_set(e4, 2.0), e4).tag == Tag.ANALYTIC


def test_point_structure_satisfies_all_pairs():
    rng = np.random.default_rng(8)
    for _ in range(30):
        phases = rng.random(3)
        data = SpectralData([-2, 1, 3], np.exp(2j * np.pi * phases) * 1.5)
        g = gamma_set(data, 1.5)
        s = support_structure(g, data)
        for x in s.points:
            for h in s.hyperplanes.planes:
                assert h.residual(x.coords) < 1e-9


def test_lattice_from_e5_like_data():
    # Gamma with two independent differences in d=2 gives a lattice
    data = SpectralData([(0, 0), (1, 2), (-3, 2)], [1, np.exp(2j * np.pi * 0.5), 1])
    s = support_structure(gamma_set(data, 1.0), data)
    assert s.tag == Tag.LATTICE
    for q in s.lattice.points_in_unit_cube():
        assert s.contains([float(v) for v in q])


def test_lattice_two_planes():
    lat = lattice_solve([(1, 2), (-3, 2)], [F(1, 2), F(-1, 2)])
    assert lat.generators == ((F(1, 4), F(3, 8)), (F(-1, 4), F(1, 8)))
    assert lat.base_point == (F(3, 4), F(7, 8))
    assert lat.contains((F(0), F(1, 4)))
    rng = np.random.default_rng(0)
    for _ in range(20):
        k = rng.integers(-5, 6, size=2)
        x = tuple(lat.base_point[i] + k[0] * lat.generators[0][i] + k[1] * lat.generators[1][i]
                  for i in range(2))
        assert lat.contains(x)
    assert len(lat.points_in_unit_cube()) == 8


def test_lattice_identity():
    lat = lattice_solve([(1, 0), (0, 1)], [0, 0])
    assert lat.base_point == (0, 0)
    assert lat.generators == ((1, 0), (0, 1))


def test_lattice_random_unimodular_against_rational_inverse():
    rng = np.random.default_rng(11)
    for _ in range(20):
        d = int(rng.integers(2, 4))
        # product of elementary integer matrices is unimodular
        P = sympy.eye(d)
        for _ in range(6):
            i, j = rng.choice(d, 2, replace=False)
            E = sympy.eye(d)
            E[i, j] = int(rng.integers(-3, 4))
            P = P * E
        lat = lattice_solve(P.tolist(), [0] * d)
        Pinv = P.inv()
        for k in range(d):
            assert lat.generators[k] == tuple(F(int(Pinv[i, k])) for i in range(d))


def test_lattice_singular_rejected():
    with pytest.raises(np.linalg.LinAlgError, match="rank 1"):
        lattice_solve([(1, 2), (2, 4)], [0, 0])


def test_separation_examples():
    e1 = DiscreteMeasure([0, 0.5], [1, 1])
    assert separation_check(DiscreteMeasure.dirac(0.3), 5, 2.0)
    assert not separation_check(e1, 1, 2.0)
    assert separation_check(e1, 128, 2.0)


def test_separation_guarantee_examples():
    e1 = DiscreteMeasure([0, 0.5], [1, 1])
    assert separation_guarantee(e1, 128) == Guarantee.D1_C2
    assert separation_guarantee(e1, 10) == Guarantee.NONE
    mu2 = DiscreteMeasure([[0, 0], [0.5, 0.5]], [1, -1])
    assert separation_guarantee(mu2, 512, real_valued=True) == Guarantee.D2_REAL_C238


def test_failure_diagnosis_examples():
    eps, g = algorithm_failure_diagnosis(True, fixture_data("e2"))
    assert eps == 2 and g.members == ((-1,), (1,))
    eps, g = algorithm_failure_diagnosis(True, fixture_data("e1"))
    assert eps == 2 and g.members == ((0,),)
    eps, g = algorithm_failure_diagnosis(True, fixture_data("e5"))
    assert eps == 2 and len(g) == 3
    with pytest.raises(ValueError):
        algorithm_failure_diagnosis(False, fixture_data("e1"))


@pytest.mark.parametrize("name,grid", [("e1", 8), ("e2", 8), ("e5", 16)])
def test_degenerate_route_matches_refinement(name, grid):
    data = fixture_data(name)
    eps, _ = algorithm_failure_diagnosis(True, data)
    assert refine_epsilon(data, [grid, 2 * grid])[-1] == pytest.approx(eps, abs=1e-6)


@pytest.mark.parametrize("name,grid,eps", [("e2", 8, 2.0), ("e3", 8, np.sqrt(2)),
                                           ("e5", 16, 2.0)])
def test_solver_atoms_lie_in_structure(name, grid, eps):
    data = fixture_data(name)
    s = support_structure(gamma_set(data, eps), data)
    nu = solution_to_measure(solve(data, grid))
    assert tv_norm(nu) == pytest.approx(eps, abs=1e-7)
    for x, _ in nu.atoms:
        assert s.contains(x.coords)
