"""What epsilon and Gamma say about where minimal extrapolations live.

``Gamma`` collects the frequencies at which ``|mu_hat|`` reaches epsilon.
Every pair ``m, n`` in Gamma pins the support to the periodic hyperplanes
``x . (m - n) + alpha_{m,n} in Z`` with ``exp(2 pi i alpha_{m,n}) =
mu_hat(m) / mu_hat(n)``.  In one dimension that leaves finitely many points;
with ``d`` independent differences it leaves a lattice.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .measures import DiscreteMeasure, SpectralData, TorusPoint, as_frequency, torus_distance

GAMMA_TOL = 1e-7
RATIONAL_DENOMINATOR_CAP = 10**6


class InconsistentInput(ValueError):
    pass


@dataclass(frozen=True)
class AdmissibilityRange:
    lower: float
    upper: float
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower bound must be nonnegative")

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    @property
    def is_tight(self) -> bool:
        return math.isclose(self.lower, self.upper, rel_tol=1e-9, abs_tol=1e-12)


def admissibility_range(data: SpectralData, mu_norm: float | None = None,
                        extrapolation_norms=(), tol: float = 1e-9) -> AdmissibilityRange:
    """``[max |data|, min(known extrapolation norms)]``, an interval containing epsilon."""
    lower = data.sup_norm()
    notes = ["lower: sup of |data| over Lambda"]
    upper = math.inf
    if mu_norm is not None:
        upper = float(mu_norm)
        notes.append(f"upper: norm of the measure itself ({upper:.12g})")
    for v in extrapolation_norms:
        if v < upper:
            upper = float(v)
            notes.append(f"upper: verified extrapolation of norm {upper:.12g}")
    if upper < lower - tol * max(1.0, lower):
        raise InconsistentInput(f"upper bound {upper} is below the lower bound {lower}")
    return AdmissibilityRange(lower, max(upper, lower), tuple(notes))


def verified_extrapolation_norm(nu: DiscreteMeasure, data: SpectralData,
                                tol: float = 1e-9) -> float:
    """Norm of ``nu`` after checking that it reproduces ``data`` on Lambda."""
    from .measures import fourier_transform, tv_norm

    got = fourier_transform(nu, data.freqs)
    err = float(np.max(np.abs(got.values - data.values)))
    if err > tol * max(1.0, data.sup_norm()):
        raise InconsistentInput(f"measure is not an extrapolation (mismatch {err:.3g})")
    return tv_norm(nu)


@dataclass(frozen=True)
class GammaSet:
    members: tuple[tuple[int, ...], ...]
    epsilon_used: float
    tolerance: float

    def __len__(self):
        return len(self.members)

    def __contains__(self, m):
        return as_frequency(m) in self.members

    def __iter__(self):
        return iter(self.members)


def default_gamma_tol(gap_tol: float = 1e-8) -> float:
    return max(GAMMA_TOL, 10 * gap_tol)


def gamma_set(data: SpectralData, epsilon: float, tol: float = GAMMA_TOL) -> GammaSet:
    """Frequencies where ``|data|`` equals epsilon (relative tolerance ``tol``)."""
    thresh = tol * max(epsilon, 1e-300)
    members = tuple(m for m, v in zip(data.freqs, data.values)
                    if abs(abs(v) - epsilon) <= thresh)
    return GammaSet(members, float(epsilon), float(tol))


def pair_offset(m, n, data: SpectralData) -> float:
    """``alpha`` in [0, 1) with ``exp(2 pi i alpha) = data(m) / data(n)``."""
    a, b = data[m], data[n]
    if b == 0:
        raise ZeroDivisionError(f"data vanishes at {n}")
    if as_frequency(m) == as_frequency(n):
        return 0.0
    alpha = (np.angle(a / b) / (2 * np.pi)) % 1.0
    return 0.0 if alpha >= 1.0 - 1e-15 else float(alpha)


# ---------------------------------------------------------------------------
# support structures


class Tag(str, enum.Enum):
    POINTS = "points"
    HYPERPLANES = "hyperplanes"
    LATTICE = "lattice"
    WHOLE_TORUS = "whole_torus"
    UNKNOWN = "unknown"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class Hyperplane:
    """The family ``{x : x . difference + offset in Z}``."""

    difference: tuple[int, ...]
    offset: float

    def residual(self, x) -> float:
        t = float(np.dot(np.asarray(x, dtype=float), self.difference)) + self.offset
        return abs(t - round(t))


@dataclass(frozen=True)
class ReducedConstraint:
    """Parallel hyperplane families merged: ``x . direction mod 1`` lies in ``values``."""

    direction: tuple[int, ...]
    values: tuple[float, ...]


@dataclass(frozen=True)
class HyperplaneFamily:
    planes: tuple[Hyperplane, ...]
    reduced: tuple[ReducedConstraint, ...] = ()

    def contains(self, x, tol: float = 1e-9) -> bool:
        return all(h.residual(x) <= tol for h in self.planes)


@dataclass(frozen=True)
class Lattice:
    """``{x : P x + beta in Z^d}``, generated by ``base_point`` and the columns ``q_k``."""

    P: tuple[tuple[int, ...], ...]
    beta: tuple[Fraction, ...]
    base_point: tuple[Fraction, ...]
    generators: tuple[tuple[Fraction, ...], ...]
    beta_error: float = 0.0

    @property
    def d(self) -> int:
        return len(self.P)

    def contains(self, x) -> bool:
        """Exact membership for rational ``x``; floats are compared within 1e-9."""
        if all(isinstance(v, (Fraction, int)) for v in x):
            for row, b in zip(self.P, self.beta):
                s = sum(Fraction(p) * Fraction(v) for p, v in zip(row, x)) + b
                if s.denominator != 1:
                    return False
            return True
        r = np.asarray(self.P, float) @ np.asarray(x, float) + np.asarray(self.beta, float)
        return bool(np.all(np.abs(r - np.round(r)) <= 1e-9))

    def points_in_unit_cube(self) -> list[tuple[Fraction, ...]]:
        """All lattice points in ``[0, 1)^d``; there are ``|det P|`` of them."""
        det = abs(_int_det(self.P))
        gens = self.generators
        seen = set()
        # the residues of k mod det cover every coset
        for k in itertools.product(range(det), repeat=self.d):
            x = tuple((x0 + sum(kj * q[i] for kj, q in zip(k, gens))) % 1
                      for i, x0 in enumerate(self.base_point))
            seen.add(x)
        return sorted(seen)


@dataclass(frozen=True)
class SupportStructure:
    tag: Tag
    points: tuple[TorusPoint, ...] = ()
    hyperplanes: HyperplaneFamily | None = None
    lattice: Lattice | None = None
    reason: str = ""
    gamma: tuple[tuple[int, ...], ...] = field(default=())

    def contains(self, x, tol: float = 1e-7) -> bool:
        """Whether ``x`` is allowed by the structure (``True`` when nothing is known)."""
        if self.tag == Tag.POINTS:
            x = np.asarray(TorusPoint(x).coords)
            return any(np.all(torus_distance(x, p.coords) <= tol) for p in self.points)
        if self.tag in (Tag.HYPERPLANES, Tag.LATTICE):
            return self.hyperplanes.contains(x, tol)
        return True


def _primitive(v: np.ndarray) -> tuple[tuple[int, ...], int]:
    """``v = k * p`` with ``p`` primitive and its first nonzero entry positive."""
    g = 0
    for c in v:
        g = math.gcd(g, int(c))
    p = v // g
    first = p[np.flatnonzero(p)[0]]
    sign = 1 if first > 0 else -1
    return tuple(int(c) for c in sign * p), int(sign * g)


def _allowed_values(k: int, alpha: float) -> list[float]:
    """Solutions ``t`` in [0, 1) of ``k t + alpha in Z``."""
    k_abs = abs(k)
    base = (-alpha / k) % 1.0
    return sorted({round((base + j / k_abs) % 1.0, 15) % 1.0 for j in range(k_abs)})


def _intersect(a: list[float], b: list[float], tol: float = 1e-9) -> list[float]:
    return [x for x in a if any(min(abs(x - y), 1 - abs(x - y)) <= tol for y in b)]


def hyperplane_family(gamma: GammaSet, data: SpectralData) -> HyperplaneFamily:
    members = list(gamma.members)
    planes = []
    for m, n in itertools.combinations(members, 2):
        diff = tuple(int(a - b) for a, b in zip(m, n))
        planes.append(Hyperplane(diff, pair_offset(m, n, data)))
    classes: dict[tuple, list[float] | None] = {}
    for h in planes:
        p, k = _primitive(np.asarray(h.difference))
        vals = _allowed_values(k, h.offset)
        classes[p] = vals if p not in classes else _intersect(classes[p], vals)
    reduced = tuple(ReducedConstraint(p, tuple(v)) for p, v in classes.items())
    return HyperplaneFamily(tuple(planes), reduced)


def support_structure(gamma: GammaSet, data: SpectralData, d: int | None = None) -> SupportStructure:
    """Classify the support of all minimal extrapolations from Gamma alone.

    ``#Gamma = 0`` defers to the zero set of a certificate (``ANALYTIC``),
    ``#Gamma = 1`` is genuinely undetermined (``UNKNOWN``), and two or more
    members give points (d = 1), hyperplanes, or a lattice.
    """
    d = d or data.d
    g = len(gamma)
    if g == 0:
        return SupportStructure(Tag.ANALYTIC, reason="Gamma is empty: support lies in the "
                                "zero set of the deficit polynomial of a certificate")
    if g == 1:
        return SupportStructure(Tag.UNKNOWN, reason="#Gamma = 1: minimal extrapolations "
                                "can be discrete or absolutely continuous", gamma=gamma.members)
    fam = hyperplane_family(gamma, data)
    if d == 1:
        values = fam.reduced[0].values if fam.reduced else ()
        pts = tuple(TorusPoint(v) for v in values)
        return SupportStructure(Tag.POINTS, points=pts, hyperplanes=fam, gamma=gamma.members)
    independent = _independent_planes(fam.planes, d)
    if independent is not None:
        lat = lattice_from_planes(independent)
        return SupportStructure(Tag.LATTICE, hyperplanes=fam, lattice=lat, gamma=gamma.members)
    return SupportStructure(Tag.HYPERPLANES, hyperplanes=fam, gamma=gamma.members)


def _independent_planes(planes, d):
    chosen = []
    for h in planes:
        trial = chosen + [h]
        if np.linalg.matrix_rank(np.array([p.difference for p in trial], float)) == len(trial):
            chosen = trial
            if len(chosen) == d:
                return chosen
    return None


def lattice_from_planes(planes) -> Lattice:
    betas, err = [], 0.0
    for h in planes:
        fr = Fraction(h.offset).limit_denominator(RATIONAL_DENOMINATOR_CAP)
        err = max(err, abs(float(fr) - h.offset))
        betas.append(fr)
    lat = lattice_solve([h.difference for h in planes], betas)
    return Lattice(lat.P, lat.beta, lat.base_point, lat.generators, err)


def _int_det(P) -> int:
    import sympy

    return int(sympy.Matrix(P).det())


def lattice_solve(differences, offsets) -> Lattice:
    """Exact rational solve of ``P q_k = e_k`` and ``P x0 + beta = 0``.

    ``differences`` are the rows ``p_j`` of the integer matrix ``P``; ``offsets``
    are the ``beta_j`` (anything ``Fraction`` accepts).  The base point is
    reduced into ``[0, 1)^d``.
    """
    import sympy

    P = sympy.Matrix([[int(v) for v in row] for row in differences])
    d = P.shape[0]
    if P.shape != (d, d):
        raise ValueError("need d difference vectors in Z^d")
    rank = P.rank()
    if rank < d:
        raise np.linalg.LinAlgError(f"difference vectors are dependent (rank {rank} < {d})")
    beta = [Fraction(b) for b in offsets]
    Pinv = P.inv()
    to_frac = lambda r: Fraction(int(r.p), int(r.q))  # noqa: E731
    gens = tuple(tuple(to_frac(Pinv[i, k]) for i in range(d)) for k in range(d))
    x0 = []
    for i in range(d):
        s = -sum(to_frac(Pinv[i, j]) * beta[j] for j in range(d))
        x0.append(s % 1)
    for j in range(d):
        for k in range(d):
            dot = sum(int(P[j, i]) * gens[k][i] for i in range(d))
            assert dot == (1 if j == k else 0)
    return Lattice(tuple(tuple(int(v) for v in P.row(j)) for j in range(d)),
                   tuple(beta), tuple(x0), gens)


# ---------------------------------------------------------------------------
# separation and the known recovery guarantees


def minimum_separation(mu: DiscreteMeasure) -> float:
    if len(mu) < 2:
        return math.inf
    p = mu.points
    best = math.inf
    for i in range(len(p)):
        dist = np.max(torus_distance(p[i + 1:], p[i]), axis=1) if i + 1 < len(p) else []
        if len(dist):
            best = min(best, float(np.min(dist)))
    return best


def separation_check(mu: DiscreteMeasure, M: int, C: float) -> bool:
    if M < 1 or C <= 0:
        raise ValueError("need M >= 1 and C > 0")
    return minimum_separation(mu) >= C / M


class Guarantee(str, enum.Enum):
    D1_C2 = "d1_M128_C2"
    D1_REAL_C187 = "d1_real_M128_C1.87"
    D1_C126 = "d1_M1000_C1.26"
    D2_REAL_C238 = "d2_real_M512_C2.38"
    NONE = "none"


def separation_guarantee(mu: DiscreteMeasure, M: int, d: int | None = None,
                         real_valued: bool | None = None) -> Guarantee:
    """Which minimum-separation recovery guarantee, if any, covers ``mu`` with cutoff ``M``.

    Lambda is understood to be ``{-M, ..., M}^d``.  Pure predicate: nothing is
    solved.
    """
    d = d or mu.d
    if real_valued is None:
        real_valued = bool(np.all(np.abs(mu.weights.imag) <= 1e-12))
    sep = lambda C: separation_check(mu, M, C)  # noqa: E731
    if d == 1:
        if M >= 128 and sep(2.0):
            return Guarantee.D1_C2
        if M >= 128 and real_valued and sep(1.87):
            return Guarantee.D1_REAL_C187
        if M >= 1000 and sep(1.26):
            return Guarantee.D1_C126
    elif d == 2 and real_valued and M >= 512 and sep(2.38):
        return Guarantee.D2_REAL_C238
    return Guarantee.NONE


def algorithm_failure_diagnosis(phi_degenerate: bool, data: SpectralData,
                                tol: float = GAMMA_TOL) -> tuple[float, GammaSet]:
    """A unimodular optimal certificate forces ``epsilon = max |data|``, Gamma nonempty."""
    if not phi_degenerate:
        raise ValueError("only applicable when the certificate is degenerate")
    eps = data.sup_norm()
    gamma = gamma_set(data, eps, tol)
    if len(gamma) == 0:
        raise RuntimeError("internal contradiction: Gamma empty at epsilon = max |data|")
    return eps, gamma


# ---------------------------------------------------------------------------
# JSON


def structure_to_json(s: SupportStructure) -> dict:
    out: dict = {"tag": s.tag.value, "gamma": [list(m) for m in s.gamma]}
    if s.reason:
        out["reason"] = s.reason
    if s.tag == Tag.POINTS:
        out["points"] = [list(p.coords) for p in s.points]
    if s.hyperplanes is not None:
        out["hyperplanes"] = [{"difference": list(h.difference), "offset": h.offset}
                              for h in s.hyperplanes.planes]
        out["reduced"] = [{"direction": list(r.direction), "values": list(r.values)}
                          for r in s.hyperplanes.reduced]
    if s.lattice is not None:
        lat = s.lattice
        out["lattice"] = {
            "P": [list(r) for r in lat.P],
            "beta": [str(b) for b in lat.beta],
            "base_point": [str(v) for v in lat.base_point],
            "generators": [[str(v) for v in q] for q in lat.generators],
            "beta_error": lat.beta_error,
        }
    return out
