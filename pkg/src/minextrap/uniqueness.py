"""Uniqueness from a finite candidate support.

If every minimal extrapolation lives on ``{x_1, ..., x_K}`` and the matrix
``E[j, k] = exp(-2 pi i m_j . x_k)`` has full column rank, the minimal
extrapolation is unique and its weights solve ``E a = data``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .measures import DiscreteMeasure, FrequencySet, SpectralData, TWO_PI_I, measure_to_json, tv_norm
from .structure import SupportStructure, Tag

RANK_TOL = 1e-8
RESIDUAL_TOL = 1e-7


class RankDeficient(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class ExponentialMatrix:
    freqs: FrequencySet
    points: np.ndarray
    matrix: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape


def build_E(freqs: FrequencySet, points) -> ExponentialMatrix:
    pts = np.asarray([np.atleast_1d(np.asarray(getattr(p, "coords", p), float)) for p in points])
    if pts.size == 0:
        raise ValueError("need at least one point")
    if pts.shape[1] != freqs.d:
        raise ValueError("point and frequency dimensions differ")
    # unimodular by construction
    E = np.exp(-TWO_PI_I * (freqs.elements @ pts.T))
    return ExponentialMatrix(freqs, pts, E)


def has_full_column_rank(E: ExponentialMatrix, rank_tol: float = RANK_TOL) -> bool:
    J, K = E.shape
    if J < K:
        return False
    s = np.linalg.svd(E.matrix, compute_uv=False)
    return bool(s[K - 1] > rank_tol * s[0])


def recover_amplitudes(E: ExponentialMatrix, data: SpectralData,
                       rank_tol: float = RANK_TOL) -> tuple[np.ndarray, float]:
    """Least-squares weights for ``E a = data`` (QR based) and the residual 2-norm."""
    if not has_full_column_rank(E, rank_tol):
        raise RankDeficient("E does not have full column rank")
    b = np.array([data[m] for m in E.freqs], dtype=complex)
    Q, R = scipy.linalg.qr(E.matrix, mode="economic")
    a = scipy.linalg.solve_triangular(R, Q.conj().T @ b)
    residual = float(np.linalg.norm(E.matrix @ a - b))
    return a, residual


class Verdict(str, enum.Enum):
    UNIQUE = "UNIQUE"
    INCONCLUSIVE = "INCONCLUSIVE"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True, eq=False)
class UniquenessResult:
    verdict: Verdict
    measure: DiscreteMeasure | None = None
    residual: float | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "measure": None if self.measure is None else measure_to_json(self.measure),
            "residual": self.residual,
            "reason": self.reason,
        }


def uniqueness_verdict(structure: SupportStructure, freqs: FrequencySet, data: SpectralData,
                       rank_tol: float = RANK_TOL, residual_tol: float = RESIDUAL_TOL,
                       epsilon: float | None = None) -> UniquenessResult:
    """UNIQUE when the finite support gives a full-rank, consistent system.

    Rank failure or a large residual only yields INCONCLUSIVE; nothing here
    proves non-uniqueness.  Non-finite structures are NOT_APPLICABLE.
    """
    if structure.tag != Tag.POINTS:
        return UniquenessResult(Verdict.NOT_APPLICABLE,
                                reason=f"support structure is {structure.tag.value}, not finite")
    if not structure.points:
        return UniquenessResult(Verdict.INCONCLUSIVE, reason="empty support set")
    E = build_E(freqs, structure.points)
    if not has_full_column_rank(E, rank_tol):
        return UniquenessResult(Verdict.INCONCLUSIVE, reason="E is rank deficient")
    a, res = recover_amplitudes(E, data, rank_tol)
    scale = max(1.0, data.sup_norm())
    if res > residual_tol * scale:
        return UniquenessResult(Verdict.INCONCLUSIVE, residual=res,
                                reason="support set inconsistent with data")
    nu = DiscreteMeasure(E.points, a, d=freqs.d)
    if epsilon is not None and abs(tv_norm(nu) - epsilon) > 1e-6 * max(1.0, epsilon):
        return UniquenessResult(Verdict.INCONCLUSIVE, nu, res,
                                reason=f"recovered norm {tv_norm(nu):.9g} differs from epsilon")
    return UniquenessResult(Verdict.UNIQUE, nu, res)
