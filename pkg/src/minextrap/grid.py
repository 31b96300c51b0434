"""Grid discretization of the minimal-extrapolation problem.

Restricting candidate measures to the uniform grid ``{k/N}^d`` turns the
total-variation problem into complex basis pursuit::

    minimize ||y||_1  subject to  A y = b,    A[m, k] = exp(-2 pi i m . k/N)

which is solved here with Douglas-Rachford splitting (complex soft
thresholding for the l1 term, exact projection for the affine constraint).
The iteration also yields a dual vector ``u`` with ``||A^* u||_inf <= 1``,
whose entries are the coefficients of a trigonometric polynomial bounded by
one on the grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .measures import (
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    TWO_PI_I,
    grid_points,
)

log = logging.getLogger(__name__)


class AliasingError(ValueError):
    """Two frequencies coincide modulo the grid size."""


@dataclass(frozen=True)
class GridSpec:
    n_per_axis: int
    d: int = 1

    def __post_init__(self):
        if self.n_per_axis < 1 or self.d < 1:
            raise ValueError("grid needs N >= 1 and d >= 1")

    @property
    def size(self) -> int:
        return self.n_per_axis ** self.d

    def points(self) -> np.ndarray:
        return grid_points(self.n_per_axis, self.d)


@dataclass(frozen=True, eq=False)
class ForwardMatrix:
    freqs: FrequencySet
    grid: GridSpec
    matrix: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200_000
    step: float = 10.0
    relaxation: float = 1.0
    feas_tol: float = 1e-9
    gap_tol: float = 1e-8
    check_every: int = 10
    power_iterations: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.feas_tol <= 0 or self.gap_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.step <= 0 or not 0 < self.relaxation < 2:
            raise ValueError("step must be positive and relaxation in (0, 2)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class SolveReport:
    epsilon_grid: float
    primal_weights: np.ndarray
    dual_vector: np.ndarray
    iterations: int
    feasibility_residual: float
    duality_gap: float
    lower_bound: float
    converged: bool
    grid: GridSpec | None = None
    freqs: FrequencySet | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "epsilon": float(self.epsilon_grid),
            "lower_bound": float(self.lower_bound),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "feasibility_residual": float(self.feasibility_residual),
            "duality_gap": float(self.duality_gap),
            "grid": None if self.grid is None else {
                "n_per_axis": self.grid.n_per_axis, "d": self.grid.d},
            "primal": [[float(v.real), float(v.imag)] for v in self.primal_weights],
            "dual": [[float(v.real), float(v.imag)] for v in self.dual_vector],
        }


def build_forward_matrix(freqs: FrequencySet, grid: GridSpec) -> ForwardMatrix:
    if freqs.d != grid.d:
        raise ValueError(f"frequencies are {freqs.d}-dimensional, grid is {grid.d}-dimensional")
    seen: dict[tuple, tuple] = {}
    for m in freqs:
        key = tuple(v % grid.n_per_axis for v in m)
        if key in seen:
            raise AliasingError(
                f"frequencies {seen[key]} and {m} coincide modulo N={grid.n_per_axis}")
        seen[key] = m
    # integer phases first, so entries are exact roots of unity up to rounding
    k = np.rint(grid.points() * grid.n_per_axis).astype(np.int64)
    phase = np.mod(freqs.elements @ k.T, grid.n_per_axis) / grid.n_per_axis
    return ForwardMatrix(freqs, grid, np.exp(-TWO_PI_I * phase))


def soft_threshold(z: np.ndarray, t: float) -> np.ndarray:
    """Complex soft thresholding, the proximal map of ``t * ||.||_1``."""
    mag = np.abs(z)
    scale = np.maximum(1.0 - t / np.maximum(mag, 1e-300), 0.0)
    return z * scale


def operator_norm(A: np.ndarray, iterations: int = 20, seed: int = 0) -> float:
    """Largest singular value of ``A`` by power iteration on ``A^* A``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iterations):
        w = A.conj().T @ (A @ v)
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    return float(np.sqrt(s))


def basis_pursuit(A: ForwardMatrix, b: SpectralData,
                  opts: SolverOptions = SolverOptions()) -> SolveReport:
    """Minimize ``||y||_1`` subject to ``A y = b`` over complex ``y``.

    Returns the best feasible iterate together with a dual-feasible vector
    ``u`` (``||A^* u||_inf <= 1``).  ``Re <u, b>`` is a certified lower bound on
    the optimal value and ``||y||_1`` an upper bound; their difference is the
    reported duality gap.
    """
    if b.freqs != A.freqs:
        raise ValueError("data must be indexed by the rows of the forward matrix")
    M = A.matrix
    rhs = np.array([b[m] for m in A.freqs], dtype=complex)
    J, K = M.shape
    bnorm = float(np.max(np.abs(rhs)))
    if bnorm == 0.0:
        return SolveReport(0.0, np.zeros(K, complex), np.zeros(J, complex), 0,
                           0.0, 0.0, 0.0, True, A.grid, A.freqs)

    # Gram matrix A A^*; a multiple of the identity for alias-free grids
    chol = scipy.linalg.cho_factor(M @ M.conj().T)
    sigma = operator_norm(M, opts.power_iterations, opts.seed)
    MH = M.conj().T

    def project(z):
        r = M @ z - rhs
        return z - MH @ scipy.linalg.cho_solve(chol, r), r

    # step in units of the data scale per unit operator gain
    tau = opts.step * bnorm / max(sigma, 1e-300) / np.sqrt(K)
    z = MH @ scipy.linalg.cho_solve(chol, rhs)
    best = None
    upper = np.inf
    lower = -np.inf
    it = 0
    feas = np.inf
    for it in range(1, opts.max_iterations + 1):
        y, r = project(z)
        w = soft_threshold(2 * y - z, tau)
        z = z + opts.relaxation * (w - y)
        if it % opts.check_every and it != opts.max_iterations:
            continue
        y, r = project(z)
        u = -scipy.linalg.cho_solve(chol, r) / tau
        feas = float(np.linalg.norm(M @ y - rhs))
        p_val = float(np.sum(np.abs(y)))
        dual_inf = float(np.max(np.abs(MH @ u)))
        d_val = float(np.real(np.vdot(u, rhs))) / max(1.0, dual_inf)
        if feas <= opts.feas_tol and p_val < upper:
            upper, best_y = p_val, y
        y_pol = _polish(M, rhs, MH @ u, opts.feas_tol)
        if y_pol is not None:
            p_pol = float(np.sum(np.abs(y_pol)))
            if p_pol < upper:
                upper, best_y = p_pol, y_pol
        if d_val > lower:
            lower, best_u = d_val, u / max(1.0, dual_inf)
        if upper < np.inf:
            u_pol = _polish_dual(MH, best_y)
            d_pol = float(np.real(np.vdot(u_pol, rhs)))
            if d_pol > lower:
                lower, best_u = d_pol, u_pol
        if upper - lower <= opts.gap_tol * max(1.0, upper):
            best = (best_y, best_u)
            break
    converged = best is not None
    if not converged:
        log.warning("basis pursuit stopped after %d iterations (gap %.3g)",
                    it, upper - lower)
        if upper == np.inf:
            best_y = project(z)[0]
            upper = float(np.sum(np.abs(best_y)))
        best = (best_y, best_u)
    y, u = best
    return SolveReport(
        epsilon_grid=upper,
        primal_weights=y,
        dual_vector=u,
        iterations=it,
        feasibility_residual=float(np.linalg.norm(M @ y - rhs)),
        duality_gap=upper - lower,
        lower_bound=lower,
        converged=converged,
        grid=A.grid,
        freqs=A.freqs,
    )


def _polish(M, rhs, dual_image, feas_tol, levels=(1e-2, 1e-3, 1e-4, 1e-6)):
    """Least-squares fits on the supports suggested by the dual iterate.

    Any returned vector is feasible, so its l1 norm is a valid upper bound;
    once an active set is right it matches the optimum to rounding.
    """
    mag = np.abs(dual_image)
    best, best_val = None, np.inf
    tried = set()
    for level in levels:
        support = np.flatnonzero(mag >= (1 - level) * mag.max())
        key = tuple(support)
        if support.size > M.shape[0] or key in tried:
            continue
        tried.add(key)
        sol, *_ = np.linalg.lstsq(M[:, support], rhs, rcond=None)
        y = np.zeros(M.shape[1], dtype=complex)
        y[support] = sol
        val = np.sum(np.abs(sol))
        if np.linalg.norm(M @ y - rhs) <= feas_tol and val < best_val:
            best, best_val = y, val
    return best


def _polish_dual(MH, y, tol=1e-9):
    """Dual vector interpolating the phases of ``y`` on its support, rescaled
    so that ``||A^* u||_inf <= 1``; its pairing with the data is a lower bound."""
    support = np.flatnonzero(np.abs(y) > tol * max(np.max(np.abs(y)), 1e-300))
    signs = y[support] / np.abs(y[support])
    u, *_ = np.linalg.lstsq(MH[support], signs, rcond=None)
    return u / max(1.0, float(np.max(np.abs(MH @ u))))


def solve(data: SpectralData, grid: GridSpec | int,
          opts: SolverOptions = SolverOptions()) -> SolveReport:
    if isinstance(grid, int):
        grid = GridSpec(grid, data.d)
    return basis_pursuit(build_forward_matrix(data.freqs, grid), data, opts)


def solution_to_measure(report: SolveReport, grid: GridSpec | None = None,
                        prune_tol: float = 1e-6) -> DiscreteMeasure:
    grid = grid or report.grid
    y = report.primal_weights
    keep = np.abs(y) > prune_tol
    return DiscreteMeasure(grid.points()[keep], y[keep], d=grid.d)


def refine_epsilon(data: SpectralData, grids, opts: SolverOptions = SolverOptions()) -> list[float]:
    """Grid values of epsilon for a divisibility chain of grids.

    Each value is an upper bound on the continuous optimum; refining the grid
    along a divisibility chain can only lower it.
    """
    grids = [g if isinstance(g, GridSpec) else GridSpec(g, data.d) for g in grids]
    for a, b in zip(grids, grids[1:]):
        if b.n_per_axis % a.n_per_axis:
            raise ValueError("grids must form a divisibility chain")
    return [solve(data, g, opts).epsilon_grid for g in grids]
