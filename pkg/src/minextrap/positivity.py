"""Positive-definite extension of the data around a center frequency (d = 1).

If ``m -> mu_hat(n + m)`` extends to a positive-definite sequence, it is the
coefficient sequence of a positive measure ``nu`` and ``M_n nu`` is a minimal
extrapolation of norm ``|mu_hat(n)|``.  For a contiguous window that is the
Caratheodory-Toeplitz criterion: the Hermitian Toeplitz matrix of the
moments must be positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .measures import (
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    TrigPolynomial,
    fourier_transform,
    modulate,
    tv_norm,
)
from .uniqueness import build_E

PSD_TOL = 1e-10
NNLS_GRID = 512


class WindowError(ValueError):
    pass


class NotExtendable(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ToeplitzWindow:
    center: int
    half_width: int
    moments: np.ndarray
    reflected: tuple[int, ...] = ()

    def matrix(self, size: int | None = None) -> np.ndarray:
        n = self.half_width + 1 if size is None else size
        t = self.moments[:n]
        return scipy.linalg.toeplitz(t, np.conj(t))


def toeplitz_window(data: SpectralData, n: int, M: int, tol: float = 1e-9) -> ToeplitzWindow:
    """Moments ``t_k = data(n + k)``, or ``conj(data(n - k))`` where only that is given."""
    if data.d != 1:
        raise WindowError("unsupported dimension: positive-definite windows are 1-d only")
    if M < 0:
        raise WindowError("half width must be nonnegative")
    scale = max(1.0, data.sup_norm())
    t = np.zeros(M + 1, dtype=complex)
    reflected = []
    for k in range(M + 1):
        fwd, back = (n + k,), (n - k,)
        have_f, have_b = fwd in data.freqs, back in data.freqs
        if not (have_f or have_b):
            raise WindowError(f"neither {n + k} nor {n - k} is in Lambda: window not contiguous")
        if k and have_f and have_b and abs(data[back] - np.conj(data[fwd])) > tol * scale:
            raise WindowError(f"data at {n - k} and {n + k} are not Hermitian-consistent")
        if have_f:
            t[k] = data[fwd]
        else:
            t[k] = np.conj(data[back])
            reflected.append(k)
    if abs(t[0].imag) > tol * scale:
        raise WindowError(f"central moment data({n}) is not real")
    t[0] = t[0].real
    return ToeplitzWindow(n, M, t, tuple(reflected))


def is_pd_extendable(window: ToeplitzWindow, tol: float = PSD_TOL) -> bool:
    T = window.matrix()
    lam = np.linalg.eigvalsh(T)
    return bool(lam[0] >= -tol * max(1.0, np.linalg.norm(T, 2)))


def completion_disk(moments: np.ndarray) -> tuple[complex, float]:
    """Center and radius of the set of ``t_{M+1}`` keeping the bordered matrix PSD.

    Requires the current Toeplitz matrix to be positive definite.
    """
    t = np.asarray(moments, dtype=complex)
    M = t.size - 1
    T = scipy.linalg.toeplitz(t, np.conj(t))
    G = np.linalg.inv(T)
    # last column of the bordered matrix is (conj t_{M+1}, conj t_M, ..., conj t_1)
    w0 = np.concatenate([[0], np.conj(t[1:][::-1])]) if M > 0 else np.zeros(1, complex)
    Gw = G @ w0
    xc = -Gw[0] / G[0, 0].real
    r2 = (t[0].real - np.real(np.vdot(w0, Gw))) / G[0, 0].real + abs(xc) ** 2
    return complex(np.conj(xc)), float(np.sqrt(max(r2, 0.0)))


def _atoms_from_null(t: np.ndarray) -> tuple[DiscreteMeasure, float]:
    T = scipy.linalg.toeplitz(t, np.conj(t))
    _, vecs = np.linalg.eigh(T)
    g = vecs[:, 0]
    # atoms are the roots of sum_k g_k z^k
    roots = np.roots(g[::-1])
    xs = np.mod(np.angle(roots) / (2 * np.pi), 1.0)
    E = build_E(_freqs(len(t) - 1), xs)
    w, *_ = np.linalg.lstsq(E.matrix, t, rcond=None)
    return DiscreteMeasure(xs, w.real, d=1), float(np.max(np.abs(np.abs(roots) - 1)))


def _freqs(M: int) -> FrequencySet:
    return FrequencySet(np.arange(0, M + 1))


def _nnls_atoms(t: np.ndarray, grid: int = NNLS_GRID) -> tuple[DiscreteMeasure, float]:
    xs = np.arange(grid) / grid
    E = build_E(_freqs(len(t) - 1), xs).matrix
    A = np.vstack([E.real, E.imag])
    b = np.concatenate([t.real, t.imag])
    w, res = scipy.optimize.nnls(A, b)
    return DiscreteMeasure(xs, w, d=1), float(res)


def caratheodory_atoms(window: ToeplitzWindow, tol: float = 1e-7) -> DiscreteMeasure:
    """A positive measure with at most ``M + 1`` atoms matching the window moments.

    The first singular leading Toeplitz block, or the matrix bordered with an
    extreme completion value when none is singular, has a null vector whose
    polynomial roots lie on the unit circle; those give the atoms and a
    Vandermonde solve gives the weights.
    """
    if not is_pd_extendable(window):
        raise NotExtendable("Toeplitz matrix is not positive semidefinite")
    t = window.moments
    scale = max(1.0, abs(t[0]))
    if abs(t[0]) <= tol * scale:
        return DiscreteMeasure.empty(1)
    M = window.half_width
    # smallest singular leading block
    for r in range(1, M + 1):
        T = scipy.linalg.toeplitz(t[: r + 1], np.conj(t[: r + 1]))
        if np.linalg.eigvalsh(T)[0] <= 1e-12 * np.linalg.norm(T, 2):
            moments = t[: r + 1]
            break
    else:
        center, radius = completion_disk(t)
        moments = np.concatenate([t, [center + radius]])
    try:
        nu, off_circle = _atoms_from_null(moments)
    except np.linalg.LinAlgError:
        nu, off_circle = None, np.inf
    if nu is None or off_circle > 1e-6 or _moment_residual(nu, t) > tol * scale \
            or np.any(nu.weights.real < -tol * scale):
        nu, res = _nnls_atoms(t)
        if res > 1e-6 * scale:
            raise NotExtendable(f"no atomic representation found (residual {res:.3g})")
        return nu
    w = np.clip(nu.weights.real, 0.0, None)
    return DiscreteMeasure(nu.points, w, d=1)


def _moment_residual(nu: DiscreteMeasure, t: np.ndarray) -> float:
    got = fourier_transform(nu, _freqs(len(t) - 1)).values
    return float(np.max(np.abs(got - t)))


def positive_minimal_extrapolation(data: SpectralData, n: int, M: int,
                                   tol: float = 1e-7) -> DiscreteMeasure:
    """``M_n nu`` for the Caratheodory measure ``nu`` of the window at ``n``.

    The result is checked against all of Lambda, not only the window.
    """
    window = toeplitz_window(data, n, M)
    if not is_pd_extendable(window):
        raise NotExtendable(f"window at n={n}, M={M} is not positive semidefinite")
    nu = caratheodory_atoms(window, tol)
    out = modulate(nu, n)
    scale = max(1.0, data.sup_norm())
    got = fourier_transform(out, data.freqs)
    if np.max(np.abs(got.values - data.values)) > tol * scale:
        raise NotExtendable("window extension inconsistent with full data")
    if abs(tv_norm(out) - abs(data[(n,)])) > tol * scale:
        raise NotExtendable("extension norm differs from |data(n)|")
    return out


def hull_is_contiguous(data: SpectralData, n: int) -> bool:
    """Whether ``Lambda - n`` together with its reflection is an interval around 0."""
    ks = {abs(m[0] - n) for m in data.freqs}
    return ks == set(range(max(ks) + 1))


@dataclass(frozen=True)
class FejerFamilyParams:
    N: int
    c: float

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not 0 < self.c <= (2 * self.N + 2) / (3 * self.N + 1) * (1 + 1e-15):
            raise ValueError(f"c must lie in (0, (2N+2)/(3N+1)] for N={self.N}")


def fejer_kernel(N: int) -> TrigPolynomial:
    m = np.arange(-N, N + 1)
    return TrigPolynomial(m, 1 - np.abs(m) / (N + 1))


def fejer_family(params: FejerFamilyParams) -> TrigPolynomial:
    """Density ``2 + c * sum_{2<=|m|<=N} (1 - |m|/(N+1)) e(m x)``.

    Dominates ``c`` times the Fejer kernel, hence is nonnegative, integrates
    to 2 and has vanishing coefficients at ``m = +-1``.
    """
    N, c = params.N, params.c
    m = np.arange(-N, N + 1)
    coef = np.where(np.abs(m) >= 2, c * (1 - np.abs(m) / (N + 1)), 0.0)
    coef[m == 0] = 2.0
    return TrigPolynomial(m, coef)
