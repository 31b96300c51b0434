"""Torus points, frequency sets, discrete measures and trigonometric polynomials.

Everything here is an immutable value.  Arrays held by the containers are
marked read-only on construction, and every operator returns a new object.

Conventions
-----------
* Fourier transform: ``mu_hat(m) = sum_k a_k exp(-2 pi i m . x_k)``.
* Trigonometric polynomial: ``f(x) = sum_m c_m exp(2 pi i m . x)``.
* Pairing: ``<f, mu> = sum_k f(x_k) conj(a_k)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

POINT_TOL = 1e-9
WEIGHT_TOL = 1e-12

TWO_PI_I = 2j * np.pi


class DimensionError(ValueError):
    """Objects living on tori of different dimension were combined."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def wrap(x):
    """Reduce coordinates into [0, 1)."""
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    # np.mod can return exactly 1.0 for tiny negative inputs
    return np.where(x >= 1.0, 0.0, x)


def torus_distance(a, b) -> np.ndarray:
    """Per-coordinate wraparound distance ``min(|a-b|, 1-|a-b|)``."""
    d = np.abs(wrap(a) - wrap(b))
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[float, ...]

    def __init__(self, coords):
        if np.isscalar(coords):
            coords = (coords,)
        c = wrap(np.asarray(coords, dtype=float).ravel())
        if c.size == 0:
            raise ValueError("a torus point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(float(v) for v in c))

    @property
    def d(self) -> int:
        return len(self.coords)

    def close_to(self, other: "TorusPoint", tol: float = POINT_TOL) -> bool:
        if other.d != self.d:
            raise DimensionError(f"dimension {self.d} vs {other.d}")
        return bool(np.all(torus_distance(self.coords, other.coords) <= tol))

    def __eq__(self, other):
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return other.d == self.d and self.close_to(other)

    # tolerance-based equality cannot be hashed consistently
    __hash__ = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


Frequency = tuple  # tuple[int, ...]


def as_frequency(m, d: int | None = None) -> tuple[int, ...]:
    if np.isscalar(m):
        m = (m,)
    out = tuple(int(v) for v in m)
    if d is not None and len(out) != d:
        raise DimensionError(f"frequency {out} is not {d}-dimensional")
    return out


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """A finite, ordered set of distinct integer frequencies in Z^d."""

    elements: np.ndarray
    _index: dict = field(repr=False, compare=False)

    def __init__(self, elements, d: int | None = None):
        arr = np.asarray(elements)
        if arr.ndim == 1:
            if d is not None and d > 1:
                arr = arr.reshape(1, -1) if arr.size == d else arr.reshape(-1, d)
            else:
                arr = arr.reshape(-1, 1)
        if arr.size == 0:
            raise ValueError("frequency set must be nonempty")
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("frequencies must be integers")
        arr = arr.astype(np.int64)
        if d is not None and arr.shape[1] != d:
            raise DimensionError(f"expected dimension {d}, got {arr.shape[1]}")
        index = {}
        for i, row in enumerate(arr):
            key = tuple(int(v) for v in row)
            if key in index:
                raise ValueError(f"duplicate frequency {key}")
            index[key] = i
        object.__setattr__(self, "elements", _frozen(arr))
        object.__setattr__(self, "_index", index)

    @classmethod
    def box(cls, lo: int, hi: int, d: int = 1) -> "FrequencySet":
        """All of ``{lo, ..., hi}^d`` in lexicographic order."""
        axes = [np.arange(lo, hi + 1)] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        return cls(grid, d=d)

    @property
    def d(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self._index)

    def __contains__(self, m) -> bool:
        return as_frequency(m) in self._index

    def index(self, m) -> int:
        return self._index[as_frequency(m)]

    def tolist(self) -> list[tuple[int, ...]]:
        return list(self._index)

    def shift(self, n) -> "FrequencySet":
        n = np.asarray(as_frequency(n, self.d))
        return FrequencySet(self.elements + n, d=self.d)

    def differences(self) -> "FrequencySet":
        """The difference set ``{m - n : m, n in self}`` (sorted)."""
        diff = self.elements[:, None, :] - self.elements[None, :, :]
        uniq = np.unique(diff.reshape(-1, self.d), axis=0)
        return FrequencySet(uniq, d=self.d)

    def max_abs(self) -> int:
        return int(np.max(np.abs(self.elements)))

    def __eq__(self, other):
        if not isinstance(other, FrequencySet):
            return NotImplemented
        return self.d == other.d and set(self._index) == set(other._index)

    __hash__ = None

    def __repr__(self):
        if self.d == 1:
            return f"FrequencySet({[m[0] for m in self._index]})"
        return f"FrequencySet({self.tolist()})"


def _check_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A finite sum of weighted Dirac masses on the torus T^d.

    Atoms closer than ``POINT_TOL`` (wraparound distance) are merged by adding
    their weights, and atoms with ``|weight| < WEIGHT_TOL`` are dropped.
    """

    points: np.ndarray
    weights: np.ndarray

    def __init__(self, points, weights, d: int | None = None):
        w = np.atleast_1d(np.asarray(weights, dtype=complex)).ravel()
        p = np.asarray(points, dtype=float)
        if p.size == 0:
            if d is None:
                raise ValueError("dimension required for an empty measure")
            p = np.zeros((0, d))
            w = np.zeros(0, dtype=complex)
        elif p.ndim == 1:
            p = p.reshape(-1, 1) if (d in (None, 1)) else p.reshape(-1, d)
        if d is not None:
            _check_dim(p.shape[1], d)
        if p.shape[0] != w.shape[0]:
            raise ValueError("one weight per atom required")
        p, w = _merge_atoms(wrap(p), w)
        object.__setattr__(self, "points", _frozen(p))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def empty(cls, d: int = 1) -> "DiscreteMeasure":
        return cls(np.zeros((0, d)), [], d=d)

    @classmethod
    def dirac(cls, x, weight: complex = 1.0) -> "DiscreteMeasure":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls(x.reshape(1, -1), [weight], d=x.size)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple], d: int | None = None) -> "DiscreteMeasure":
        atoms = list(atoms)
        if not atoms:
            return cls.empty(d or 1)
        pts = [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in atoms]
        return cls(np.stack(pts), [w for _, w in atoms], d=d)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def atoms(self) -> list[tuple[TorusPoint, complex]]:
        return [(TorusPoint(p), complex(w)) for p, w in zip(self.points, self.weights)]

    def scale(self, c: complex) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, c * self.weights, d=self.d)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        _check_dim(self.d, other.d)
        return DiscreteMeasure(
            np.vstack([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
            d=self.d,
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def sorted(self) -> "DiscreteMeasure":
        order = np.lexsort(self.points.T[::-1]) if len(self) else []
        return DiscreteMeasure(self.points[order], self.weights[order], d=self.d)

    def is_close(self, other: "DiscreteMeasure", tol: float = 1e-9,
                 point_tol: float | None = None) -> bool:
        """Weights agree within ``tol`` after matching atoms within ``point_tol``."""
        if self.d != other.d:
            return False
        point_tol = max(tol, POINT_TOL) if point_tol is None else point_tol
        used = np.zeros(len(other), dtype=bool)
        for p, w in zip(self.points, self.weights):
            if len(other):
                dist = np.max(torus_distance(other.points, p), axis=1)
                j = int(np.argmin(np.where(used, np.inf, dist)))
                if not used[j] and dist[j] <= point_tol:
                    used[j] = True
                    if abs(other.weights[j] - w) > tol:
                        return False
                    continue
            if abs(w) > tol:
                return False
        return bool(np.all(np.abs(other.weights[~used]) <= tol))

    def __repr__(self):
        body = ", ".join(
            f"{_fmt_complex(w)}@{tuple(round(float(c), 6) for c in p)}"
            for p, w in zip(self.points, self.weights)
        )
        return f"DiscreteMeasure(d={self.d}, [{body}])"


def _fmt_complex(w: complex) -> str:
    w = complex(w)
    if abs(w.imag) < 1e-12:
        return f"{w.real:.6g}"
    return f"({w.real:.6g}{w.imag:+.6g}j)"


def _merge_atoms(p: np.ndarray, w: np.ndarray):
    if p.shape[0] == 0:
        return p.reshape(0, p.shape[1] if p.ndim == 2 else 1), w
    keep_p: list[np.ndarray] = []
    keep_w: list[complex] = []
    for x, a in zip(p, w):
        for i, y in enumerate(keep_p):
            if np.all(torus_distance(x, y) <= POINT_TOL):
                keep_w[i] += a
                break
        else:
            keep_p.append(x)
            keep_w.append(complex(a))
    ww = np.asarray(keep_w, dtype=complex)
    mask = np.abs(ww) >= WEIGHT_TOL
    pp = np.asarray(keep_p, dtype=float).reshape(-1, p.shape[1])
    return pp[mask], ww[mask]


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Complex values indexed by a frequency set; the given data mu_hat on Lambda."""

    freqs: FrequencySet
    values: np.ndarray

    def __init__(self, freqs, values):
        if not isinstance(freqs, FrequencySet):
            freqs = FrequencySet(freqs)
        v = np.atleast_1d(np.asarray(values, dtype=complex)).ravel()
        if v.shape[0] != len(freqs):
            raise ValueError(f"{len(freqs)} frequencies but {v.shape[0]} values")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_mapping(cls, mapping: Mapping, d: int | None = None) -> "SpectralData":
        keys = [as_frequency(k, d) for k in mapping]
        return cls(FrequencySet(keys, d=d or len(keys[0])), [mapping[k] for k in mapping])

    @property
    def d(self) -> int:
        return self.freqs.d

    def __getitem__(self, m) -> complex:
        return complex(self.values[self.freqs.index(m)])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scale(self, c: complex) -> "SpectralData":
        return SpectralData(self.freqs, c * self.values)

    def as_dict(self) -> dict:
        return {m if self.d > 1 else m[0]: complex(v) for m, v in zip(self.freqs, self.values)}

    def allclose(self, other: "SpectralData", tol: float = 1e-9) -> bool:
        if self.freqs != other.freqs:
            return False
        return all(abs(self[m] - other[m]) <= tol for m in self.freqs)


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """``f(x) = sum_m c_m exp(2 pi i m . x)`` over a finite frequency set."""

    freqs: FrequencySet
    coefficients: np.ndarray

    def __init__(self, freqs, coefficients):
        if not isinstance(freqs, FrequencySet):
            freqs = FrequencySet(freqs)
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex)).ravel()
        if c.shape[0] != len(freqs):
            raise ValueError("one coefficient per frequency required")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coefficients", _frozen(c))

    @classmethod
    def from_mapping(cls, mapping: Mapping, d: int | None = None) -> "TrigPolynomial":
        keys = [as_frequency(k, d) for k in mapping]
        return cls(FrequencySet(keys, d=d or len(keys[0])), [mapping[k] for k in mapping])

    @property
    def d(self) -> int:
        return self.freqs.d

    def __getitem__(self, m) -> complex:
        m = as_frequency(m, self.d)
        if m not in self.freqs:
            return 0j
        return complex(self.coefficients[self.freqs.index(m)])

    def __call__(self, x) -> np.ndarray:
        """Evaluate at one point or at an array of points of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        phase = np.exp(TWO_PI_I * (x @ self.freqs.elements.T))
        return phase @ self.coefficients

    def scale(self, c: complex) -> "TrigPolynomial":
        return TrigPolynomial(self.freqs, c * self.coefficients)

    def derivative(self, axis: int = 0) -> "TrigPolynomial":
        return TrigPolynomial(
            self.freqs, TWO_PI_I * self.freqs.elements[:, axis] * self.coefficients
        )

    def on_grid(self, n: int) -> np.ndarray:
        """Values on the uniform grid ``{k/n}^d``, shape ``(n,)*d``."""
        axes = [np.arange(n) / n] * self.d
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return self(pts)


# ---------------------------------------------------------------------------
# measure-level operators


def fourier_transform(mu: DiscreteMeasure, freqs: FrequencySet) -> SpectralData:
    _check_dim(mu.d, freqs.d)
    if len(mu) == 0:
        return SpectralData(freqs, np.zeros(len(freqs)))
    phase = np.exp(-TWO_PI_I * (freqs.elements @ mu.points.T))
    return SpectralData(freqs, phase @ mu.weights)


def tv_norm(mu: DiscreteMeasure) -> float:
    return float(np.sum(np.abs(mu.weights)))


def translate(mu: DiscreteMeasure, y) -> DiscreteMeasure:
    y = np.asarray(TorusPoint(y).coords)
    _check_dim(mu.d, y.size)
    return DiscreteMeasure(mu.points + y, mu.weights, d=mu.d)


def modulate(mu: DiscreteMeasure, n) -> DiscreteMeasure:
    n = np.asarray(as_frequency(n, mu.d))
    return DiscreteMeasure(mu.points, mu.weights * np.exp(TWO_PI_I * (mu.points @ n)), d=mu.d)


def convolve(mu1: DiscreteMeasure, mu2: DiscreteMeasure) -> DiscreteMeasure:
    _check_dim(mu1.d, mu2.d)
    if len(mu1) == 0 or len(mu2) == 0:
        return DiscreteMeasure.empty(mu1.d)
    pts = (mu1.points[:, None, :] + mu2.points[None, :, :]).reshape(-1, mu1.d)
    w = np.outer(mu1.weights, mu2.weights).ravel()
    return DiscreteMeasure(pts, w, d=mu1.d)


def product_measure(mu1: DiscreteMeasure, mu2: DiscreteMeasure) -> DiscreteMeasure:
    d = mu1.d + mu2.d
    if len(mu1) == 0 or len(mu2) == 0:
        return DiscreteMeasure.empty(d)
    k1, k2 = len(mu1), len(mu2)
    pts = np.hstack([np.repeat(mu1.points, k2, axis=0), np.tile(mu2.points, (k1, 1))])
    w = np.outer(mu1.weights, mu2.weights).ravel()
    return DiscreteMeasure(pts, w, d=d)


def product_frequencies(f1: FrequencySet, f2: FrequencySet) -> FrequencySet:
    e1, e2 = f1.elements, f2.elements
    rows = np.hstack([np.repeat(e1, len(e2), axis=0), np.tile(e2, (len(e1), 1))])
    return FrequencySet(rows, d=f1.d + f2.d)


def trig_eval(f: TrigPolynomial, x) -> complex:
    x = TorusPoint(x) if not isinstance(x, TorusPoint) else x
    _check_dim(f.d, x.d)
    return complex(f(np.asarray(x.coords)))


def inner_product(f: TrigPolynomial, mu: DiscreteMeasure) -> complex:
    _check_dim(f.d, mu.d)
    if len(mu) == 0:
        return 0j
    return complex(np.sum(f(mu.points) * np.conj(mu.weights)))


# ---------------------------------------------------------------------------
# JSON


def measure_to_json(mu: DiscreteMeasure) -> dict:
    return {
        "d": mu.d,
        "atoms": [
            {"x": [float(c) for c in p], "re": float(w.real), "im": float(w.imag)}
            for p, w in zip(mu.points, mu.weights)
        ],
    }


def measure_from_json(obj: dict) -> DiscreteMeasure:
    d = int(obj["d"])
    atoms = obj.get("atoms", [])
    if not atoms:
        return DiscreteMeasure.empty(d)
    pts = np.array([a["x"] for a in atoms], dtype=float).reshape(-1, d)
    w = np.array([complex(a.get("re", 0.0), a.get("im", 0.0)) for a in atoms])
    return DiscreteMeasure(pts, w, d=d)


def spectral_to_json(data: SpectralData) -> dict:
    return {
        "d": data.d,
        "data": [
            {"m": list(m), "re": float(v.real), "im": float(v.imag)}
            for m, v in zip(data.freqs, data.values)
        ],
    }


def spectral_from_json(obj: dict) -> SpectralData:
    d = int(obj["d"])
    rows = obj["data"]
    if not rows:
        raise ValueError("spectral data must contain at least one frequency")
    freqs = FrequencySet([as_frequency(r["m"], d) for r in rows], d=d)
    return SpectralData(freqs, [complex(r.get("re", 0.0), r.get("im", 0.0)) for r in rows])


def trig_to_json(f: TrigPolynomial) -> dict:
    return {
        "d": f.d,
        "coefficients": [
            {"m": list(m), "re": float(c.real), "im": float(c.imag)}
            for m, c in zip(f.freqs, f.coefficients)
        ],
    }


def trig_from_json(obj: dict) -> TrigPolynomial:
    d = int(obj["d"])
    rows = obj["coefficients"]
    freqs = FrequencySet([as_frequency(r["m"], d) for r in rows], d=d)
    return TrigPolynomial(freqs, [complex(r["re"], r["im"]) for r in rows])


def dumps(obj, **kw) -> str:
    """JSON text; Python's float repr is shortest-round-trip, hence lossless."""
    return json.dumps(obj, **kw)


def grid_points(n: int, d: int) -> np.ndarray:
    """The grid ``{k/n}^d`` as an ``(n**d, d)`` array in lexicographic order."""
    axes = [np.arange(n) / n] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def sequence_points(points: Sequence) -> np.ndarray:
    return np.asarray([np.asarray(TorusPoint(p).coords) for p in points], dtype=float)
