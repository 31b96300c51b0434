"""Example inputs, generated from closed-form measures.

The committed JSON files under ``fixtures/`` are the output of
:func:`write_fixtures`; ``python -m minextrap.fixtures`` regenerates them.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .measures import (
    DiscreteMeasure,
    FrequencySet,
    SpectralData,
    fourier_transform,
    measure_to_json,
    spectral_from_json,
    spectral_to_json,
    tv_norm,
)
from .special import CantorParams, cantor_spectral_data, surface_data, surface_fourier_two_lines

NAMES = ("e1", "e2", "e3", "e4", "e5", "e6", "cantor", "twolines")
LAMBDA_1D = FrequencySet([-1, 0, 1])
LAMBDA_E5 = FrequencySet([m for m in FrequencySet.box(-1, 1, 2)
                          if m not in {(1, -1), (-1, 1)}], d=2)
E6_Y = 0.01
CANTOR_Q = 3
CANTOR_LAMBDA = FrequencySet(range(-3, 4))


def example_measures() -> dict[str, DiscreteMeasure]:
    return {
        "e1": DiscreteMeasure([0, 0.5], [1, 1]),
        "e2": DiscreteMeasure([0, 0.5], [1, -1]),
        "e3": DiscreteMeasure([0, 0.25], [1, -1]),
        "e4": DiscreteMeasure([0, 1 / 3], [1, np.exp(1j * np.pi / 3)]),
        "e5": DiscreteMeasure([[0, 0], [0.5, 0.5]], [1, 1]),
        "e6": DiscreteMeasure([0, E6_Y], [1, -1]),
    }


def build_fixture(name: str) -> dict:
    """Fixture dictionary: spectral data plus provenance and optional priors."""
    measures = example_measures()
    if name in measures:
        mu = measures[name]
        freqs = LAMBDA_E5 if name == "e5" else LAMBDA_1D
        out = spectral_to_json(fourier_transform(mu, freqs))
        out.update(name=name, measure=measure_to_json(mu), mu_norm=tv_norm(mu))
        if name == "e3":
            nu = DiscreteMeasure([3 / 8, 7 / 8], [-1 / np.sqrt(2), 1 / np.sqrt(2)])
            out["extrapolations"] = [measure_to_json(nu)]
        return out
    if name == "cantor":
        data = cantor_spectral_data(CantorParams(CANTOR_Q, 40), CANTOR_LAMBDA)
        out = spectral_to_json(data)
        out.update(name=name, mu_norm=1.0, q=CANTOR_Q, truncation=40)
        return out
    if name == "twolines":
        data = surface_data(surface_fourier_two_lines, FrequencySet.box(-2, 1, 2))
        out = spectral_to_json(data)
        out.update(name=name, mu_norm=2.0)
        return out
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(NAMES)}")


def fixture_dir() -> Path:
    return Path(str(resources.files("minextrap") / "fixtures"))


def load_fixture(name: str) -> dict:
    path = fixture_dir() / f"{name}.json"
    if not path.exists():
        raise KeyError(f"no fixture named {name!r}")
    return json.loads(path.read_text())


def fixture_data(name: str) -> SpectralData:
    return spectral_from_json(load_fixture(name))


def write_fixtures(target: Path | None = None) -> list[Path]:
    target = Path(target) if target else fixture_dir()
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name in NAMES:
        p = target / f"{name}.json"
        p.write_text(json.dumps(build_fixture(name), indent=1, sort_keys=True) + "\n")
        written.append(p)
    return written


if __name__ == "__main__":
    for p in write_fixtures():
        print(p)
