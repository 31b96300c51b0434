"""End-to-end analysis: solve, epsilon, Gamma, support structure, uniqueness, positivity."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .certificate import (
    Certificate,
    CertificateError,
    DegenerateCertificate,
    certificate_from_dual,
    deficit,
    is_degenerate,
    polish_certificate,
    support_from_certificate_1d,
    support_from_certificate_grid,
)
from .grid import GridSpec, SolverOptions, solution_to_measure, solve
from .measures import (
    DiscreteMeasure,
    SpectralData,
    TorusPoint,
    grid_points,
    measure_from_json,
    measure_to_json,
    spectral_from_json,
    spectral_to_json,
    trig_from_json,
    trig_to_json,
)
from .positivity import (
    NotExtendable,
    WindowError,
    hull_is_contiguous,
    is_pd_extendable,
    positive_minimal_extrapolation,
    toeplitz_window,
)
from .structure import (
    SupportStructure,
    Tag,
    admissibility_range,
    algorithm_failure_diagnosis,
    default_gamma_tol,
    gamma_set,
    structure_to_json,
    support_structure,
    verified_extrapolation_norm,
)
from .uniqueness import Verdict, uniqueness_verdict

DEFAULT_GRID = {1: 64, 2: 16}


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class AnalyzeOptions:
    grid: int | None = None
    tol: float = 1e-8
    max_iter: int = 200_000
    mu_norm: float | None = None
    center: int | None = None
    halfwidth: int | None = None
    timing: bool = False


def skipped(reason: str) -> dict:
    return {"skipped": reason}


def parse_input(obj: dict) -> tuple[SpectralData, dict]:
    """Spectral data and priors (``mu_norm``, ``extrapolations``) from an input document."""
    data = spectral_from_json(obj)
    priors = {"mu_norm": obj.get("mu_norm"),
              "extrapolations": [measure_from_json(e) for e in obj.get("extrapolations", [])]}
    return data, priors


def default_window(data: SpectralData, n: int) -> int:
    """Largest ``M`` with ``n + k`` or ``n - k`` in Lambda for every ``k <= M``."""
    M = 0
    while (n + M + 1,) in data.freqs or (n - M - 1,) in data.freqs:
        M += 1
    return M


def analyze(data: SpectralData, opts: AnalyzeOptions = AnalyzeOptions(),
            priors: dict | None = None) -> dict:
    """Run the full pipeline; the result is a JSON-ready dictionary.

    Every section is either populated or a ``{"skipped": reason}`` record.
    """
    priors = priors or {}
    t0 = time.perf_counter()
    report: dict = {"input": spectral_to_json(data)}
    d = data.d
    N = opts.grid or DEFAULT_GRID.get(d, 8)
    sopts = SolverOptions(max_iterations=opts.max_iter, gap_tol=opts.tol)
    sol = solve(data, GridSpec(N, d), sopts)
    report["solve"] = sol.to_json()
    if not sol.converged:
        raise NonConvergence(f"solver did not converge on the {N}-grid "
                             f"(gap {sol.duality_gap:.3g})")

    mu_norm = opts.mu_norm if opts.mu_norm is not None else priors.get("mu_norm")
    norms = [sol.epsilon_grid]
    for nu in priors.get("extrapolations", []):
        norms.append(verified_extrapolation_norm(nu, data, tol=1e-9))
    adm = admissibility_range(data, mu_norm, norms)
    report["admissibility"] = {"lower": adm.lower, "upper": adm.upper, "tight": adm.is_tight,
                               "notes": list(adm.notes)}
    gtol = default_gamma_tol(opts.tol)
    # the grid value is only an upper bound; it is exact once it meets max |data|
    eps = adm.lower if adm.is_tight or adm.upper - adm.lower <= gtol * max(1.0, adm.lower) \
        else sol.epsilon_grid
    report["epsilon"] = eps

    if eps == 0.0:
        report["certificate"] = skipped("zero data: any polynomial is optimal")
        report["gamma"] = skipped("zero data: |data| = epsilon on all of Lambda")
        report["structure"] = structure_to_json(SupportStructure(Tag.POINTS, reason="zero data"))
        report["uniqueness"] = {"verdict": Verdict.UNIQUE.value,
                                "measure": measure_to_json(DiscreteMeasure.empty(d)),
                                "residual": 0.0,
                                "reason": "the zero measure is the only measure of norm 0"}
        report["positivity"] = skipped("zero data")
        report["timing"] = _timing(opts, t0)
        return report

    atoms = solution_to_measure(sol)
    cert, source = _certificate(sol, data, eps, atoms)
    degenerate = cert is not None and is_degenerate(cert.poly)
    if cert is None:
        report["certificate"] = skipped(source)
    else:
        report["certificate"] = {"source": source, "degenerate": degenerate,
                                 "sup_norm": cert.sup_norm_bound,
                                 "pairing": [cert.pairing_value.real, cert.pairing_value.imag],
                                 "polynomial": trig_to_json(cert.poly)}

    if degenerate:
        eps_f, gamma = algorithm_failure_diagnosis(True, data, gtol)
        route = "degenerate certificate: epsilon = max |data|"
        if abs(eps_f - eps) > 1e-6 * max(1.0, eps):
            route += f" (grid value {eps:.12g} disagrees)"
        eps = eps_f
        report["epsilon"] = eps
    else:
        gamma = gamma_set(data, eps, gtol)
        route = "generic"
    report["gamma"] = {"members": [list(m) for m in gamma], "epsilon_used": gamma.epsilon_used,
                       "tolerance": gamma.tolerance, "route": route}

    structure = support_structure(gamma, data, d)
    if len(gamma) == 0:
        structure = _analytic_structure(cert, d)
    report["structure"] = structure_to_json(structure)

    uq = uniqueness_verdict(structure, data.freqs, data, epsilon=eps)
    report["uniqueness"] = uq.to_json()
    report["positivity"] = _positivity(data, gamma, opts)
    report["timing"] = _timing(opts, t0)
    return report


def _timing(opts: AnalyzeOptions, t0: float):
    if not opts.timing:
        return skipped("not recorded; reports are byte-reproducible by default")
    return {"seconds": time.perf_counter() - t0}


def _certificate(sol, data, eps, atoms) -> tuple[Certificate | None, str]:
    if len(atoms):
        try:
            return polish_certificate(data.freqs, atoms, data, eps), "polished"
        except CertificateError:
            pass
    try:
        return certificate_from_dual(sol.dual_vector, data.freqs, data, eps), "grid dual"
    except CertificateError as e:
        return None, f"no certificate: {e}"


def _analytic_structure(cert: Certificate | None, d: int) -> SupportStructure:
    if cert is None:
        return SupportStructure(Tag.ANALYTIC, reason="Gamma empty and no certificate")
    try:
        if d == 1:
            pts = support_from_certificate_1d(cert.poly)
        else:
            pts = support_from_certificate_grid(cert.poly, d)
    except DegenerateCertificate:
        return SupportStructure(Tag.WHOLE_TORUS, reason="|phi| = 1 everywhere")
    if not pts:
        return SupportStructure(Tag.ANALYTIC, reason="deficit has no zeros within tolerance")
    how = "roots of the deficit polynomial" if d == 1 else "grid zeros of the deficit polynomial"
    return SupportStructure(Tag.POINTS, points=tuple(pts), reason=how)


def _positivity(data: SpectralData, gamma, opts: AnalyzeOptions) -> dict:
    if data.d != 1:
        return skipped("unsupported dimension: positive-definite windows are 1-d only")
    if opts.center is not None:
        n = opts.center
    elif len(gamma):
        n = gamma.members[0][0]
    else:
        return skipped("no center given and Gamma is empty")
    M = opts.halfwidth if opts.halfwidth is not None else default_window(data, n)
    out: dict = {"center": n, "halfwidth": M}
    try:
        window = toeplitz_window(data, n, M)
    except WindowError as e:
        out["error"] = str(e)
        out["extendable"] = False
        return out
    out["reflected"] = list(window.reflected)
    out["extendable"] = is_pd_extendable(window)
    out["hull_contiguous"] = hull_is_contiguous(data, n)
    if not out["hull_contiguous"]:
        out["label"] = "heuristic: Toeplitz PSD on the contiguous hull only"
    if out["extendable"]:
        try:
            nu = positive_minimal_extrapolation(data, n, M)
            out["extrapolation"] = measure_to_json(nu)
        except NotExtendable as e:
            out["extrapolation"] = skipped(str(e))
    return out


# ---------------------------------------------------------------------------
# plot data


def export_plot(report: dict, target: Path, samples: int | None = None) -> list[Path]:
    """Write ``certificate.csv``, ``atoms.csv`` and ``structure.csv`` into ``target``."""
    target = Path(target)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create {target}: {e}") from e
    d = int(report["input"]["d"])
    files = [target / "certificate.csv", target / "atoms.csv", target / "structure.csv"]
    cols = [f"x{i + 1}" for i in range(d)]

    rows = []
    cert = report.get("certificate", {})
    if "polynomial" in cert:
        phi = trig_from_json(cert["polynomial"])
        n = samples or (1024 if d == 1 else 64)
        pts = grid_points(n, d)
        absphi = np.abs(phi(pts))
        Phi = deficit(phi)(pts)
        rows = [[*map(float, p), float(a), float(b)] for p, a, b in zip(pts, absphi, Phi)]
    _write(files[0], cols + ["abs_phi", "deficit"], rows)

    uq = report.get("uniqueness", {})
    if uq.get("measure"):
        mu = measure_from_json(uq["measure"])
    elif "solve" in report and report["solve"].get("grid"):
        mu = _grid_atoms(report)
    else:
        mu = DiscreteMeasure.empty(d)
    _write(files[1], cols + ["re", "im"],
           [[*map(float, p), float(w.real), float(w.imag)] for p, w in zip(mu.points, mu.weights)])

    st = report.get("structure", {})
    srows = []
    for p in st.get("points", []):
        srows.append(["point", "", ""] + list(p))
    for r in st.get("reduced", []):
        direction = " ".join(str(v) for v in r["direction"])
        for t in r["values"]:
            srows.append(["constraint", direction, t] + [""] * d)
            for x in _line_samples(r["direction"], t):
                srows.append(["sample", direction, t] + list(x))
    _write(files[2], ["kind", "direction", "value"] + cols, srows)
    return files


def _grid_atoms(report: dict) -> DiscreteMeasure:
    g = report["solve"]["grid"]
    y = np.array([complex(a, b) for a, b in report["solve"]["primal"]])
    pts = grid_points(g["n_per_axis"], g["d"])
    keep = np.abs(y) > 1e-6
    return DiscreteMeasure(pts[keep], y[keep], d=g["d"])


def _line_samples(direction, t, count: int = 64) -> list[list[float]]:
    """Points of ``{x : direction . x = t mod 1}`` for plotting (d = 1, 2)."""
    p = np.asarray(direction, float)
    if p.size == 1:
        k = int(abs(p[0]))
        return [[((t + j) / p[0]) % 1.0] for j in range(k)]
    if p.size != 2:
        return []
    x0 = t * p / float(p @ p)
    v = np.array([-p[1], p[0]])
    s = np.arange(count) / count
    return [list(map(float, np.mod(x0 + si * v, 1.0))) for si in s]


def _write(path: Path, header: list[str], rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def recovered_points(report: dict) -> list[TorusPoint]:
    return [TorusPoint(p) for p in report.get("structure", {}).get("points", [])]
