"""Validation quantities for solved one-body problems, plus sweep drivers.

Three checks qualify a boundary solve:

* tangentiality of the solved density: max_i |J(i).N(i)| / max_i |J(i)|;
* the moment residual |(I + gamma) Q - R| / |R| with R = -|D| (curl E0)(center);
* the relative gap between the quadrature moment and the closed-form
  asymptotic moment, and between the exact and asymptotic far fields.

convergence_sweep reruns the full pipeline across mesh resolutions or body
sizes and tabulates everything per case.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .geometry import CollocationMesh, ShapeSpec
from .one_body import (
    GammaMatrix,
    SurfaceCurrent,
    field_e_asymptotic,
    field_e_exact,
    gamma_numeric,
    gamma_sphere_analytic,
    moment_q_asymptotic,
    moment_q_exact,
    solve_current,
)
from .waves import IncidentWave

__all__ = [
    "ValidationReport",
    "check_tangentiality",
    "check_q_residual",
    "check_q_asymptotic",
    "check_e_asymptotic",
    "validate_solution",
    "convergence_sweep",
    "sweep_to_csv",
]

DIAGONAL_DIRECTION = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)


@dataclass
class ValidationReport:
    """The validation quantities of one solved case."""

    tangentiality_max: float
    q_residual_rel: float
    q_asym_rel: float
    e_asym_rel: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tangentiality_max": self.tangentiality_max,
            "q_residual_rel": self.q_residual_rel,
            "q_asym_rel": self.q_asym_rel,
            "e_asym_rel": [[d, e] for d, e in self.e_asym_rel],
        }


def check_tangentiality(current: SurfaceCurrent, mesh: CollocationMesh) -> float:
    """Normalized worst-case normal component of the solved density."""
    j = current.values
    magnitudes = np.linalg.norm(j, axis=1)
    peak = float(magnitudes.max())
    if peak == 0.0:
        raise ValueError("zero surface density has no tangentiality measure")
    normal_part = np.abs(np.einsum("ij,ij->i", j, mesh.normals.astype(complex)))
    return float(normal_part.max()) / peak


def check_q_residual(
    q_exact: np.ndarray, gamma: GammaMatrix, mesh: CollocationMesh, wave: IncidentWave
) -> float:
    """Relative residual of the moment equation (I + gamma) Q = R."""
    rhs = -mesh.volume * wave.curl(mesh.center)
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        raise ValueError("zero right-hand side; residual undefined")
    lhs = q_exact + gamma.gamma @ q_exact
    return float(np.linalg.norm(lhs - rhs)) / rhs_norm


def check_q_asymptotic(q_exact: np.ndarray, q_asym: np.ndarray) -> float:
    """Relative gap |Q_e - Q_a| / |Q_e|."""
    q_norm = float(np.linalg.norm(q_exact))
    if q_norm == 0.0:
        raise ValueError("zero exact moment; relative gap undefined")
    return float(np.linalg.norm(np.asarray(q_exact) - np.asarray(q_asym))) / q_norm


def check_e_asymptotic(
    mesh: CollocationMesh,
    wave: IncidentWave,
    current: SurfaceCurrent,
    q_asym: np.ndarray,
    center,
    points,
) -> list[tuple[float, float]]:
    """Per-point relative gap between exact and point-moment fields.

    Returns (distance from center, |E_e - E_a| / |E_e|) per evaluation point.
    """
    center = np.asarray(center, dtype=float)
    out = []
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        e_exact = field_e_exact(mesh, wave, current, x)
        e_asym = field_e_asymptotic(wave, q_asym, center, x)
        gap = float(np.linalg.norm(e_exact - e_asym)) / float(np.linalg.norm(e_exact))
        out.append((float(np.linalg.norm(x - center)), gap))
    return out


def validate_solution(
    mesh: CollocationMesh,
    wave: IncidentWave,
    current: SurfaceCurrent,
    gamma: GammaMatrix,
    distances=(),
    direction=DIAGONAL_DIRECTION,
) -> ValidationReport:
    """Run all validation checks for one solved body."""
    q_e = moment_q_exact(current, mesh)
    q_a = moment_q_asymptotic(mesh, wave, gamma)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    points = [mesh.center + float(d) * direction for d in distances]
    return ValidationReport(
        tangentiality_max=check_tangentiality(current, mesh),
        q_residual_rel=check_q_residual(q_e, gamma, mesh, wave),
        q_asym_rel=check_q_asymptotic(q_e, q_a),
        e_asym_rel=check_e_asymptotic(mesh, wave, current, q_a, mesh.center, points)
        if points
        else [],
    )


def _gamma_for(shape: ShapeSpec, mesh: CollocationMesh) -> GammaMatrix:
    if shape.kind == "sphere":
        return gamma_sphere_analytic()
    return gamma_numeric(mesh)


def convergence_sweep(
    shape: ShapeSpec,
    wave: IncidentWave,
    resolutions=None,
    scale_factors=None,
    distances=(),
    direction=DIAGONAL_DIRECTION,
    solver_tol: float = 1e-10,
) -> list[dict]:
    """Tabulate the validation quantities across one sweep axis.

    Exactly one of resolutions (mesh refinement) or scale_factors (body size
    at fixed mesh) must be given.  Each row carries the case description and
    the full ValidationReport contents.
    """
    if (resolutions is None) == (scale_factors is None):
        raise ValueError("give exactly one of resolutions or scale_factors")

    cases = []
    if resolutions is not None:
        for res in resolutions:
            cases.append(ShapeSpec(shape.kind, shape.a, shape.b, shape.c, int(res)))
    else:
        cases = [shape.scaled(float(s)) for s in scale_factors]

    rows = []
    for case in cases:
        mesh = case.build()
        current = solve_current(mesh, wave, tol=solver_tol)
        gamma = _gamma_for(case, mesh)
        report = validate_solution(mesh, wave, current, gamma, distances, direction)
        rows.append(
            {
                "kind": case.kind,
                "a": case.a,
                "b": case.b,
                "c": case.c,
                "resolution": case.resolution,
                "n_points": mesh.n_points,
                **report.to_dict(),
            }
        )
    return rows


def sweep_to_csv(rows: list, path) -> None:
    """Write sweep rows as CSV, one case per row.

    Per-distance field errors become err@<distance> columns (union over rows).
    """
    distances = sorted({d for row in rows for d, _ in row["e_asym_rel"]})
    header = [
        "kind", "a", "b", "c", "resolution", "n_points",
        "tangentiality_max", "q_residual_rel", "q_asym_rel",
    ] + [f"err@{d:.6g}" for d in distances]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            by_distance = {d: e for d, e in row["e_asym_rel"]}
            record = [
                row["kind"], row["a"], row["b"], row["c"],
                row["resolution"], row["n_points"],
                f"{row['tangentiality_max']:.16g}",
                f"{row['q_residual_rel']:.16g}",
                f"{row['q_asym_rel']:.16g}",
            ] + [
                f"{by_distance[d]:.16g}" if d in by_distance else ""
                for d in distances
            ]
            writer.writerow(record)
