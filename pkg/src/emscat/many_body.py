"""Coupled point-moment solver for many small perfectly conducting bodies.

Each body m is reduced to one moment Q_m = -|D_m| A_m; the vectors A_m solve

    A_m + sum_{j != m} tau [k^2 g(x_m, x_j) A_j + H(x_m, x_j) A_j] |D_j| = A0_m

with H the kernel Hessian, tau = (I + gamma)^-1 and A0_m = tau (curl E0)(x_m).
Row component p of the coupling uses the diagonal entry tau(p, p), which is
exact for shapes whose gamma is diagonal; full_tau=True applies the whole
matrix instead.  The solved moments give the scattered field by superposition
of grad g x Q_m terms.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import curl_dipole_term, kernel_gradients, kernel_hessian_parts
from .linalg import ConvergenceError, SolveReport, solve_direct, solve_gmres
from .one_body import GammaMatrix
from .waves import IncidentWave

__all__ = [
    "ManyBodyLayout",
    "EffectiveFieldSolution",
    "ManyBodyOperator",
    "lattice_layout",
    "layout_from_centers",
    "assemble_many_body",
    "solve_effective_field",
    "field_e_many",
    "field_h_many",
    "effective_field_at_centers",
    "error_estimate_many",
]

#: Largest body-size to spacing ratio the asymptotic system is trusted for.
RATIO_WARN_THRESHOLD = 0.1

SPHERE_VOLUME_COEFF = 4.0 / 3.0 * np.pi


@dataclass(frozen=True)
class ManyBodyLayout:
    """Particle centers, common radius/spacing and per-body volumes.

    box is ((xmin, ymin, zmin), (xmax, ymax, zmax)) in cm; every center must
    lie inside it and pairwise distances must respect the nominal spacing.
    """

    centers: np.ndarray
    radius: float
    spacing: float
    volumes: np.ndarray
    box: tuple[tuple[float, float, float], tuple[float, float, float]]

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "volumes", np.asarray(self.volumes, dtype=float))
        if centers.shape[1] != 3:
            raise ValueError("centers must be (M, 3)")
        if self.volumes.shape != (centers.shape[0],):
            raise ValueError("one volume per center required")
        lo, hi = np.asarray(self.box[0]), np.asarray(self.box[1])
        if np.any(centers < lo - 1e-12) or np.any(centers > hi + 1e-12):
            raise ValueError("centers must lie inside the box")
        if centers.shape[0] > 1:
            min_dist = _min_pairwise_distance(centers)
            if min_dist < self.spacing * (1.0 - 1e-12):
                raise ValueError(
                    f"minimum center distance {min_dist:.3e} below spacing {self.spacing:.3e}"
                )
        if self.radius >= self.spacing:
            raise ValueError("bodies overlap: radius >= spacing")
        if self.radius / self.spacing > RATIO_WARN_THRESHOLD:
            warnings.warn(
                f"radius/spacing = {self.radius / self.spacing:.3g} exceeds the "
                "asymptotic regime; results degrade",
                stacklevel=3,
            )

    @property
    def count(self) -> int:
        return self.centers.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "z", "volume"])
            for c, v in zip(self.centers, self.volumes):
                writer.writerow([f"{val:.16g}" for val in (*c, v)])


def _min_pairwise_distance(centers: np.ndarray) -> float:
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())


def lattice_layout(
    count: int,
    spacing: float,
    radius: float,
    box=((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
    volume_coeff: float = SPHERE_VOLUME_COEFF,
) -> ManyBodyLayout:
    """Regular n x n x n lattice anchored at the low corner of the box.

    count must be a perfect cube; centers are box_min + (i, j, l) * spacing
    with i (the x index) varying fastest.  Per-body volumes default to the
    spherical volume_coeff * radius^3.
    """
    n = round(count ** (1.0 / 3.0))
    if n**3 != count:
        raise ValueError(
            f"count must be a perfect cube for lattice placement, got {count}; "
            "use layout_from_centers for irregular configurations"
        )
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    if np.any(lo + (n - 1) * spacing > hi + 1e-15):
        raise ValueError("lattice does not fit inside the box")
    idx = np.arange(n) * spacing
    zz, yy, xx = np.meshgrid(idx, idx, idx, indexing="ij")
    centers = lo + np.stack([xx.ravel(), yy.ravel(), zz.ravel()], axis=1)
    return ManyBodyLayout(
        centers=centers,
        radius=radius,
        spacing=spacing,
        volumes=np.full(count, volume_coeff * radius**3),
        box=(tuple(lo), tuple(hi)),
    )


def layout_from_centers(
    centers,
    spacing: float,
    radius: float,
    box=((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
    volumes=None,
    volume_coeff: float = SPHERE_VOLUME_COEFF,
) -> ManyBodyLayout:
    """Layout from an explicit center list (general counts allowed)."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if volumes is None:
        volumes = np.full(centers.shape[0], volume_coeff * radius**3)
    return ManyBodyLayout(
        centers=centers, radius=radius, spacing=spacing, volumes=np.asarray(volumes),
        box=(tuple(box[0]), tuple(box[1])),
    )


def layout_from_csv(path, spacing: float, radius: float, box=((0, 0, 0), (1, 1, 1))):
    """Read centers (x,y,z[,volume]) back from to_csv output."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                (float(row["x"]), float(row["y"]), float(row["z"]),
                 float(row.get("volume", SPHERE_VOLUME_COEFF * radius**3)))
            )
    data = np.array(rows)
    return layout_from_centers(
        data[:, :3], spacing=spacing, radius=radius, box=box, volumes=data[:, 3]
    )


class ManyBodyOperator:
    """Matrix-free application of the 3M x 3M effective-field system."""

    def __init__(self, layout: ManyBodyLayout, wavenumber: float, gamma: GammaMatrix,
                 full_tau: bool = False):
        centers = layout.centers
        m = layout.count
        diff = centers[:, None, :] - centers[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        if m > 1:
            off_diag_min = r[~np.eye(m, dtype=bool)].min()
            if off_diag_min < 1e-15 * max(1.0, float(np.abs(centers).max())):
                raise ValueError("coincident particle centers")
        np.fill_diagonal(r, 1.0)

        k = wavenumber
        g, c_iso, c_dir = kernel_hessian_parts(k, diff, r)
        # Coupling block (m, j) = [k^2 g I + H] |D_j|; split into the isotropic
        # scalar and the rank-one diff (x) diff part.
        self._c0 = (k * k * g + c_iso) * layout.volumes[None, :]
        self._c2 = c_dir * layout.volumes[None, :]
        idx = np.arange(m)
        self._c0[idx, idx] = 0.0
        self._c2[idx, idx] = 0.0
        self._diff = diff
        self._tau = gamma.tau
        self._full_tau = full_tau
        self.count = m
        self.shape = (3 * m, 3 * m)

    def _coupling(self, a: np.ndarray) -> np.ndarray:
        s = np.einsum("mjq,jq->mj", self._diff, a)
        out = self._c0 @ a + np.einsum("mj,mjp->mp", self._c2 * s, self._diff)
        if self._full_tau:
            return out @ self._tau.T
        return out * np.diag(self._tau)[None, :]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        a = np.asarray(x, dtype=complex).reshape(self.count, 3)
        return (a + self._coupling(a)).reshape(-1)

    def to_dense(self) -> np.ndarray:
        """Materialize the full (3M, 3M) matrix (small systems / oracles)."""
        m = self.count
        eye = np.eye(3)
        blocks = (
            self._c0[:, :, None, None] * eye[None, None, :, :]
            + self._c2[:, :, None, None]
            * self._diff[:, :, :, None]
            * self._diff[:, :, None, :]
        )  # (m, j, p, q)
        if self._full_tau:
            blocks = np.einsum("pr,mjrq->mjpq", self._tau, blocks)
        else:
            blocks = np.diag(self._tau)[None, None, :, None] * blocks
        out = blocks.transpose(0, 2, 1, 3)  # (m, p, j, q)
        for i in range(m):
            out[i, :, i, :] += eye
        return out.reshape(3 * m, 3 * m)


@dataclass(frozen=True)
class EffectiveFieldSolution:
    """Solved per-body vectors A_m, moments Q_m = -|D_m| A_m and the wave."""

    a_values: np.ndarray
    q_values: np.ndarray
    report: SolveReport
    wave: IncidentWave

    def to_csv(self, path) -> None:
        """One row per body: A_m and Q_m as re/im column pairs."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["index"]
            for name in ("Ax", "Ay", "Az", "Qx", "Qy", "Qz"):
                header += [f"{name}_re", f"{name}_im"]
            writer.writerow(header)
            for i, (a, q) in enumerate(zip(self.a_values, self.q_values)):
                row = [str(i)]
                for z in (*a, *q):
                    row += [f"{z.real:.16g}", f"{z.imag:.16g}"]
                writer.writerow(row)


def assemble_many_body(
    layout: ManyBodyLayout, wave: IncidentWave, gamma: GammaMatrix,
    full_tau: bool = False,
) -> tuple[ManyBodyOperator, np.ndarray]:
    """Build the coupled system and right-hand side A0_m = tau (curl E0)(x_m)."""
    operator = ManyBodyOperator(layout, wave.wavenumber, gamma, full_tau=full_tau)
    rhs = wave.curl(layout.centers) @ gamma.tau.T
    return operator, rhs.reshape(-1)


def solve_effective_field(
    layout: ManyBodyLayout,
    wave: IncidentWave,
    gamma: GammaMatrix,
    tol: float = 1e-10,
    restart: int = 50,
    max_iter: int = 1000,
    method: str = "gmres",
    full_tau: bool = False,
) -> EffectiveFieldSolution:
    """Solve for all A_m and attach the moments Q_m = -|D_m| A_m."""
    operator, rhs = assemble_many_body(layout, wave, gamma, full_tau=full_tau)
    if method == "direct":
        x = solve_direct(operator.to_dense(), rhs)
        residual = float(
            np.linalg.norm(operator.matvec(x) - rhs) / max(np.linalg.norm(rhs), 1e-300)
        )
        report = SolveReport(iterations=1, final_residual=residual, converged=True)
    elif method == "gmres":
        x, report = solve_gmres(operator.matvec, rhs, tol=tol, restart=restart, max_iter=max_iter)
        if not report.converged:
            raise ConvergenceError(
                f"effective-field solve stalled at residual {report.final_residual:.3e}",
                report,
            )
    else:
        raise ValueError(f"unknown method {method!r}")
    a = x.reshape(layout.count, 3)
    return EffectiveFieldSolution(
        a_values=a,
        q_values=-layout.volumes[:, None] * a,
        report=report,
        wave=wave,
    )


def _scattered_sum(centers, q_values, wavenumber: float, x: np.ndarray,
                   exclude: int | None = None) -> np.ndarray:
    diff = x[None, :] - centers
    r = np.linalg.norm(diff, axis=-1)
    if exclude is not None:
        r = r.copy()
        r[exclude] = 1.0  # placeholder; the excluded row is zeroed below
    grad = kernel_gradients(wavenumber, diff, r)
    if exclude is not None:
        grad[exclude] = 0.0
    return np.sum(np.cross(grad, q_values), axis=0)


def field_e_many(
    layout: ManyBodyLayout, wave: IncidentWave, solution: EffectiveFieldSolution, x
) -> np.ndarray:
    """Asymptotic total field E(x) = E0(x) + sum_m grad g(x, x_m) x Q_m."""
    x = np.asarray(x, dtype=float)
    dist = np.linalg.norm(layout.centers - x[None, :], axis=1)
    if float(dist.min()) < 1e-15 * max(1.0, float(np.abs(x).max())):
        raise ValueError("field evaluation at a particle center")
    return wave.field(x) + _scattered_sum(
        layout.centers, solution.q_values, wave.wavenumber, x
    )


def effective_field_at_centers(
    layout: ManyBodyLayout, wave: IncidentWave, solution: EffectiveFieldSolution
) -> np.ndarray:
    """Field acting on each body: the total field minus the body's own term."""
    out = np.empty((layout.count, 3), dtype=complex)
    for m in range(layout.count):
        out[m] = wave.field(layout.centers[m]) + _scattered_sum(
            layout.centers, solution.q_values, wave.wavenumber,
            layout.centers[m], exclude=m,
        )
    return out


def field_h_many(
    layout: ManyBodyLayout, wave: IncidentWave, solution: EffectiveFieldSolution, x
) -> np.ndarray:
    """Magnetic field of the many-body solution, H = curl E / (i omega mu)."""
    x = np.asarray(x, dtype=float)
    curl_scattered = np.zeros(3, dtype=complex)
    for center, q in zip(layout.centers, solution.q_values):
        curl_scattered += curl_dipole_term(wave.wavenumber, x, center, q)
    return (wave.curl(x) + curl_scattered) / (
        1j * wave.frequency * wave.permeability
    )


def error_estimate_many(
    layout: ManyBodyLayout, solution: EffectiveFieldSolution, x
) -> float:
    """A-priori bound on the point-moment approximation error at x.

    (1 / 4 pi) (a k^2 / d + a k / d^2 + a / d^3) sum_m |Q_m| with a the body
    radius and d the distance from x to the nearest center.
    """
    x = np.asarray(x, dtype=float)
    d = float(np.linalg.norm(layout.centers - x[None, :], axis=1).min())
    if d <= 0:
        raise ValueError("evaluation point coincides with a particle center")
    a = layout.radius
    k = solution.wave.wavenumber
    q_total = float(np.sum(np.linalg.norm(solution.q_values, axis=1)))
    bracket = a * k * k / d + a * k / (d * d) + a / (d * d * d)
    return bracket * q_total / (4.0 * np.pi)
