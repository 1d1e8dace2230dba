"""Collocation meshes: surface points, outward normals, quadrature weights.

A mesh is the geometric half of the boundary solver: one collocation point
per surface patch, the patch area as quadrature weight, plus the body volume
and a reference center.  Builders are provided for spheres, ellipsoids,
axis-aligned cubes and arbitrary star-shaped parametric surfaces.

The sphere/ellipsoid partition refines the azimuthal resolution toward the
poles: with m_phi polar bands at phi_j = j pi / (m_phi + 1), band j carries

    m_theta(phi_j) = floor(m_phi + |phi_j - pi/2| * 6 * m_phi)

points at theta_i = i 2 pi / m_theta, plus one point at each pole.  The
floor in m_theta reproduces the reference point counts exactly
(m_phi = 12, 14, 16, 18 -> P = 766, 1052, 1386, 1762).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "CollocationMesh",
    "ParametricSurface",
    "ShapeSpec",
    "mesh_sphere",
    "mesh_ellipsoid",
    "mesh_cube",
    "mesh_parametric",
    "sphere_band_counts",
    "sphere_point_count",
    "sphere_resolution_for",
]


@dataclass(frozen=True)
class CollocationMesh:
    """Immutable collocation mesh.

    points : (P, 3) float, cm
    normals : (P, 3) float, outward unit normals
    weights : (P,) float, patch areas in cm^2
    volume : float, body volume in cm^3
    center : (3,) float, reference point of the body (cm)
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    volume: float
    center: np.ndarray

    def __post_init__(self):
        for name in ("points", "normals", "weights", "center"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    @property
    def radius(self) -> float:
        """Circumscribed radius: max distance of a collocation point from center."""
        return float(np.max(np.linalg.norm(self.points - self.center, axis=1)))

    def validate(self) -> None:
        """Raise ValueError on any broken mesh invariant."""
        p = self.n_points
        if self.normals.shape != (p, 3) or self.weights.shape != (p,):
            raise ValueError("points/normals/weights size mismatch")
        norms = np.linalg.norm(self.normals, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("normals are not unit vectors")
        if np.any(self.weights <= 0):
            raise ValueError("non-positive quadrature weight")
        if not self.volume > 0:
            raise ValueError("non-positive volume")

    def to_csv(self, path) -> None:
        """Write one row per point: x,y,z,Nx,Ny,Nz,w."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "z", "Nx", "Ny", "Nz", "w"])
            for pt, nrm, w in zip(self.points, self.normals, self.weights):
                writer.writerow([f"{v:.16g}" for v in (*pt, *nrm, w)])


# ---------------------------------------------------------------------------
# Sphere / ellipsoid band partition
# ---------------------------------------------------------------------------

def sphere_band_counts(m_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar angles phi_j and per-band azimuthal counts m_theta(phi_j)."""
    if m_phi < 2:
        raise ValueError(f"m_phi must be >= 2, got {m_phi}")
    j = np.arange(1, m_phi + 1)
    phi = j * np.pi / (m_phi + 1)
    m_theta = np.floor(m_phi + np.abs(phi - np.pi / 2) * 6 * m_phi).astype(int)
    return phi, m_theta


def sphere_point_count(m_phi: int) -> int:
    """Total number of collocation points (band points plus 2 poles)."""
    _, m_theta = sphere_band_counts(m_phi)
    return int(m_theta.sum()) + 2


def sphere_resolution_for(target_points: int, max_m_phi: int = 200) -> int:
    """Smallest m_phi whose point count is closest to target_points.

    The band rule makes the attainable counts a sparse set; the reference
    resolutions are hit exactly (766 -> 12, 1052 -> 14, 1386 -> 16,
    1762 -> 18).
    """
    best_m, best_gap = 2, abs(sphere_point_count(2) - target_points)
    for m in range(3, max_m_phi + 1):
        gap = abs(sphere_point_count(m) - target_points)
        if gap < best_gap:
            best_m, best_gap = m, gap
        if gap == 0:
            break
    return best_m


def _band_nodes(m_phi: int):
    """Yield (theta_i, phi_j, d_theta, d_phi) for every band point."""
    phi, m_theta = sphere_band_counts(m_phi)
    d_phi = np.pi / (m_phi + 1)
    for phi_j, mt in zip(phi, m_theta):
        d_theta = 2.0 * np.pi / mt
        for i in range(1, mt + 1):
            yield i * d_theta, phi_j, d_theta, d_phi


def mesh_sphere(radius: float, m_phi: int, center=(0.0, 0.0, 0.0)) -> CollocationMesh:
    """Collocation mesh of a sphere.

    Band weights are the product-rule surface elements radius^2 sin(phi)
    d_theta d_phi; the two pole points absorb the residual so the weights
    sum to the exact area 4 pi radius^2.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    center = np.asarray(center, dtype=float)

    pts, nrm, wts = [], [], []
    for theta, phi, d_theta, d_phi in _band_nodes(m_phi):
        n = np.array(
            [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
        )
        pts.append(center + radius * n)
        nrm.append(n)
        wts.append(radius * radius * np.sin(phi) * d_theta * d_phi)

    area = 4.0 * np.pi * radius * radius
    residual = area - float(np.sum(wts))
    if residual <= 0:
        # Band weights already tile the full area; give the poles a patch of
        # the same scale as their neighbors instead of a negative cap.
        residual = 2.0 * min(wts)
    for pole in (1.0, -1.0):
        pts.append(center + np.array([0.0, 0.0, pole * radius]))
        nrm.append(np.array([0.0, 0.0, pole]))
        wts.append(residual / 2.0)

    return CollocationMesh(
        points=np.array(pts),
        normals=np.array(nrm),
        weights=np.array(wts),
        volume=4.0 / 3.0 * np.pi * radius**3,
        center=center,
    )


def mesh_ellipsoid(
    a: float, b: float, c: float, m_phi: int, center=(0.0, 0.0, 0.0)
) -> CollocationMesh:
    """Collocation mesh of an axis-aligned ellipsoid with semi-axes a, b, c.

    Points follow (a cos t sin p, b sin t sin p, c cos p) on the same band
    partition as the sphere; normals are the normalized surface gradient
    (cos t sin p / a, sin t sin p / b, cos p / c); weights are the parametric
    surface element |f_theta x f_phi| d_theta d_phi.
    """
    if min(a, b, c) <= 0:
        raise ValueError("semi-axes must be positive")
    center = np.asarray(center, dtype=float)

    pts, nrm, wts = [], [], []
    for theta, phi, d_theta, d_phi in _band_nodes(m_phi):
        ct, st = np.cos(theta), np.sin(theta)
        cp, sp = np.cos(phi), np.sin(phi)
        pts.append(center + np.array([a * ct * sp, b * st * sp, c * cp]))
        n = np.array([ct * sp / a, st * sp / b, cp / c])
        nrm.append(n / np.linalg.norm(n))
        f_theta = np.array([-a * st * sp, b * ct * sp, 0.0])
        f_phi = np.array([a * ct * cp, b * st * cp, -c * sp])
        wts.append(np.linalg.norm(np.cross(f_theta, f_phi)) * d_theta * d_phi)

    # Pole caps via a one-point rule on the residual band phi in [0, d_phi/2].
    d_phi = np.pi / (m_phi + 1)
    cap_phi = d_phi / 4.0
    cap_element = np.linalg.norm(
        np.cross(
            np.array([0.0, b * np.sin(cap_phi), 0.0]),
            np.array([a * np.cos(cap_phi), 0.0, -c * np.sin(cap_phi)]),
        )
    )
    cap_weight = cap_element * 2.0 * np.pi * (d_phi / 2.0)
    for pole in (1.0, -1.0):
        pts.append(center + np.array([0.0, 0.0, pole * c]))
        nrm.append(np.array([0.0, 0.0, pole]))
        wts.append(cap_weight)

    return CollocationMesh(
        points=np.array(pts),
        normals=np.array(nrm),
        weights=np.array(wts),
        volume=4.0 / 3.0 * np.pi * a * b * c,
        center=center,
    )


def mesh_cube(a_half: float, n_per_face: int, center=(0.0, 0.0, 0.0)) -> CollocationMesh:
    """Collocation mesh of a cube of side 2 a_half: n^2 cells per face.

    Points sit at face-cell centers, normals are the axis unit vectors of
    the face, every weight is the exact cell area (2 a_half / n)^2.
    """
    if not a_half > 0:
        raise ValueError("a_half must be positive")
    if n_per_face < 2:
        raise ValueError("n_per_face must be >= 2")
    center = np.asarray(center, dtype=float)
    n = n_per_face
    h = 2.0 * a_half / n
    grid = -a_half + h * (np.arange(n) + 0.5)

    pts, nrm = [], []
    for axis in range(3):
        for sign in (1.0, -1.0):
            normal = np.zeros(3)
            normal[axis] = sign
            u_axis, v_axis = [ax for ax in range(3) if ax != axis]
            for u in grid:
                for v in grid:
                    p = np.zeros(3)
                    p[axis] = sign * a_half
                    p[u_axis] = u
                    p[v_axis] = v
                    pts.append(center + p)
                    nrm.append(normal)

    count = 6 * n * n
    return CollocationMesh(
        points=np.array(pts),
        normals=np.array(nrm),
        weights=np.full(count, h * h),
        volume=(2.0 * a_half) ** 3,
        center=center,
    )


# ---------------------------------------------------------------------------
# General parametric surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParametricSurface:
    """Closed star-shaped surface given by a map f(u, v) -> point.

    func maps scalars (u, v) to a length-3 sequence; the (u, v) rectangle is
    sampled at n_u x n_v cell centers.  Tangents default to central finite
    differences of func.
    """

    func: Callable[[float, float], Sequence[float]]
    u_range: tuple[float, float]
    v_range: tuple[float, float]
    n_u: int
    n_v: int


def mesh_parametric(surface: ParametricSurface) -> CollocationMesh:
    """Mesh a parametric surface: FD tangents, outward-oriented normals.

    Weights are |f_u x f_v| du dv; the volume uses the divergence theorem,
    V = (1/3) sum (p - centroid) . N * w.  Raises ValueError when the
    parametrization degenerates (vanishing tangent cross product).
    """
    if surface.n_u < 2 or surface.n_v < 2:
        raise ValueError("need at least 2 cells per parameter direction")
    u0, u1 = surface.u_range
    v0, v1 = surface.v_range
    du = (u1 - u0) / surface.n_u
    dv = (v1 - v0) / surface.n_v
    hu, hv = du * 1e-4, dv * 1e-4

    f = lambda u, v: np.asarray(surface.func(u, v), dtype=float)

    pts, nrm, wts = [], [], []
    for i in range(surface.n_u):
        u = u0 + (i + 0.5) * du
        for j in range(surface.n_v):
            v = v0 + (j + 0.5) * dv
            p = f(u, v)
            t_u = (f(u + hu, v) - f(u - hu, v)) / (2 * hu)
            t_v = (f(u, v + hv) - f(u, v - hv)) / (2 * hv)
            cross = np.cross(t_u, t_v)
            jac = np.linalg.norm(cross)
            if jac <= 1e-30 * max(1.0, np.linalg.norm(t_u) * np.linalg.norm(t_v)):
                raise ValueError(f"degenerate parametrization at (u, v)=({u}, {v})")
            pts.append(p)
            nrm.append(cross / jac)
            wts.append(jac * du * dv)

    points = np.array(pts)
    normals = np.array(nrm)
    weights = np.array(wts)

    centroid = points.mean(axis=0)
    outward = np.einsum("ij,ij->i", points - centroid, normals)
    normals[outward < 0] *= -1.0

    volume = float(np.einsum("ij,ij,i->", points - centroid, normals, weights)) / 3.0
    return CollocationMesh(
        points=points, normals=normals, weights=weights, volume=volume, center=centroid
    )


# ---------------------------------------------------------------------------
# Shape descriptor used by sweeps and the CLI
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeSpec:
    """Declarative body description that can build its own mesh.

    kind is one of "sphere", "ellipsoid", "cube".  For a sphere `a` is the
    radius, for an ellipsoid (a, b, c) are the semi-axes, for a cube `a` is
    the half side.  resolution is m_phi for sphere/ellipsoid and the
    per-face cell count for the cube.
    """

    kind: str
    a: float
    b: float | None = None
    c: float | None = None
    resolution: int = 12

    def __post_init__(self):
        if self.kind not in ("sphere", "ellipsoid", "cube"):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.kind == "ellipsoid" and (self.b is None or self.c is None):
            raise ValueError("ellipsoid needs all three semi-axes")

    def build(self, center=(0.0, 0.0, 0.0)) -> CollocationMesh:
        if self.kind == "sphere":
            return mesh_sphere(self.a, self.resolution, center)
        if self.kind == "ellipsoid":
            return mesh_ellipsoid(self.a, self.b, self.c, self.resolution, center)
        return mesh_cube(self.a, self.resolution, center)

    def scaled(self, factor: float) -> "ShapeSpec":
        """Same shape with all lengths multiplied by factor."""
        return ShapeSpec(
            kind=self.kind,
            a=self.a * factor,
            b=None if self.b is None else self.b * factor,
            c=None if self.c is None else self.c * factor,
            resolution=self.resolution,
        )
