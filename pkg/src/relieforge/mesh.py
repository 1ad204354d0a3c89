"""Heightfield tessellation, solidification, and mesh measurement.

The top surface splits every cell along its (r,c)->(r+1,c+1) diagonal in
a fixed row-major order, so output is deterministic and a closed-form
prism-sum volume oracle exists. close_solid welds a congruent base and
perimeter walls onto that surface to form a watertight, outward-oriented
solid; validate measures any mesh without modifying it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError
from .heightfield import HeightGrid

__all__ = [
    "TriangleMesh",
    "MeshReport",
    "InvertedSolidError",
    "DEFAULT_MIN_FEATURE",
    "tessellate_top",
    "close_solid",
    "validate",
    "analytic_volume",
]

#: Smallest printable feature size in mm; triangles below the derived
#: area floor are treated as degenerate.
DEFAULT_MIN_FEATURE = 0.001


class InvertedSolidError(GeometryError):
    """A height below the base plane would turn the solid inside out."""


@dataclass
class TriangleMesh:
    """Indexed triangle soup with outward per-triangle unit normals.

    Winding is counter-clockwise seen from outside, so
    normalize((v1-v0) x (v2-v0)) points out of the solid.
    ``degenerate_skipped`` records triangles dropped at build time
    (zero-area walls from flat borders); parsers leave it 0.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray
    degenerate_skipped: int = 0

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        n = np.ascontiguousarray(np.asarray(self.normals, dtype=np.float64).reshape(-1, 3))
        if len(n) != len(t):
            raise ValueError("need one normal per triangle")
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        self.vertices, self.triangles, self.normals = v, t, n

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-triangle corner coordinates (v0, v1, v2), each (T, 3)."""
        return (
            self.vertices[self.triangles[:, 0]],
            self.vertices[self.triangles[:, 1]],
            self.vertices[self.triangles[:, 2]],
        )


@dataclass
class MeshReport:
    """Validation and measurement summary for one mesh."""

    vertex_count: int
    triangle_count: int
    edge_count: int
    euler_characteristic: int
    watertight: bool
    signed_volume: float
    surface_area: float
    bbox_min: np.ndarray
    bbox_max: np.ndarray
    degenerate_count: int
    boundary_edge_count: int
    nonmanifold_edge_count: int


def _triangle_cross(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    return np.cross(v1 - v0, v2 - v0)


def _unit_normals(cross: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(cross, axis=1, keepdims=True)
    # Zero-area triangles get a zero normal instead of NaN.
    safe = np.where(norms == 0.0, 1.0, norms)
    return cross / safe


def _grid_vertices(g: HeightGrid, z: np.ndarray) -> np.ndarray:
    xs = np.broadcast_to(g.x, (g.rows, g.cols))
    ys = np.broadcast_to(g.y[:, None], (g.rows, g.cols))
    return np.column_stack([xs.ravel(), ys.ravel(), np.asarray(z, dtype=np.float64).ravel()])


def _cell_triangles(rows: int, cols: int, flip: bool) -> np.ndarray:
    """Index triples for the grid surface, row-major cells, 2 per cell.

    Per cell with corners A=(r,c), B=(r,c+1), C=(r+1,c), D=(r+1,c+1) the
    diagonal is A-D; emission order is (A,B,D) then (A,D,C), which winds
    counter-clockwise seen from +Z. ``flip`` reverses the winding for a
    downward-facing base.
    """
    r = np.arange(rows - 1).repeat(cols - 1)
    c = np.tile(np.arange(cols - 1), rows - 1)
    a = r * cols + c
    b = a + 1
    cc = a + cols
    d = cc + 1
    tris = np.empty(((rows - 1) * (cols - 1), 2, 3), dtype=np.int64)
    if flip:
        tris[:, 0, 0], tris[:, 0, 1], tris[:, 0, 2] = a, d, b
        tris[:, 1, 0], tris[:, 1, 1], tris[:, 1, 2] = a, cc, d
    else:
        tris[:, 0, 0], tris[:, 0, 1], tris[:, 0, 2] = a, b, d
        tris[:, 1, 0], tris[:, 1, 1], tris[:, 1, 2] = a, d, cc
    return tris.reshape(-1, 3)


def tessellate_top(g: HeightGrid) -> TriangleMesh:
    """Triangulate the height surface alone (open, not printable).

    One vertex per sample at (x[c], y[r], h[r,c]); normals face +Z-ward.
    """
    vertices = _grid_vertices(g, g.heights)
    triangles = _cell_triangles(g.rows, g.cols, flip=False)
    v0, v1, v2 = (vertices[triangles[:, k]] for k in range(3))
    normals = _unit_normals(_triangle_cross(v0, v1, v2))
    return TriangleMesh(vertices, triangles, normals)


def close_solid(
    g: HeightGrid, base_z: float = 0.0, min_feature: float = DEFAULT_MIN_FEATURE
) -> TriangleMesh:
    """Close the height surface into a printable solid.

    Adds a base grid congruent to the top at z = base_z (winding
    mirrored, normals -Z-ward) and perimeter walls joining the two rims.
    Vertices are deduplicated by exact coordinate equality, so walls of
    zero height collapse to zero-area triangles; those are skipped and
    counted in ``degenerate_skipped``. With every height above base_z
    the result is watertight with outward normals.
    """
    heights = g.heights
    if heights.min() < base_z:
        raise InvertedSolidError(
            f"height {heights.min()} lies below the base plane z={base_z}"
        )
    rows, cols = g.rows, g.cols
    n = rows * cols

    raw_vertices = np.vstack(
        [_grid_vertices(g, heights), _grid_vertices(g, np.full((rows, cols), float(base_z)))]
    )
    top = np.arange(n).reshape(rows, cols)
    base = top + n

    top_tris = _cell_triangles(rows, cols, flip=False)
    base_tris = _cell_triangles(rows, cols, flip=True) + n

    # Walls: two triangles per boundary edge, wound so normals face away
    # from the footprint. Fixed side order: south, north, west, east.
    walls = []
    for c in range(cols - 1):  # south rim, y = y[0], outward -y
        walls.append((base[0, c], base[0, c + 1], top[0, c + 1]))
        walls.append((base[0, c], top[0, c + 1], top[0, c]))
    for c in range(cols - 1):  # north rim, outward +y
        walls.append((base[-1, c + 1], base[-1, c], top[-1, c]))
        walls.append((base[-1, c + 1], top[-1, c], top[-1, c + 1]))
    for r in range(rows - 1):  # west rim, x = x[0], outward -x
        walls.append((base[r + 1, 0], base[r, 0], top[r, 0]))
        walls.append((base[r + 1, 0], top[r, 0], top[r + 1, 0]))
    for r in range(rows - 1):  # east rim, outward +x
        walls.append((base[r, -1], base[r + 1, -1], top[r + 1, -1]))
        walls.append((base[r, -1], top[r + 1, -1], top[r, -1]))
    wall_tris = np.array(walls, dtype=np.int64).reshape(-1, 3)

    triangles = np.vstack([top_tris, base_tris, wall_tris])

    vertices, remap = np.unique(raw_vertices, axis=0, return_inverse=True)
    triangles = remap.reshape(-1)[triangles.reshape(-1)].reshape(-1, 3)

    v0, v1, v2 = (vertices[triangles[:, k]] for k in range(3))
    cross = _triangle_cross(v0, v1, v2)
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    keep = areas >= min_feature * min_feature * 1e-6
    skipped = int(np.count_nonzero(~keep))

    return TriangleMesh(
        vertices,
        triangles[keep],
        _unit_normals(cross[keep]),
        degenerate_skipped=skipped,
    )


def validate(m: TriangleMesh, min_feature: float = DEFAULT_MIN_FEATURE) -> MeshReport:
    """Measure a mesh and decide whether it bounds a printable solid.

    Watertight means: at least one triangle, every undirected edge shared
    by exactly two triangles that traverse it in opposite directions, no
    repeated directed edge, and no self-loop edges. Signed volume is the
    divergence-theorem sum over triangles; a closed outward-wound solid
    yields a positive value.
    """
    t = m.triangles
    tri_count = len(t)

    if tri_count == 0:
        lo = np.zeros(3) if len(m.vertices) == 0 else m.vertices.min(axis=0)
        hi = np.zeros(3) if len(m.vertices) == 0 else m.vertices.max(axis=0)
        return MeshReport(
            vertex_count=len(m.vertices),
            triangle_count=0,
            edge_count=0,
            euler_characteristic=len(m.vertices),
            watertight=False,
            signed_volume=0.0,
            surface_area=0.0,
            bbox_min=lo,
            bbox_max=hi,
            degenerate_count=int(m.degenerate_skipped),
            boundary_edge_count=0,
            nonmanifold_edge_count=0,
        )

    v0, v1, v2 = m.corners()
    cross = _triangle_cross(v0, v1, v2)
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    degenerate = int(np.count_nonzero(areas < min_feature * min_feature * 1e-6))

    # Directed edge list: (a,b), (b,c), (c,a) per triangle, encoded into
    # one int64 each so uniqueness checks are single np.unique calls.
    nv = len(m.vertices)
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    self_loops = int(np.count_nonzero(directed[:, 0] == directed[:, 1]))
    dir_codes = directed[:, 0] * nv + directed[:, 1]
    _, dir_counts = np.unique(dir_codes, return_counts=True)
    directed_dup = bool((dir_counts > 1).any())

    und = np.sort(directed, axis=1)
    und_codes = und[:, 0] * nv + und[:, 1]
    und_unique, und_counts = np.unique(und_codes, return_counts=True)
    edge_count = len(und_unique)
    boundary = int(np.count_nonzero(und_counts == 1))
    nonmanifold = int(np.count_nonzero(und_counts > 2))

    watertight = (
        boundary == 0
        and nonmanifold == 0
        and not directed_dup
        and self_loops == 0
    )

    signed_volume = float(np.einsum("ij,ij->", v0, np.cross(v1, v2)) / 6.0)
    return MeshReport(
        vertex_count=nv,
        triangle_count=tri_count,
        edge_count=edge_count,
        euler_characteristic=nv - edge_count + tri_count,
        watertight=watertight,
        signed_volume=signed_volume,
        surface_area=float(areas.sum()),
        bbox_min=m.vertices.min(axis=0),
        bbox_max=m.vertices.max(axis=0),
        degenerate_count=degenerate + int(m.degenerate_skipped),
        boundary_edge_count=boundary,
        nonmanifold_edge_count=nonmanifold,
    )


def analytic_volume(g: HeightGrid, base_z: float = 0.0) -> float:
    """Closed-form volume of close_solid(g, base_z), cell by cell.

    Each triangle of the fixed diagonal split contributes
    (cell area / 2) * (mean corner height - base_z); its oblique top is
    planar, so the prism mean is exact, not an approximation.
    """
    h = g.heights
    if h.min() < base_z:
        raise InvertedSolidError(f"height {h.min()} lies below the base plane z={base_z}")
    wx = np.diff(g.x)  # actual cell widths, not the nominal dx
    wy = np.diff(g.y)
    cell_area = wy[:, None] * wx[None, :]
    tri_acd = (h[:-1, :-1] + h[1:, :-1] + h[1:, 1:]) / 3.0 - base_z
    tri_abd = (h[:-1, :-1] + h[:-1, 1:] + h[1:, 1:]) / 3.0 - base_z
    return float(np.sum(cell_area / 2.0 * (tri_acd + tri_abd)))
