"""Triangle meshes of truncated surfaces.

Sphere domains are meshed in the z-plane: log-polar rings around each finite
puncture, a Cartesian core grid and log-polar rings out to ``r_max``, joined by
a Delaunay triangulation with the puncture disks removed.

Curve domains need cuts on the real axis. Each half-plane is meshed with a
graded tensor grid, copied to both sheets (``w = ±w_plus`` with the limit from
that half-plane on the axis), and the four patches are welded where their
``(z, w)`` agree. ``f`` is then propagated over a breadth-first spanning tree,
integrating the ``dz/w`` parts along each tree edge.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.spatial import Delaunay, cKDTree
from scipy.special import roots_legendre

from hsurf.config import DEFAULT_CONFIG, NumericsConfig
from hsurf.evaluation.evaluate import Evaluator, evaluate_many
from hsurf.surfaces.domains import Domain, SheetPoint, puncture_radius
from hsurf.surfaces.forms import SurfaceData

logger = logging.getLogger(__name__)

# Gauss–Legendre nodes per mesh edge
_EDGE_GL: int = 8

# Relative distance under which curve-patch vertices are welded
_WELD_TOL: float = 1e-9


@dataclass(frozen=True)
class Region:
    """Truncation of the domain: disks of radius ``r_min`` around finite
    punctures are removed and ``|z| ≤ r_max`` is kept."""

    r_min: float = 0.05
    r_max: float = 10.0

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError(f"Region needs 0 < r_min < r_max, got ({self.r_min}, {self.r_max})")

    @classmethod
    def parse(cls, text: str) -> Region:
        """``"r_min,r_max"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"Region must be 'r_min,r_max', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))


@dataclass
class TriMesh:
    """Triangle mesh with the source parameters of every vertex."""

    vertices: np.ndarray  # (n, 3)
    triangles: np.ndarray  # (m, 3)
    z: np.ndarray  # (n,) complex
    sheet: np.ndarray  # (n,) int; 0 on the sphere and at ramified points
    normals: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def bbox_diag(self) -> float:
        if self.n_vertices == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def source(self, i: int) -> SheetPoint:
        return SheetPoint(complex(self.z[i]), int(self.sheet[i]))

    # --- Topology ---

    def edges(self) -> np.ndarray:
        """Unique undirected edges, shape ``(e, 2)`` with ``e[:, 0] < e[:, 1]``."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def boundary_edges(self) -> np.ndarray:
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        uniq, counts = np.unique(e, axis=0, return_counts=True)
        return uniq[counts == 1]

    def boundary_loops(self) -> int:
        """Number of boundary components."""
        b = self.boundary_edges()
        if len(b) == 0:
            return 0
        verts, inv = np.unique(b, return_inverse=True)
        inv = inv.reshape(-1, 2)
        n = len(verts)
        graph = coo_matrix((np.ones(len(inv)), (inv[:, 0], inv[:, 1])), shape=(n, n))
        n_comp, _ = connected_components(graph, directed=False)
        return int(n_comp)

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges()) + self.n_triangles

    # --- Geometry ---

    def face_normals(self) -> np.ndarray:
        """Unnormalised face normals (twice the area)."""
        v = self.vertices[self.triangles]
        return np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])

    def compute_normals(self) -> np.ndarray:
        """Area-weighted vertex normals."""
        fn = self.face_normals()
        out = np.zeros_like(self.vertices)
        for k in range(3):
            np.add.at(out, self.triangles[:, k], fn)
        norm = np.linalg.norm(out, axis=1, keepdims=True)
        self.normals = out / np.where(norm > 0, norm, 1.0)
        return self.normals

    def vertex_scale(self) -> np.ndarray:
        """Mean image length of the edges at each vertex."""
        e = self.edges()
        return self._edge_mean(e, np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1))

    def parameter_scale(self) -> np.ndarray:
        """Mean ``|Δz|`` of the edges at each vertex."""
        e = self.edges()
        return self._edge_mean(e, np.abs(self.z[e[:, 0]] - self.z[e[:, 1]]))

    def _edge_mean(self, e: np.ndarray, length: np.ndarray) -> np.ndarray:
        total = np.zeros(self.n_vertices)
        count = np.zeros(self.n_vertices)
        for k in range(2):
            np.add.at(total, e[:, k], length)
            np.add.at(count, e[:, k], 1)
        return total / np.maximum(count, 1)

    def drop_degenerate(self, rel_area: float = 1e-14) -> TriMesh:
        """Remove triangles of area ``≤ rel_area · bbox²`` and unused vertices."""
        finite = np.all(np.isfinite(self.vertices[self.triangles]), axis=(1, 2))
        good = self.vertices[np.all(np.isfinite(self.vertices), axis=1)]
        diag = float(np.linalg.norm(good.max(axis=0) - good.min(axis=0))) if len(good) else 0.0
        with np.errstate(invalid="ignore"):
            area = 0.5 * np.linalg.norm(self.face_normals(), axis=1)
            keep = finite & (area > rel_area * diag**2)
        return self._subset(keep)

    def _subset(self, keep: np.ndarray) -> TriMesh:
        tris = self.triangles[keep]
        used = np.unique(tris)
        remap = -np.ones(self.n_vertices, dtype=int)
        remap[used] = np.arange(len(used))
        normals = None if self.normals is None else self.normals[used]
        return TriMesh(self.vertices[used], remap[tris], self.z[used], self.sheet[used], normals)


# ---------------------------------------------------------------------------
# Parameter-space meshes
# ---------------------------------------------------------------------------


def _ring_count(r0: float, r1: float, ratio: float) -> int:
    return max(1, int(np.ceil(np.log(r1 / r0) / np.log(ratio))))


def sphere_parameter_mesh(d: Domain, region: Region, density: int) -> tuple[np.ndarray, np.ndarray]:
    """``(z, triangles)`` covering the truncated sphere domain."""
    n_theta = 4 * int(np.ceil(density / 4))
    ratio = 1 + 2 * np.pi / n_theta
    angles = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    finite = [p.z for p in d.punctures if not p.is_infinity]
    core_r = min(region.r_max, 2.0 * max((abs(c) for c in finite), default=0.0) + 2.0)

    pts = []
    disks = []
    for c in finite:
        rho = max(puncture_radius(d, c), 1.5 * region.r_min)
        radii = np.geomspace(region.r_min, rho, _ring_count(region.r_min, rho, ratio) + 1)
        pts.append((c + radii[:, None] * angles[None, :]).ravel())
        disks.append((c, rho))

    m = max(4, density // 2)
    g = np.linspace(-core_r, core_r, 2 * m + 1)
    h = g[1] - g[0]
    grid = (g[None, :] + 1j * g[:, None]).ravel()
    keep = np.abs(grid) <= core_r - 0.3 * h
    for c, rho in disks:
        keep &= np.abs(grid - c) >= rho + 0.3 * h
    pts.append(grid[keep])

    if region.r_max > core_r:
        radii = np.geomspace(core_r, region.r_max, _ring_count(core_r, region.r_max, ratio) + 1)
    else:
        radii = np.array([core_r])
    pts.append((radii[:, None] * angles[None, :]).ravel())

    z = np.concatenate(pts)
    z = z[np.abs(z) <= region.r_max * (1 + 1e-12)]
    tri = Delaunay(np.column_stack([z.real, z.imag])).simplices
    cent = z[tri].mean(axis=1)
    keep = np.ones(len(tri), dtype=bool)
    for c in finite:
        keep &= np.abs(cent - c) >= region.r_min
    return z, tri[keep]


def _graded_nodes(centers: list[float], radii: list[float], lo: float, hi: float, n: int, r0s: list[float]) -> np.ndarray:
    """Uniform nodes on ``[lo, hi]`` with geometric clustering about each center."""
    nodes = [np.linspace(lo, hi, n + 1)]
    for c, rho in zip(centers, radii, strict=True):
        nodes[0] = nodes[0][np.abs(nodes[0] - c) >= rho]
    for c, rho, r0 in zip(centers, radii, r0s, strict=True):
        offs = np.geomspace(r0, rho, _ring_count(r0, rho, 1.35) + 1)
        nodes.append(np.concatenate([[c], c - offs, c + offs]))
    out = np.sort(np.concatenate(nodes))
    out = out[(out >= lo) & (out <= hi)]
    keep = np.concatenate([[True], np.diff(out) > 1e-9 * (1 + np.abs(out[1:]))])
    return out[keep]


def _grid_triangles(nx: int, ny: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="xy")
    v00 = (j * nx + i).ravel()
    v10, v01, v11 = v00 + 1, v00 + nx, v00 + nx + 1
    return np.concatenate([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])


def curve_parameter_mesh(
    d: Domain, region: Region, density: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(z, w, triangles)`` of the welded four-patch mesh of a curve domain.

    Raises
    ------
    ValueError
        If a branch point or finite puncture is off the real axis.
    """
    specials = d.special_points()
    if any(abs(c.imag) > 1e-12 for c in specials):
        raise ValueError("Curve meshes need every branch point and puncture on the real axis")
    xs = [c.real for c in specials]
    punct = {round(p.z.real, 12) for p in d.punctures if not p.is_infinity}
    rhos = [puncture_radius(d, c) for c in specials]
    r0s = [region.r_min / 2 if round(x, 12) in punct else 1e-3 * rho for x, rho in zip(xs, rhos, strict=True)]

    big = region.r_max
    xn = _graded_nodes(xs, rhos, -big, big, density, r0s)
    yn = _graded_nodes([0.0], [max(rhos, default=1.0)], 0.0, big, max(4, density // 2), [min(r0s, default=1e-3)])
    yn = yn[yn >= 0]

    X, Y = np.meshgrid(xn, yn, indexing="xy")
    z_up = (X + 1j * Y).ravel()
    tri_up = _grid_triangles(len(xn), len(yn))
    n = len(z_up)
    zs, ws, tris = [], [], []
    patches = [(1, 1), (1, -1), (-1, 1), (-1, -1)]  # (sheet, half-plane)
    for k, (sheet, side) in enumerate(patches):
        zz = z_up if side == 1 else np.conj(z_up)
        tt = tri_up if side == 1 else tri_up[:, [0, 2, 1]]
        bad = np.zeros(n, dtype=bool)
        for p in d.punctures:
            if not p.is_infinity and p.sheet in (0, sheet):
                bad |= np.abs(zz - p.z) < region.r_min
        zs.append(zz)
        ws.append(sheet * np.asarray(d.w_plus(zz, side)))
        tris.append(tt[~np.any(bad[tt], axis=1)] + k * n)
    z = np.concatenate(zs)
    w = np.concatenate(ws)
    tri = np.concatenate(tris)
    return _weld(z, w, tri)


def _weld(z: np.ndarray, w: np.ndarray, tri: np.ndarray):
    keys = np.column_stack([z.real, z.imag, w.real, w.imag])
    scale = 1 + np.abs(keys).max()
    pairs = cKDTree(keys).query_pairs(_WELD_TOL * scale, output_type="ndarray")
    n = len(z)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
    _, label = connected_components(graph, directed=False)
    _, rep = np.unique(label, return_index=True)
    tri = label[tri]
    ok = (tri[:, 0] != tri[:, 1]) & (tri[:, 1] != tri[:, 2]) & (tri[:, 0] != tri[:, 2])
    tri = tri[ok]
    used = np.unique(tri)
    remap = -np.ones(len(rep), dtype=int)
    remap[used] = np.arange(len(used))
    logger.debug(f"Welded {n} patch vertices into {len(used)}")
    return z[rep[used]], w[rep[used]], remap[tri]


# ---------------------------------------------------------------------------
# Values on curve meshes
# ---------------------------------------------------------------------------


def _nearest_roots(pz: np.ndarray, guess: np.ndarray) -> np.ndarray:
    r = np.sqrt(pz.astype(complex))
    return np.where(np.abs(r - guess) <= np.abs(r + guess), r, -r)


def edge_integrals(
    s: SurfaceData, z0: np.ndarray, w0: np.ndarray, z1: np.ndarray, w1: np.ndarray
) -> np.ndarray:
    """``Re ∫ b/w dz`` of each form along the edges ``(z0, w0) → (z1, w1)``.

    Edges starting or ending at a branch point (``w = 0``) are integrated in
    the square-root variable from that end.
    """
    p = s.domain.branch_poly
    x, wx = roots_legendre(_EDGE_GL)
    sig = 0.5 * (x + 1)
    wsig = 0.5 * wx
    tiny = 1e-12 * (1 + np.abs(w0) + np.abs(w1))
    from_start = np.abs(w0) <= tiny
    from_end = (np.abs(w1) <= tiny) & ~from_start
    flip = from_end
    a = np.where(flip, z1, z0)[:, None]
    b = np.where(flip, z0, z1)[:, None]
    wa = np.where(flip, w1, w0)[:, None]
    wb = np.where(flip, w0, w1)[:, None]
    ramified = (from_start | from_end)[:, None]

    sq = sig[None, :]
    zq = np.where(ramified, a + (b - a) * sq**2, a + (b - a) * sq)
    guess = np.where(ramified, sq * wb, wa + (wb - wa) * sq)
    wq = _nearest_roots(p(zq), guess)
    jac = np.where(ramified, 2 * sq * (b - a), (b - a))
    out = np.zeros((len(z0), 3))
    for i, f in enumerate(s.omega):
        if not f.has_w:
            continue
        val = np.sum(wsig[None, :] * f.b(zq) / wq * jac, axis=1)
        out[:, i] = np.where(flip, -val.real, val.real)
    return out


def curve_values(
    s: SurfaceData, z: np.ndarray, w: np.ndarray, tri: np.ndarray, evaluator: Evaluator
) -> np.ndarray:
    """``f`` at every vertex of a welded curve mesh."""
    n = len(z)
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    graph = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    n_comp, label = connected_components(graph, directed=False)
    f_b = np.full((n, 3), np.nan)
    base = evaluator.basepoint.z
    regular = np.abs(w) > 1e-9
    for comp in range(n_comp):
        members = np.flatnonzero((label == comp) & regular)
        if not members.size:
            continue
        root = members[np.argmin(np.abs(z[members] - base))]
        sheet = int(s.domain.sheet_of(z[root], w[root]))
        f_b[root] = evaluator.f_b(SheetPoint(complex(z[root]), sheet))
        order, pred = breadth_first_order(graph, root, directed=False, return_predecessors=True)
        child = order[1:]
        parent = pred[child]
        inc = edge_integrals(s, z[parent], w[parent], z[child], w[child])
        for k, v in enumerate(child):
            f_b[v] = f_b[parent[k]] + inc[k]
    return evaluator.f_a(z) - evaluator._offset + f_b


# ---------------------------------------------------------------------------
# Public
# ---------------------------------------------------------------------------


def build_mesh(
    s: SurfaceData,
    region: Region | None = None,
    density: int | None = None,
    config: NumericsConfig = DEFAULT_CONFIG,
    with_normals: bool = True,
) -> TriMesh:
    """Mesh ``f`` over the truncated domain.

    Parameters
    ----------
    s : SurfaceData
    region : Region, optional
        Defaults to ``Region()``.
    density : int, optional
        Samples per full turn around a puncture and grid cells across the core.
        Defaults to ``config.mesh_density``.
    config : NumericsConfig
    with_normals : bool
        Compute area-weighted vertex normals.
    """
    region = region or Region()
    density = density or config.mesh_density
    d = s.domain
    ev = Evaluator(s, config)
    if d.is_sphere:
        z, tri = sphere_parameter_mesh(d, region, density)
        vertices = evaluate_many(s, z, evaluator=ev)
        sheet = np.zeros(len(z), dtype=int)
    else:
        z, w, tri = curve_parameter_mesh(d, region, density)
        vertices = curve_values(s, z, w, tri, ev)
        ramified = np.abs(w) <= 1e-9
        sheet = np.where(ramified, 0, d.sheet_of(z, np.where(ramified, 1.0, w))).astype(int)
    mesh = TriMesh(np.asarray(vertices, dtype=float), np.asarray(tri, dtype=int), z, sheet).drop_degenerate()
    if with_normals:
        mesh.compute_normals()
    logger.info(f"{s.label}: mesh with {mesh.n_vertices} vertices and {mesh.n_triangles} triangles")
    return mesh


__all__ = [
    "Region",
    "TriMesh",
    "build_mesh",
    "curve_parameter_mesh",
    "curve_values",
    "edge_integrals",
    "sphere_parameter_mesh",
]
