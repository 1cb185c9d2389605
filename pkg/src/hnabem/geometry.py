"""Scene geometry: the convex polygon, the small obstacles, and their parametrizations.

All boundaries are unit-speed arclength-parametrized collections of straight
pieces.  The polygon's side j covers global arclength [Ltilde_{j-1}, Ltilde_j);
obstacle boundaries are concatenated in declaration order into one gamma
parameter interval [0, L_gamma).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, NonConvex, OutOfRange

_EPS = 1e-12


@dataclass(frozen=True)
class StraightPiece:
    """One straight boundary segment in a global arclength parametrization."""

    s0: float          # global arclength at the start point
    length: float
    x0: np.ndarray     # (2,) start point
    tau: np.ndarray    # (2,) unit tangent
    normal: np.ndarray  # (2,) unit normal, pointing into the exterior domain
    parent: int        # side index on Gamma / obstacle index on gamma

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return self.x0 + (s - self.s0)[..., None] * self.tau

    @property
    def s1(self):
        return self.s0 + self.length

    @property
    def end(self):
        return self.x0 + self.length * self.tau


def _as_vertices(vertices):
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise Degenerate("vertices must be an (n, 2) array")
    if not np.all(np.isfinite(v)):
        raise Degenerate("non-finite vertex coordinates")
    return v


def _pieces_from_loop(vertices, parent_of=None):
    """Straight pieces for a closed CCW vertex loop (first vertex not repeated)."""
    v = vertices
    n = len(v)
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    pieces = []
    s0 = 0.0
    for j in range(n):
        tau = edges[j] / lengths[j]
        normal = np.array([tau[1], -tau[0]])
        pid = j if parent_of is None else parent_of
        pieces.append(StraightPiece(s0, float(lengths[j]), v[j].copy(), tau, normal, pid))
        s0 += float(lengths[j])
    return pieces, lengths, s0


def _signed_area(vertices):
    v = vertices
    w = np.roll(v, -1, axis=0)
    return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]))


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon, vertices counter-clockwise.

    side_lengths[j], outward_normals[j] etc. describe side j from vertex j to
    vertex j+1 (indices 0-based; vertex n == vertex 0).
    """

    vertices: np.ndarray
    side_lengths: np.ndarray
    cumulative_lengths: np.ndarray   # Ltilde_j = sum_{l<=j} L_l, length n
    outward_normals: np.ndarray
    tangents: np.ndarray
    exterior_angles: np.ndarray      # Omega_j at vertex j, in (pi, 2 pi)
    perimeter: float
    pieces: tuple = field(repr=False, default=())

    @property
    def n_sides(self):
        return len(self.side_lengths)

    def side_of(self, s):
        """Side index containing arclength s (arrays supported)."""
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.cumulative_lengths, s, side="right")
        return np.minimum(idx, self.n_sides - 1)

    def point(self, s):
        """Boundary point x_Gamma(s) (arrays supported)."""
        s = np.asarray(s, dtype=float)
        j = self.side_of(s)
        start = np.concatenate(([0.0], self.cumulative_lengths[:-1]))
        local = (s - start[j]) / self.side_lengths[j]
        return self.vertices[j] + local[..., None] * (
            self.vertices[(np.asarray(j) + 1) % self.n_sides] - self.vertices[j])

    def normal_at(self, s):
        return self.outward_normals[self.side_of(s)]

    def contains(self, points):
        """Strict interior test (points: (..., 2)) for a convex CCW polygon."""
        p = np.asarray(points, dtype=float)
        inside = np.ones(p.shape[:-1], dtype=bool)
        for j in range(self.n_sides):
            rel = p - self.vertices[j]
            inside &= rel @ self.outward_normals[j] < 0.0
        return inside


def build_polygon(vertices) -> ConvexPolygon:
    """Validate a CCW strictly convex vertex loop and derive all side data.

    Raises NonConvex (a cross product of consecutive edges <= 0) or
    Degenerate (too few / repeated vertices) before constructing anything.
    """
    v = _as_vertices(vertices)
    n = len(v)
    if n < 3:
        raise Degenerate("need at least 3 vertices")
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    scale = float(np.max(lengths)) if np.max(lengths) > 0 else 1.0
    if np.any(lengths <= _EPS * scale):
        raise Degenerate("repeated vertices")
    cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - \
        edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    if np.any(cross <= _EPS * scale * scale):
        raise NonConvex("vertices are not in strictly convex counter-clockwise position")

    pieces, lengths, perim = _pieces_from_loop(v)
    tangents = np.array([p.tau for p in pieces])
    normals = np.array([p.normal for p in pieces])
    # Exterior angle at vertex j is the angle swept outside the polygon
    # between the sides meeting there: Omega_j = 2 pi - interior angle.
    interior = np.empty(n)
    for j in range(n):
        a = -tangents[j - 1]
        b = tangents[j]
        interior[j] = np.arccos(np.clip(a @ b, -1.0, 1.0))
    exterior = 2.0 * np.pi - interior
    return ConvexPolygon(
        vertices=v,
        side_lengths=np.asarray(lengths, dtype=float),
        cumulative_lengths=np.cumsum(lengths),
        outward_normals=normals,
        tangents=tangents,
        exterior_angles=exterior,
        perimeter=float(perim),
        pieces=tuple(pieces),
    )


def param_gamma_big(poly: ConvexPolygon, s: float):
    """x_Gamma(s) with its side index and outward normal, s in [0, L_Gamma)."""
    if not (0.0 <= s < poly.perimeter):
        raise OutOfRange(f"s={s} outside [0, {poly.perimeter})")
    j = int(poly.side_of(s))
    return poly.point(s), j, poly.outward_normals[j]


@dataclass(frozen=True)
class SmallObstacle:
    """Closed simple polyline obstacle (sampled analytic curves included).

    Input vertices are normalized to counter-clockwise order so that the
    computed normals point away from the obstacle interior.  `smooth=True`
    marks a densely-sampled analytic curve: meshing then skips corner
    grading.
    """

    vertices: np.ndarray
    smooth: bool = False

    def __post_init__(self):
        v = _as_vertices(self.vertices)
        if len(v) < 3:
            raise Degenerate("obstacle needs at least 3 vertices")
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.linalg.norm(edges, axis=1)
        if np.any(lengths <= _EPS * max(np.max(lengths), 1.0)):
            raise Degenerate("repeated obstacle vertices")
        if _signed_area(v) < 0.0:
            v = v[::-1].copy()
        if not _simple_loop(v):
            raise Degenerate("obstacle polyline is self-intersecting")
        object.__setattr__(self, "vertices", v)

    @property
    def perimeter(self):
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.linalg.norm(edges, axis=1)))

    def pieces(self, s_offset=0.0, parent=0):
        pieces, _, _ = _pieces_from_loop(self.vertices, parent_of=parent)
        if s_offset:
            pieces = [StraightPiece(p.s0 + s_offset, p.length, p.x0, p.tau,
                                    p.normal, p.parent) for p in pieces]
        return pieces

    def contains(self, points):
        return _winding_inside(self.vertices, points)

    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]
        area = 0.5 * np.sum(cr)
        cx = np.sum((v[:, 0] + w[:, 0]) * cr) / (6.0 * area)
        cy = np.sum((v[:, 1] + w[:, 1]) * cr) / (6.0 * area)
        return np.array([cx, cy])


def _segments_intersect(p1, p2, q1, q2):
    d1 = p2 - p1
    d2 = q2 - q1
    den = d1[0] * d2[1] - d1[1] * d2[0]
    rel = q1 - p1
    if abs(den) < 1e-15:
        return False
    t = (rel[0] * d2[1] - rel[1] * d2[0]) / den
    u = (rel[0] * d1[1] - rel[1] * d1[0]) / den
    return 1e-12 < t < 1 - 1e-12 and 1e-12 < u < 1 - 1e-12


def _simple_loop(v):
    n = len(v)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                return False
    return True


def _winding_inside(loop, points):
    """Winding-number interior test for a closed vertex loop, vectorized."""
    p = np.asarray(points, dtype=float)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    wind = np.zeros(len(p))
    v = loop
    for j in range(len(v)):
        a, b = v[j], v[(j + 1) % len(v)]
        cross = (b[0] - a[0]) * (p[:, 1] - a[1]) - (b[1] - a[1]) * (p[:, 0] - a[0])
        up = (a[1] <= p[:, 1]) & (b[1] > p[:, 1]) & (cross > 0)
        dn = (b[1] <= p[:, 1]) & (a[1] > p[:, 1]) & (cross < 0)
        wind += up.astype(float) - dn.astype(float)
    inside = wind != 0
    return inside[0] if single else inside


def _seg_seg_distance(a0, a1, b0, b1):
    """Distance between two segments with witness parameters (t_a, t_b)."""
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = d1 @ d1
    e = d2 @ d2
    f = d2 @ r
    c = d1 @ r
    b = d1 @ d2
    den = a * e - b * b
    if den > 1e-14 * max(a * e, 1e-300):
        s = np.clip((b * f - c * e) / den, 0.0, 1.0)
    else:
        s = 0.0
    t = (b * s + f) / e if e > 0 else 0.0
    if t < 0.0:
        t = 0.0
        s = np.clip(-c / a, 0.0, 1.0) if a > 0 else 0.0
    elif t > 1.0:
        t = 1.0
        s = np.clip((b - c) / a, 0.0, 1.0) if a > 0 else 0.0
    p = a0 + s * d1
    q = b0 + t * d2
    return float(np.linalg.norm(p - q)), float(s), float(t)


@dataclass(frozen=True)
class Scene:
    """Full scattering configuration.

    polygon   : the large convex polygon Omega (boundary Gamma)
    obstacles : small obstacles omega_i (combined boundary gamma)
    k         : wavenumber (> 0)
    d         : unit incident plane-wave direction
    eta       : coupling parameter of the combined formulation (default k)
    """

    polygon: ConvexPolygon
    obstacles: tuple
    k: float
    d: np.ndarray
    eta: float

    def __post_init__(self):
        if self.k <= 0:
            raise Degenerate("wavenumber must be positive")
        d = np.asarray(self.d, dtype=float)
        nd = np.linalg.norm(d)
        if nd == 0:
            raise Degenerate("zero incident direction")
        object.__setattr__(self, "d", d / nd)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for i, ob in enumerate(self.obstacles):
            if self.polygon.contains(ob.centroid()):
                raise Degenerate(f"obstacle {i} lies inside the polygon")
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                d_ij = _loop_distance(self.obstacles[i].vertices, self.obstacles[j].vertices)
                if d_ij <= 0.0:
                    raise Degenerate(f"obstacles {i} and {j} touch or overlap")
        if self.obstacles and self.separation() <= 0.0:
            raise Degenerate("polygon and obstacles touch or overlap")
        if self.obstacles and not self.separation_ok:
            warnings.warn(
                f"separation {self.separation():.4g} < 1/k = {1.0 / self.k:.4g}; "
                "corner-singularity exponents may differ from the single-scatterer theory",
                stacklevel=2)

    @property
    def gamma_pieces(self):
        pieces = []
        s0 = 0.0
        for i, ob in enumerate(self.obstacles):
            ps = ob.pieces(s_offset=s0, parent=i)
            pieces.extend(ps)
            s0 = ps[-1].s1
        return pieces

    @property
    def gamma_length(self):
        return float(sum(ob.perimeter for ob in self.obstacles))

    def separation(self) -> float:
        """dist(Gamma, gamma): min segment/segment distance."""
        best = np.inf
        gv = self.polygon.vertices
        for i in range(len(gv)):
            a0, a1 = gv[i], gv[(i + 1) % len(gv)]
            for ob in self.obstacles:
                ov = ob.vertices
                for j in range(len(ov)):
                    dist, _, _ = _seg_seg_distance(a0, a1, ov[j], ov[(j + 1) % len(ov)])
                    best = min(best, dist)
        return float(best)

    @property
    def separation_ok(self) -> bool:
        """Separation condition dist(Gamma, gamma) >= 1/k."""
        if not self.obstacles:
            return True
        return self.separation() >= 1.0 / self.k

    def param_gamma_small(self, s: float):
        """Point on gamma with obstacle index and normal, s in [0, L_gamma)."""
        if not self.obstacles:
            raise OutOfRange("scene has no small obstacles")
        L = self.gamma_length
        if not (0.0 <= s < L):
            raise OutOfRange(f"s={s} outside [0, {L})")
        for piece in self.gamma_pieces:
            if s < piece.s1 or piece is self.gamma_pieces[-1]:
                return piece.point(s), piece.parent, piece.normal
        raise OutOfRange(f"s={s} not located")  # pragma: no cover

    def incident(self, x):
        """u^i(x) = e^{i k x . d}, vectorized over (..., 2)."""
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.k * (x @ self.d))

    def exterior_mask(self, points):
        """True where a point lies strictly outside every scatterer."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        mask = ~self.polygon.contains(p)
        for ob in self.obstacles:
            mask &= ~ob.contains(p)
        return mask


def _loop_distance(va, vb):
    best = np.inf
    for i in range(len(va)):
        for j in range(len(vb)):
            d, _, _ = _seg_seg_distance(va[i], va[(i + 1) % len(va)],
                                        vb[j], vb[(j + 1) % len(vb)])
            best = min(best, d)
    return best


def make_scene(polygon_vertices, obstacle_vertex_lists, k, d, eta=None,
               smooth_flags=None) -> Scene:
    """Convenience constructor from raw vertex data; eta defaults to k."""
    poly = build_polygon(polygon_vertices)
    smooth_flags = smooth_flags or [False] * len(obstacle_vertex_lists)
    obstacles = tuple(SmallObstacle(v, smooth=sm)
                      for v, sm in zip(obstacle_vertex_lists, smooth_flags))
    return Scene(polygon=poly, obstacles=obstacles, k=float(k),
                 d=np.asarray(d, dtype=float),
                 eta=float(k) if eta is None else float(eta))


def separation(scene: Scene) -> float:
    """dist(Gamma, gamma) of a scene (module-level form)."""
    return scene.separation()


def upper_half_plane_indicator(poly: ConvexPolygon, j: int, y) -> bool:
    """True iff y lies strictly beyond the infinite line through side j.

    This is the open relative upper half-plane U_j; points exactly on the
    line report False.  Vectorized over y with shape (..., 2).
    """
    if not (0 <= j < poly.n_sides):
        raise OutOfRange(f"side index {j} out of range")
    y = np.asarray(y, dtype=float)
    val = (y - poly.vertices[j]) @ poly.outward_normals[j]
    return val > 0.0 if val.ndim == 0 else val > 0.0


def physical_optics(scene: Scene, s):
    """Physical-optics trace Psi(x_Gamma(s)): 2 du^i/dn on lit sides, else 0.

    A side is lit when d . n_j < 0; grazing incidence (d . n_j = 0) counts
    as shadow.  Vectorized over s.
    """
    s = np.asarray(s, dtype=float)
    j = scene.polygon.side_of(s)
    n = scene.polygon.outward_normals[j]
    dn = n @ scene.d
    x = scene.polygon.point(s)
    lit = dn < 0.0
    return np.where(lit, 2j * scene.k * dn * scene.incident(x), 0.0 + 0.0j)
