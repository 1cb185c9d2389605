"""Approximation spaces: the single-mesh HNA space on Gamma and hp spaces on gamma.

Basis functions are Legendre polynomials on single mesh elements, multiplied
on Gamma by the oscillatory phases e^{+-iks} (s the global arclength).  On
each side the symmetric graded mesh carries both phase directions except on
the elements within x_n~ of a corner, where only the family that does not
need to vanish there is retained: e^{+iks} near the side start, e^{-iks}
near the side end.  The removal threshold is

    x_n~ = max{ x_i in mesh : x_i <= alpha * 2 pi / k },

with 0 < alpha < L k / (4 pi).
"""

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, BadIndex
from .geometry import Scene, ConvexPolygon, StraightPiece
from .mesh import degree_vector, graded_mesh, quasi_uniform_mesh, subdivide_for_oscillation

GAMMA_BIG = "Gamma"
GAMMA_SMALL = "gamma"


@dataclass(frozen=True)
class Element:
    """One mesh element: an arclength interval on a straight piece."""

    boundary: str
    piece_id: int   # index into BasisSpace.pieces
    a: float
    b: float
    degree: int
    index: int

    @property
    def width(self):
        return self.b - self.a

    def midpoint_s(self):
        return 0.5 * (self.a + self.b)


@dataclass(frozen=True)
class BasisFunction:
    boundary: str
    element: int    # index into BasisSpace.elements
    degree: int     # Legendre degree of this function
    direction: int  # +1 / -1 oscillation on Gamma, 0 on gamma
    dof: int


class BasisSpace:
    """Indexed basis over a list of straight pieces.

    functions are ordered element by element (arclength order), direction
    +1 before -1, degrees ascending; DOF indices are contiguous from 0.
    """

    def __init__(self, boundary, pieces, elements, functions, k, meta=None):
        self.boundary = boundary
        self.pieces = list(pieces)
        self.elements = list(elements)
        self.functions = list(functions)
        self.k = float(k)
        self.meta = meta or {}
        self._el_funcs = [[] for _ in self.elements]
        for f in self.functions:
            self._el_funcs[f.element].append(f)

    @property
    def n_dofs(self):
        return len(self.functions)

    def functions_on(self, element_index):
        return self._el_funcs[element_index]

    def piece_of(self, element):
        return self.pieces[element.piece_id]

    def point(self, element, s):
        return self.piece_of(element).point(s)

    def eval_dof(self, dof, s):
        """Basis function `dof` at arclength s (array ok); zero off-support."""
        if not (0 <= dof < self.n_dofs):
            raise BadIndex(f"dof {dof} out of range")
        f = self.functions[dof]
        el = self.elements[f.element]
        s = np.asarray(s, dtype=float)
        t = (2.0 * (s - el.a) / el.width) - 1.0
        inside = (s >= el.a) & (s < el.b)
        vals = legendre_values(f.degree, np.where(inside, t, 0.0))[..., -1]
        if f.direction:
            vals = vals * np.exp(1j * f.direction * self.k * s)
        return np.where(inside, vals, 0.0)

    def element_values(self, element_index, s, conjugate_phase=False):
        """Values of all functions on one element at points s: (len(s), n_funcs).

        No support masking: callers pass points inside the element.
        """
        el = self.elements[element_index]
        funcs = self._el_funcs[element_index]
        s = np.asarray(s, dtype=float)
        t = (2.0 * (s - el.a) / el.width) - 1.0
        leg = legendre_values(el.degree, t)
        sign = -1.0 if conjugate_phase else 1.0
        cols = np.empty((len(s), len(funcs)), dtype=complex)
        phase_cache = {}
        for i, f in enumerate(funcs):
            if f.direction == 0:
                cols[:, i] = leg[:, f.degree]
            else:
                key = f.direction
                if key not in phase_cache:
                    phase_cache[key] = np.exp(1j * sign * f.direction * self.k * s)
                cols[:, i] = leg[:, f.degree] * phase_cache[key]
        return cols


def legendre_values(qmax, t):
    """Legendre P_0..P_qmax at t by the three-term recurrence: (..., qmax+1)."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (qmax + 1,))
    out[..., 0] = 1.0
    if qmax >= 1:
        out[..., 1] = t
    for q in range(2, qmax + 1):
        out[..., q] = ((2 * q - 1) * t * out[..., q - 1] - (q - 1) * out[..., q - 2]) / q
    return out


def removal_threshold(mesh_nodes, alpha, k):
    """x_n~ and its node index: largest mesh node <= alpha * 2 pi / k."""
    limit = alpha * 2.0 * np.pi / k
    idx = int(np.searchsorted(mesh_nodes, limit * (1 + 1e-14), side="right") - 1)
    return float(mesh_nodes[idx]), idx


def build_hna_space(poly: ConvexPolygon, k, p, sigma=0.15, layers=None,
                    alpha=None) -> BasisSpace:
    """Single-mesh HNA space on the polygon boundary."""
    layers = 2 * p if layers is None else layers
    alpha = max((1.0 + p) / 4.0, 2.0) if alpha is None else alpha
    elements = []
    functions = []
    side_meta = []
    for j, piece in enumerate(poly.pieces):
        L = piece.length
        if not (0.0 < alpha < L * k / (4.0 * np.pi)):
            raise AlphaOutOfRange(
                f"alpha={alpha} outside (0, {L * k / (4 * np.pi):.4g}) on side {j}")
        mesh = graded_mesh(L, layers, sigma)
        degs = degree_vector(p, layers).element_degrees(layers)
        x_tilde, n_tilde = removal_threshold(mesh.nodes, alpha, k)
        n_el = mesh.n_elements
        side_meta.append({"mesh": mesh, "degrees": degs,
                          "x_removal": x_tilde, "n_removal": n_tilde})
        for e in range(n_el):
            a = piece.s0 + mesh.nodes[e]
            b = piece.s0 + mesh.nodes[e + 1]
            el = Element(GAMMA_BIG, j, float(a), float(b), int(degs[e]), len(elements))
            elements.append(el)
            if e < n_tilde:
                dirs = (1,)            # start zone: keep the rightward family
            elif e >= n_el - n_tilde:
                dirs = (-1,)           # end zone: keep the leftward family
            else:
                dirs = (1, -1)
            for d in dirs:
                for q in range(el.degree + 1):
                    functions.append(BasisFunction(GAMMA_BIG, el.index, q, d,
                                                   len(functions)))
    return BasisSpace(GAMMA_BIG, poly.pieces, elements, functions, k,
                      meta={"sides": side_meta, "p": p, "alpha": alpha,
                            "sigma": sigma, "layers": layers})


def build_hp_space(scene: Scene, k, p, sigma=0.15, layers=None,
                   oversampling=2.0 * np.pi) -> BasisSpace:
    """Standard hp space on the small obstacles (piecewise Legendre, dir 0).

    Polyline obstacles get corner-graded meshes with the degree vector and
    oscillation subdivision; smooth (densely sampled analytic) obstacles get
    plain quasi-uniform meshes at uniform degree.
    """
    layers = 2 * p if layers is None else layers
    pieces = scene.gamma_pieces
    elements = []
    functions = []
    for pid, piece in enumerate(pieces):
        smooth = scene.obstacles[piece.parent].smooth
        if smooth:
            nodes = quasi_uniform_mesh(piece.length, k, p, oversampling)
            degs = np.full(len(nodes) - 1, p, dtype=int)
        else:
            mesh = graded_mesh(piece.length, layers, sigma)
            base = degree_vector(p, layers).element_degrees(layers)
            nodes, degs = subdivide_for_oscillation(mesh.nodes, base, k, oversampling)
        for a, b, q in zip(nodes[:-1], nodes[1:], degs):
            el = Element(GAMMA_SMALL, pid, float(piece.s0 + a), float(piece.s0 + b),
                         int(q), len(elements))
            elements.append(el)
            for qq in range(el.degree + 1):
                functions.append(BasisFunction(GAMMA_SMALL, el.index, qq, 0,
                                               len(functions)))
    return BasisSpace(GAMMA_SMALL, pieces, elements, functions, k,
                      meta={"p": p, "sigma": sigma, "layers": layers})


def build_plain_space(pieces, boundary, k, p, layers, sigma, oversampling) -> BasisSpace:
    """Non-oscillatory corner-graded space at uniform degree (oracle/diagnostics)."""
    elements = []
    functions = []
    for pid, piece in enumerate(pieces):
        if layers >= 1:
            mesh = graded_mesh(piece.length, layers, sigma)
            base = np.full(mesh.n_elements, p, dtype=int)
            nodes, degs = subdivide_for_oscillation(mesh.nodes, base, k, oversampling)
        else:
            nodes = quasi_uniform_mesh(piece.length, k, p, oversampling)
            degs = np.full(len(nodes) - 1, p, dtype=int)
        for a, b, q in zip(nodes[:-1], nodes[1:], degs):
            el = Element(boundary, pid, float(piece.s0 + a), float(piece.s0 + b),
                         int(q), len(elements))
            elements.append(el)
            for qq in range(q + 1):
                functions.append(BasisFunction(boundary, el.index, qq, 0, len(functions)))
    return BasisSpace(boundary, pieces, elements, functions, k,
                      meta={"p": p, "layers": layers})


def eval_basis(space: BasisSpace, dof: int, s):
    """Public evaluation of one basis function at arclength s."""
    return space.eval_dof(dof, s)


def count_dofs_by_enumeration(space: BasisSpace):
    """Independent DOF count: sum over elements of directions*(degree+1)."""
    total = 0
    for el in space.elements:
        dirs = {f.direction for f in space.functions_on(el.index)}
        total += len(dirs) * (el.degree + 1)
    return total
