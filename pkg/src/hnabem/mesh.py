"""Graded and quasi-uniform meshes with hp degree vectors.

The symmetric geometrically graded mesh on [0, L] with n layers and grading
sigma has 2n+2 nodes

    x_0 = 0,   x_i = L sigma^{n-i+1} (i = 1..n),
    x_i = L (1 - sigma^{i-n}) (i = n+1..2n),   x_{2n+1} = L,

so widths shrink geometrically toward both endpoints.  Degree vectors reduce
the polynomial degree linearly toward the endpoints:

    p_i = p - floor(((n+1-i)/n) p)  for i = 1..n,   p_{n+1} = p.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadGrading, BadLayers


@dataclass(frozen=True)
class GradedMesh:
    """Symmetric geometrically graded mesh on [0, L]."""

    length: float
    layers: int
    sigma: float
    nodes: np.ndarray  # 2n+2 strictly increasing nodes, nodes[0]=0, nodes[-1]=L

    @property
    def widths(self):
        return np.diff(self.nodes)

    @property
    def n_elements(self):
        return 2 * self.layers + 1


@dataclass(frozen=True)
class DegreeVector:
    """Per-layer polynomial degrees, corner (index 0) to middle (index n)."""

    degrees: tuple

    def element_degrees(self, layers: int):
        """Degrees for all 2n+1 elements of the matching graded mesh, mirrored."""
        d = self.degrees
        return np.array([d[min(i, 2 * layers - i)] for i in range(2 * layers + 1)])


def graded_mesh(length: float, layers: int, sigma: float) -> GradedMesh:
    """Symmetric geometric mesh; widths computed from the closed formulas."""
    if not (0.0 < sigma < 0.5):
        raise BadGrading(f"sigma={sigma} outside (0, 1/2)")
    if layers < 1 or int(layers) != layers:
        raise BadLayers(f"layers={layers} must be a positive integer")
    if length <= 0:
        raise BadLayers(f"length={length} must be positive")
    n = int(layers)
    i = np.arange(1, n + 1)
    left = length * sigma ** (n - i + 1)
    right = length * (1.0 - sigma ** i)
    nodes = np.concatenate(([0.0], left, right, [length]))
    return GradedMesh(length=float(length), layers=n, sigma=float(sigma), nodes=nodes)


def degree_vector(p: int, layers: int) -> DegreeVector:
    """Linearly reduced degrees toward the corner; last entry is p."""
    n = int(layers)
    degs = [p - math.floor(((n + 1 - i) / n) * p) for i in range(1, n + 1)]
    degs.append(p)
    return DegreeVector(degrees=tuple(degs))


def quasi_uniform_count(length: float, k: float, p: int, c: float) -> int:
    """Element count m = ceil(c k L / (2 pi max(p, 1))), at least 1."""
    m = math.ceil(c * k * length / (2.0 * np.pi * max(p, 1)))
    return max(m, 1)


def quasi_uniform_mesh(length: float, k: float, p: int, c: float) -> np.ndarray:
    """Uniform nodes on [0, L] resolving k h / p <= 2 pi / c."""
    m = quasi_uniform_count(length, k, p, c)
    return np.linspace(0.0, length, m + 1)


def subdivide_for_oscillation(nodes, degrees, k: float, c: float):
    """Split each element into ceil(c k w / (2 pi max(q,1))) equal parts.

    Returns (new_nodes, new_degrees); sub-elements inherit the parent degree.
    This is how the graded meshes on the small obstacles (and the oracle
    meshes) resolve the oscillations on their larger elements.
    """
    out_nodes = [nodes[0]]
    out_degs = []
    for a, b, q in zip(nodes[:-1], nodes[1:], degrees):
        m = quasi_uniform_count(b - a, k, int(q), c)
        for j in range(1, m + 1):
            out_nodes.append(a + (b - a) * j / m)
            out_degs.append(int(q))
        out_nodes[-1] = b  # exact endpoint
    return np.array(out_nodes), np.array(out_degs)
