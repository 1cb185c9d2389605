"""Evaluable kernels: combined potential, interaction operator, star-combined.

Kernels expose two call forms used by the assembly engine:

* ``geometric(x, y, n_x)`` for points on different straight pieces, where the
  full kernel is smooth away from shared corners;
* ``same_piece(s, t, piece)`` for collinear points, returning the pair
  (smooth part, log factor) of the decomposition  K = F(s,t) + ln|s-t| G(s,t),
  which is what the diagonal moment quadrature consumes.

On a straight piece (x - y) is parallel to the tangent, so the adjoint
double-layer part vanishes there and only the single layer contributes.
"""

import numpy as np

from .errors import ZeroSeparation
from .geometry import Scene, upper_half_plane_indicator
from .hankel import (
    EULER_GAMMA,
    bessel_j0,
    hankel1_01,
    regular_part_y0,
)

TWO_PI = 2.0 * np.pi


def _pairwise(x, y):
    """Difference tensor and distances for x: (m, 2), y: (n, 2)."""
    diff = x[:, None, :] - y[None, :, :]
    r = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
    return diff, r


def single_layer_matrix(k, x, y):
    """Phi_k(x_i, y_j) for disjoint point sets."""
    _, r = _pairwise(np.atleast_2d(x), np.atleast_2d(y))
    return 0.25j * hankel1_01(k * r)[0].reshape(r.shape)


def phi_split(k, u):
    """Smooth/log split of Phi_k on a line: Phi(|u|) = F(|u|) + ln|u| G(|u|).

    F = (i/4) J_0(k u) - (1/2pi)(ln(k/2) + gamma) J_0(k u) - B_0(k u)/(2 pi),
    G = -J_0(k u) / (2 pi),  with B_0 the entire remainder of Y_0.
    """
    z = k * np.abs(u)
    flat = z.ravel()
    j0 = np.empty_like(flat)
    pos = flat > 0
    j0[pos] = bessel_j0(flat[pos])
    j0[~pos] = 1.0
    b0 = np.empty_like(flat)
    b0[pos] = regular_part_y0(flat[pos])
    b0[~pos] = 0.0
    j0 = j0.reshape(z.shape)
    b0 = b0.reshape(z.shape)
    coeff = 0.25j - (np.log(0.5 * k) + EULER_GAMMA) / TWO_PI
    return coeff * j0 - b0 / TWO_PI, -j0 / TWO_PI + 0.0j


class CombinedKernel:
    """A_{k,eta} minus its (1/2) I part:  dPhi/dn(x) - i eta Phi."""

    name = "combined"

    def __init__(self, k, eta):
        self.k = float(k)
        self.eta = float(eta)

    def geometric(self, x, y, nx):
        diff, r = _pairwise(x, y)
        h0, h1 = hankel1_01(self.k * r.ravel())
        h0 = h0.reshape(r.shape)
        h1 = h1.reshape(r.shape)
        dot = diff[..., 0] * nx[0] + diff[..., 1] * nx[1]
        return -0.25j * self.k * h1 * dot / r - 0.25j * self.eta * h0

    def same_piece(self, s, t, piece):
        u = s[:, None] - t[None, :]
        fsm, flg = phi_split(self.k, u)
        return -1j * self.eta * fsm, -1j * self.eta * flg


class SingleLayerKernel:
    """S_k alone (no identity part)."""

    name = "S_k"

    def __init__(self, k):
        self.k = float(k)

    def geometric(self, x, y, nx):
        _, r = _pairwise(x, y)
        return 0.25j * hankel1_01(self.k * r.ravel())[0].reshape(r.shape)

    def same_piece(self, s, t, piece):
        u = s[:, None] - t[None, :]
        return phi_split(self.k, u)


class AdjointDoubleLayerKernel:
    """D'_k alone."""

    name = "D'_k"

    def __init__(self, k):
        self.k = float(k)

    def geometric(self, x, y, nx):
        diff, r = _pairwise(x, y)
        h1 = hankel1_01(self.k * r.ravel())[1].reshape(r.shape)
        dot = diff[..., 0] * nx[0] + diff[..., 1] * nx[1]
        return -0.25j * self.k * h1 * dot / r

    def same_piece(self, s, t, piece):
        shape = (len(s), len(t))
        zero = np.zeros(shape, dtype=complex)
        return zero, zero.copy()


class InteractionKernel:
    """Interaction operator kernel on Gamma x gamma.

    g(x, y) = -2 chi_gamma(x, y) dPhi/dn(x),  where chi masks the part of
    gamma outside the open half-plane U_j of the side containing x.
    """

    name = "interaction"

    def __init__(self, scene: Scene):
        self.scene = scene
        self.k = scene.k

    def chi(self, side_index, y):
        return upper_half_plane_indicator(self.scene.polygon, side_index, y)

    def geometric(self, x, y, nx, side_index=None):
        diff, r = _pairwise(x, y)
        h1 = hankel1_01(self.k * r.ravel())[1].reshape(r.shape)
        dot = diff[..., 0] * nx[0] + diff[..., 1] * nx[1]
        vals = 0.5j * self.k * h1 * dot / r    # -2 * (-ik/4) H_1 dot / r
        if side_index is not None:
            mask = self.chi(side_index, y)
            vals = vals * mask[None, :]
        return vals


class StarCombinedKernel:
    """Integral part of the constellation-combined operator.

    K(x, y) = Z(x) . grad_x Phi_k(x, y) - i eta_hat(x) Phi_k(x, y),
    eta_hat(x) = k |Z(x)| + i/2,  Z(x) = x - center(component of x).
    The (Z.n)(1/2 I) part is added separately at assembly time, and the
    tangential piece Z.grad_S S_k is assembled by integration by parts, so
    this kernel is evaluated only across distinct pieces.
    """

    name = "star_combined"

    def __init__(self, k, center_of):
        self.k = float(k)
        self.center_of = center_of  # callable: component id -> (2,) center

    def zfield(self, x, component):
        return x - self.center_of(component)

    def eta_hat(self, x, component):
        return self.k * np.linalg.norm(self.zfield(x, component), axis=-1) + 0.5j

    def geometric(self, x, y, nx, component=None):
        diff, r = _pairwise(x, y)
        h0, h1 = hankel1_01(self.k * r.ravel())
        h0 = h0.reshape(r.shape)
        h1 = h1.reshape(r.shape)
        z = self.zfield(x, component)
        dot = diff[..., 0] * z[:, None, 0] + diff[..., 1] * z[:, None, 1]
        grad_term = -0.25j * self.k * h1 * dot / r
        return grad_term - 1j * self.eta_hat(x, component)[:, None] * 0.25j * h0


def combined_kernel(k, eta, x, y, n_x):
    """Pointwise combined kernel dPhi/dn(x) - i eta Phi (the 1/2 I apart)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    vals = CombinedKernel(k, eta).geometric(x, y, np.asarray(n_x, dtype=float))
    return vals[0, 0] if vals.size == 1 else vals


def star_combined_kernel(k, center, x, y, n_x=None):
    """Pointwise constellation-combined integral kernel for one component."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    ker = StarCombinedKernel(k, lambda _c: np.asarray(center, dtype=float))
    vals = ker.geometric(x, y, None, component=0)
    return vals[0, 0] if vals.size == 1 else vals


def rhs_data(scene: Scene, x, n):
    """f_{k,eta}(x) = (d/dn - i eta) u^i = (i k d.n - i eta) e^{i k x.d}."""
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    dn = n @ scene.d
    return (1j * scene.k * dn - 1j * scene.eta) * scene.incident(x)


def interaction_apply(scene: Scene, phi, s, ppw=10, order=12):
    """(G_{gamma -> Gamma} phi)(x_Gamma(s)) for a callable phi on gamma.

    Integrates -2 dPhi/dn_j(x) phi(y) over gamma intersected with the open
    half-plane U_j of the side containing x; oscillatory composite Gauss is
    enough because Gamma and gamma are disjoint.  Vectorized over s.
    """
    from .quadrature import element_rule_plain

    s = np.atleast_1d(np.asarray(s, dtype=float))
    poly = scene.polygon
    sides = poly.side_of(s)
    x = poly.point(s)
    out = np.zeros(len(s), dtype=complex)
    ker = InteractionKernel(scene)
    for piece in scene.gamma_pieces:
        rule = element_rule_plain(piece.s0, piece.s1, scene.k, order, ppw)
        y = piece.point(rule.nodes)
        phv = np.asarray(phi(rule.nodes)) * rule.weights
        for j in np.unique(sides):
            rows = np.where(sides == j)[0]
            vals = ker.geometric(x[rows], y, poly.outward_normals[j], side_index=int(j))
            out[rows] += vals @ phv
    return out[0] if np.ndim(s) == 0 else out


def interaction_norm_bound(scene: Scene):
    """C_G(k) = sqrt(L_Gamma L_gamma k / (2 pi dist)) + sqrt(L_Gamma L_gamma)/(pi dist)."""
    dist = scene.separation()
    if not scene.obstacles or dist <= 0.0:
        raise ZeroSeparation("interaction bound needs disjoint gamma")
    lg = scene.polygon.perimeter
    ls = scene.gamma_length
    return np.sqrt(lg * ls * scene.k / (TWO_PI * dist)) + np.sqrt(lg * ls) / (np.pi * dist)
