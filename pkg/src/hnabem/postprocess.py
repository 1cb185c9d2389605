"""Reconstruction of the Neumann trace, domain field, far field and errors.

The full trace approximation is

    nu_N = Psi + k v_Gamma^N + k G[v_gamma^N]   on Gamma,
    nu_N = k v_gamma^N                          on gamma,

and the scattered/total fields follow from the single-layer representation
u_N(x) = u^i(x) - int_{dD} Phi(x, y) nu_N(y) ds(y).
"""

import numpy as np

from .errors import OutOfRange, PointInsideScatterer, ZeroReference
from .geometry import physical_optics, upper_half_plane_indicator
from .hankel import hankel1_01
from .quadrature import element_rule_plain, osc_panel_width, rule_on_breaks
from .solver import Solution

GAMMA_BIG = "Gamma"
GAMMA_SMALL = "gamma"


def _eval_coefficient_sum(space, coeffs, boundary, s):
    """Sum_n a_n phi_n at arclengths s restricted to one boundary tag."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape, dtype=complex)
    els = [el for el in space.elements if el.boundary == boundary]
    if not els:
        return out
    starts = np.array([el.a for el in els])
    idx = np.clip(np.searchsorted(starts, s, side="right") - 1, 0, len(els) - 1)
    for ui in np.unique(idx):
        el = els[ui]
        sel = idx == ui
        pts = s[sel]
        inside = (pts >= el.a) & (pts <= el.b)
        vals = space.element_values(el.index, pts)
        dofs = np.asarray([f.dof for f in space.functions_on(el.index)])
        out[sel] = np.where(inside, vals @ coeffs[dofs], 0.0)
    return out


class InteractionEvaluator:
    """(G v_gamma)(x_Gamma(s)) for a coefficient vector on the gamma space."""

    def __init__(self, scene, space_small, coeffs_small, order=12, ppw=10):
        self.scene = scene
        k = scene.k
        nodes, weights, pts = [], [], []
        for el in space_small.elements:
            rule = element_rule_plain(el.a, el.b, k, order, ppw)
            nodes.append(rule.nodes)
            weights.append(rule.weights)
            pts.append(space_small.pieces[el.piece_id].point(rule.nodes))
        self.ynodes = np.concatenate(nodes)
        self.ypts = np.vstack(pts)
        w = np.concatenate(weights)
        vvals = _eval_coefficient_sum(space_small, coeffs_small, GAMMA_SMALL,
                                      self.ynodes)
        self.wv = w * vvals
        poly = scene.polygon
        self.ind = np.stack([upper_half_plane_indicator(poly, j, self.ypts)
                             for j in range(poly.n_sides)])

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        poly = self.scene.polygon
        k = self.scene.k
        sides = poly.side_of(s)
        x = poly.point(s)
        out = np.zeros(len(s), dtype=complex)
        for j in np.unique(sides):
            rows = np.where(sides == j)[0]
            diff = x[rows, None, :] - self.ypts[None, :, :]
            r = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
            h1 = hankel1_01(k * r.ravel())[1].reshape(r.shape)
            dot = diff[..., 0] * poly.outward_normals[j][0] + \
                diff[..., 1] * poly.outward_normals[j][1]
            kern = 0.5j * k * h1 * dot / r * self.ind[j][None, :]
            out[rows] = kern @ self.wv
        return out


class TraceSampler:
    """Evaluates the reconstructed physical Neumann trace of a Solution."""

    def __init__(self, solution: Solution, order=12, ppw=10):
        self.solution = solution
        self.scene = solution.scene
        sys = solution.system
        self.oracle = bool(sys.meta.get("oracle"))
        self._ginter = None
        if not self.oracle and sys.n_small:
            self._ginter = InteractionEvaluator(self.scene, sys.space_small,
                                                solution.v_small, order, ppw)

    def __call__(self, boundary, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        sys = self.solution.system
        k = self.scene.k
        if self.oracle:
            return _eval_coefficient_sum(sys.space_big, self.solution.coefficients,
                                         boundary, s)
        if boundary == GAMMA_BIG:
            out = physical_optics(self.scene, s).astype(complex)
            out += k * _eval_coefficient_sum(sys.space_big, self.solution.v_big,
                                             GAMMA_BIG, s)
            if self._ginter is not None:
                out += k * self._ginter(s)
            return out
        if boundary == GAMMA_SMALL:
            if sys.space_small is None:
                return np.zeros(len(s), dtype=complex)
            return k * _eval_coefficient_sum(sys.space_small, self.solution.v_small,
                                             GAMMA_SMALL, s)
        raise OutOfRange(f"unknown boundary {boundary!r}")


def neumann_trace(solution: Solution, boundary, s):
    """nu_N on the requested boundary at arclength(s) s."""
    return TraceSampler(solution)(boundary, s)


def _boundary_edges(scene, spaces, boundary):
    """Union of element edges of several spaces on one boundary."""
    edges = set()
    for sp in spaces:
        if sp is None:
            continue
        for el in sp.elements:
            if el.boundary == boundary:
                edges.add(el.a)
                edges.add(el.b)
    return np.array(sorted(edges))


def boundary_rule(scene, spaces, boundary, order=12, ppw=10, osc_factor=2.0):
    """Composite rule on a whole boundary resolving 2k oscillations."""
    edges = _boundary_edges(scene, spaces, boundary)
    if len(edges) == 0:
        return None
    hmax = osc_panel_width(osc_factor * scene.k, order, ppw)
    breaks = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil((b - a) / hmax)))
        breaks.extend(a + (b - a) * np.arange(1, n + 1) / n)
    return rule_on_breaks(np.asarray(breaks), order)


def l2_relative_error(sampler_a, sampler_b, scene, spaces, order=12, ppw=10):
    """|| a - b ||_{L2(Gamma u gamma)} / || b ||, meshes resolved jointly."""
    num = 0.0
    den = 0.0
    for boundary in (GAMMA_BIG, GAMMA_SMALL):
        rule = boundary_rule(scene, spaces, boundary, order, ppw)
        if rule is None:
            continue
        va = sampler_a(boundary, rule.nodes)
        vb = sampler_b(boundary, rule.nodes)
        num += float(np.sum(rule.weights * np.abs(va - vb) ** 2))
        den += float(np.sum(rule.weights * np.abs(vb) ** 2))
    if den == 0.0:
        raise ZeroReference("reference trace has zero norm")
    return float(np.sqrt(num / den))


class FieldEvaluator:
    """Single-layer representation of u_N with near-boundary refinement."""

    def __init__(self, solution: Solution, order=12, ppw=10):
        self.solution = solution
        self.scene = solution.scene
        self.order = order
        self.ppw = ppw
        self.trace = TraceSampler(solution, order, ppw)
        sys = solution.system
        spaces = [sys.space_big, sys.space_small]
        k = self.scene.k
        nodes_all, pts, wtr, tags = [], [], [], []
        self._edges = {}
        for boundary, pieces in ((GAMMA_BIG, self.scene.polygon.pieces),
                                 (GAMMA_SMALL, self.scene.gamma_pieces)):
            rule = boundary_rule(self.scene, spaces, boundary, order, ppw)
            if rule is None:
                continue
            self._edges[boundary] = rule.edges
            vals = self.trace(boundary, rule.nodes)
            nodes_all.append(rule.nodes)
            wtr.append(rule.weights * vals)
            pts.append(self._points_on(boundary, rule.nodes))
            tags.append(np.full(len(rule.nodes), boundary == GAMMA_SMALL, dtype=bool))
        self.ys = np.concatenate(nodes_all)
        self.ypts = np.vstack(pts)
        self.wnu = np.concatenate(wtr)
        self.ysmall = np.concatenate(tags)
        self.h_near = osc_panel_width(2.0 * k, order, ppw)

    def _pieces(self, boundary):
        return self.scene.polygon.pieces if boundary == GAMMA_BIG \
            else self.scene.gamma_pieces

    def _points_on(self, boundary, s):
        s = np.asarray(s)
        pieces = self._pieces(boundary)
        out = np.empty((len(s), 2))
        bounds = np.array([p.s0 for p in pieces])
        idx = np.clip(np.searchsorted(bounds, s, side="right") - 1, 0,
                      len(pieces) - 1)
        for ui in np.unique(idx):
            sel = idx == ui
            out[sel] = pieces[ui].point(s[sel])
        return out

    def _single_layer(self, x):
        k = self.scene.k
        diff = x[:, None, :] - self.ypts[None, :, :]
        r = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2)
        h0 = hankel1_01(k * r.ravel())[0].reshape(r.shape)
        return (0.25j * h0) @ self.wnu

    def evaluate(self, points, allow_masked=False):
        """u_N at exterior points; masked interior points give NaN."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        exterior = self.scene.exterior_mask(pts)
        if not allow_masked and not np.all(exterior):
            raise PointInsideScatterer("evaluation point inside a scatterer")
        out = np.full(len(pts), np.nan + 0j)
        ext = np.where(exterior)[0]
        if len(ext) == 0:
            return (out, exterior) if allow_masked else out
        vals = self.scene.incident(pts[ext]).astype(complex)
        chunk = 512
        for i0 in range(0, len(ext), chunk):
            sel = ext[i0:i0 + chunk]
            vals[i0:i0 + chunk] -= self._single_layer(pts[sel])
        # near-boundary refinement, pointwise
        for i, gi in enumerate(ext):
            x = pts[gi]
            d = self._distance_to_boundary(x)
            if d < 1e-6:
                raise PointInsideScatterer(
                    f"point {x} within 1e-6 of the boundary (not supported)")
            if d < 1.5 * self.h_near:
                vals[i] += self._near_correction_point(x)
        out[ext] = vals
        return (out, exterior) if allow_masked else out

    def _distance_to_boundary(self, x):
        best = np.inf
        for boundary in (GAMMA_BIG, GAMMA_SMALL):
            for piece in self._pieces(boundary):
                t = np.clip((x - piece.x0) @ piece.tau, 0.0, piece.length)
                best = min(best, float(np.linalg.norm(x - (piece.x0 + t * piece.tau))))
        return best

    def _near_correction_point(self, x):
        """Swap the global-rule node contributions near x for a refined patch."""
        k = self.scene.k
        total = 0.0 + 0.0j
        for boundary in (GAMMA_BIG, GAMMA_SMALL):
            pieces = self._pieces(boundary)
            if not pieces:
                continue
            small = boundary == GAMMA_SMALL
            for piece in pieces:
                t = np.clip((x - piece.x0) @ piece.tau, 0.0, piece.length)
                foot = piece.x0 + t * piece.tau
                d = float(np.linalg.norm(x - foot))
                if d > 1.5 * self.h_near:
                    continue
                s_star = piece.s0 + t
                lo = max(piece.s0, s_star - 6.0 * self.h_near)
                hi = min(piece.s1, s_star + 6.0 * self.h_near)
                if hi <= lo:
                    continue
                # snap to whole panels of the global rule so removing its
                # nodes on [lo, hi] removes exactly that interval's quadrature
                edges = self._edges[boundary]
                lo = edges[max(0, np.searchsorted(edges, lo, side="right") - 1)]
                hi = edges[min(len(edges) - 1, np.searchsorted(edges, hi, side="left"))]
                # remove exactly what the global sum contributed on [lo, hi]
                sel = (self.ysmall == small) & (self.ys >= lo) & (self.ys <= hi)
                if np.any(sel):
                    r = np.linalg.norm(x[None, :] - self.ypts[sel], axis=1)
                    total -= np.sum(0.25j * hankel1_01(k * r)[0] * self.wnu[sel])
                fine = rule_on_breaks(_refined_breaks(lo, hi, s_star, d,
                                                      self.h_near), self.order)
                vals = self.trace(boundary, fine.nodes)
                y = self._points_on(boundary, fine.nodes)
                r = np.linalg.norm(x[None, :] - y, axis=1)
                total += np.sum(0.25j * hankel1_01(k * r)[0] * fine.weights * vals)
        return total


def _refined_breaks(lo, hi, s_star, dist, hmax):
    """Panels graded toward s_star (distance `dist` off the line), capped at hmax."""
    from .quadrature import ladder_breaks

    s_star = min(max(s_star, lo), hi)
    parts = []
    if s_star - lo > 1e-14 * (hi - lo):
        parts.append(ladder_breaks(lo, s_star, False, hmax, near_dist=dist))
    if hi - s_star > 1e-14 * (hi - lo):
        right = ladder_breaks(s_star, hi, True, hmax, near_dist=dist)
        parts.append(right if not parts else right[1:])
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def domain_field(solution: Solution, points, allow_masked=False, order=12, ppw=10):
    """u_N at exterior point(s) via the single-layer representation."""
    ev = FieldEvaluator(solution, order, ppw)
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    res = ev.evaluate(np.atleast_2d(pts), allow_masked=allow_masked)
    if allow_masked:
        vals, mask = res
        return (vals[0], mask[0]) if single else (vals, mask)
    return res[0] if single else res


def far_field(solution: Solution, thetas, order=12, ppw=10):
    """u_inf(theta) = -int e^{-ik y.(cos, sin)} nu_N(y) ds(y)."""
    ev = FieldEvaluator(solution, order, ppw)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    k = solution.scene.k
    direction = np.column_stack([np.cos(thetas), np.sin(thetas)])
    phase = np.exp(-1j * k * (direction @ ev.ypts.T))
    vals = -(phase @ ev.wnu)
    return vals[0] if np.ndim(thetas) == 0 else vals
