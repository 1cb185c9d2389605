"""Element-pair Galerkin assembly engine.

Every matrix block is a sum over (test element, trial element) pairs of

    entries[m, n] = int int conj(psi_m(s)) K(x(s), y(t)) phi_n(t) dt ds,

computed from tensorized composite Gauss rules as small matrix products
A_test^T K A_trial.  Pair classification picks the rules:

    self       same element: uniform oscillation panels; the ln|s-t| kernel
               factor is integrated exactly on diagonal and touching panel
               pairs via precomputed reference moment matrices
    adjacent   same piece, shared node: panels graded toward the node
    near       gap smaller than the facing panels: graded toward the facing
               end (quantized gap offsets keep the rule cache small)
    corner     different pieces sharing a vertex: panels graded toward it
    far        plain oscillation panels (they resolve ln and 1/r kernels at
               gaps comparable to the panel width, and obstacle separations
               scale with the wavelength exactly as the panels do)

Trial data is either a local basis (standard blocks) or global column
functions (interaction-composed blocks, Psi right-hand side).  Column values
are evaluated on the plain rules only and interpolated panel-wise onto
graded rules; the columns are smooth there, the kernel carries the
singularity.
"""

import numpy as np

from .basis import BasisSpace
from .quadrature import (
    element_rule_plain,
    ladder_breaks,
    lagrange_values,
    log_moment_contig,
    log_moment_same,
    osc_panel_width,
    rule_on_breaks,
    uniform_breaks,
)

_SHARED_TOL = 1e-10
_NEAR_FACTOR = 0.8   # near iff gap < _NEAR_FACTOR * max facing panel width


def _osc_factor(space: BasisSpace):
    cached = getattr(space, "_osc_factor", None)
    if cached is None:
        cached = 2.0 if any(f.direction for f in space.functions) else 1.0
        space._osc_factor = cached
    return cached


class Assembler:
    """Caches rules and basis values for one scene/config; assembles blocks."""

    def __init__(self, scene, config):
        self.scene = scene
        self.config = config
        self.k = scene.k
        self.order = config.gauss_order
        self.ppw = config.effective_ppw
        self._rules = {}
        self._basis_vals = {}

    # -- rules -------------------------------------------------------------

    def _keff(self, space):
        return self.k * _osc_factor(space)

    def _hmax(self, space):
        return osc_panel_width(self._keff(space), self.order, self.ppw)

    def plain_rule(self, space, el):
        key = (id(space), el.index, "plain")
        if key not in self._rules:
            self._rules[key] = element_rule_plain(el.a, el.b, self._keff(space),
                                                  self.order, self.ppw)
        return self._rules[key]

    def graded_rule(self, space, el, toward_left, near_dist=0.0):
        # quantize the offset to powers of 4 of the element width so the
        # rule/value caches stay small; rounding down only adds panels
        if near_dist > 0.0:
            lvl = int(np.floor(np.log(near_dist / el.width) / np.log(4.0)))
            lvl = max(min(lvl, 0), -24)
            nd = el.width * 4.0 ** lvl
        else:
            lvl, nd = None, 0.0
        key = (id(space), el.index, "graded", toward_left, lvl)
        if key not in self._rules:
            floor_abs = 1e-12 * space.pieces[el.piece_id].length
            breaks = ladder_breaks(el.a, el.b, toward_left, self._hmax(space), nd,
                                   floor_abs=floor_abs)
            self._rules[key] = rule_on_breaks(breaks, self.order)
        return self._rules[key]

    def witness_rule(self, space, el, s_star, near_dist):
        """Rule graded toward an interior witness point (cross-piece near pairs)."""
        w = el.width
        if s_star <= el.a + 0.05 * w:
            return self.graded_rule(space, el, True, near_dist)
        if s_star >= el.b - 0.05 * w:
            return self.graded_rule(space, el, False, near_dist)
        frac = round((s_star - el.a) / w, 2)
        lvl = max(int(np.floor(np.log(max(near_dist, 1e-300) / w) / np.log(4.0))), -24) \
            if near_dist > 0 else None
        key = (id(space), el.index, "witness", frac, lvl)
        if key not in self._rules:
            split = el.a + frac * w
            nd = 0.0 if lvl is None else w * 4.0 ** lvl
            hmax = self._hmax(space)
            left = ladder_breaks(el.a, split, False, hmax, nd)
            right = ladder_breaks(split, el.b, True, hmax, nd)
            self._rules[key] = rule_on_breaks(np.concatenate([left, right[1:]]),
                                              self.order)
        return self._rules[key]

    # -- basis values --------------------------------------------------------

    def basis_mats(self, space, el, rule, conjugate):
        """(weighted, raw) basis value matrices on `el` at the rule's nodes."""
        key = (id(space), el.index, id(rule), conjugate)
        if key not in self._basis_vals:
            raw = space.element_values(el.index, rule.nodes, conjugate_phase=conjugate)
            self._basis_vals[key] = (rule.weights[:, None] * raw, raw)
        return self._basis_vals[key]

    # -- pair classification ---------------------------------------------------

    def pair_rules(self, sp_t, el_t, sp_s, el_s):
        """(kind, rule_test, rule_trial); kind in {self, samepiece, geom}."""
        if sp_t is sp_s and el_t.piece_id == el_s.piece_id:
            if el_t.index == el_s.index:
                r = self.plain_rule(sp_t, el_t)
                return "self", r, r
            gap = max(el_s.a - el_t.b, el_t.a - el_s.b)
            scale = max(el_t.width, el_s.width)
            if gap <= _SHARED_TOL * scale:
                toward_t = el_s.a >= el_t.b - _SHARED_TOL * scale
                return ("samepiece",
                        self.graded_rule(sp_t, el_t, not toward_t),
                        self.graded_rule(sp_s, el_s, toward_t))
            h_t = min(el_t.width, self._hmax(sp_t))
            h_s = min(el_s.width, self._hmax(sp_s))
            if gap < _NEAR_FACTOR * max(h_t, h_s):
                toward_t = el_s.a > el_t.a
                return ("samepiece",
                        self.graded_rule(sp_t, el_t, not toward_t, near_dist=gap),
                        self.graded_rule(sp_s, el_s, toward_t, near_dist=gap))
            return ("samepiece", self.plain_rule(sp_t, el_t),
                    self.plain_rule(sp_s, el_s))

        piece_t = sp_t.pieces[el_t.piece_id]
        piece_s = sp_s.pieces[el_s.piece_id]
        pa, pb = piece_t.point(el_t.a), piece_t.point(el_t.b)
        qa, qb = piece_s.point(el_s.a), piece_s.point(el_s.b)
        scale = max(el_t.width, el_s.width, 1.0)
        for it, pt in enumerate((pa, pb)):
            for js, qs in enumerate((qa, qb)):
                if np.linalg.norm(pt - qs) < _SHARED_TOL * scale:
                    return ("geom",
                            self.graded_rule(sp_t, el_t, it == 0),
                            self.graded_rule(sp_s, el_s, js == 0))
        d, st, ss = _seg_distance(pa, pb, qa, qb)
        h_t = min(el_t.width, self._hmax(sp_t))
        h_s = min(el_s.width, self._hmax(sp_s))
        if d < _NEAR_FACTOR * max(h_t, h_s):
            return ("geom",
                    self.witness_rule(sp_t, el_t, el_t.a + st * el_t.width, d),
                    self.witness_rule(sp_s, el_s, el_s.a + ss * el_s.width, d))
        return ("geom", self.plain_rule(sp_t, el_t), self.plain_rule(sp_s, el_s))

    # -- kernel matrices --------------------------------------------------

    def _km_geom(self, kernel, sp_t, el_t, rule_t, sp_s, el_s, rule_s):
        piece_t = sp_t.pieces[el_t.piece_id]
        piece_s = sp_s.pieces[el_s.piece_id]
        x = piece_t.point(rule_t.nodes)
        y = piece_s.point(rule_s.nodes)
        return kernel.geometric(x, y, piece_t.normal)

    def _km_same_piece(self, kernel, sp, el_t, rule_t, el_s, rule_s):
        piece = sp.pieces[el_t.piece_id]
        fsm, flg = kernel.same_piece(rule_t.nodes, rule_s.nodes, piece)
        u = np.abs(rule_t.nodes[:, None] - rule_s.nodes[None, :])
        return fsm + np.log(u) * flg

    def _entries_self(self, space, el, kernel, rule, tw, traw, sw, sraw):
        """Same-element pair; sw/sraw are weighted/raw trial (or column) values."""
        ng = rule.order
        n_p = rule.n_panels
        piece = space.pieces[el.piece_id]
        fsm, flg = kernel.same_piece(rule.nodes, rule.nodes, piece)
        u = np.abs(rule.nodes[:, None] - rule.nodes[None, :])
        pidx = np.repeat(np.arange(n_p), ng)
        near = np.abs(pidx[:, None] - pidx[None, :]) <= 1
        lnu = np.log(np.where(near, 1.0, u))
        km = fsm + lnu * flg
        entries = tw.T @ km @ sw
        r_same, g = log_moment_same(ng)
        r_con = log_moment_contig(ng)
        ggt = np.outer(g, g)
        w = rule.edges[1] - rule.edges[0]   # uniform panels
        lw = np.log(w)
        mom_same = (r_same + lw * ggt) * (w * w)
        mom_up = (r_con + lw * ggt) * (w * w)
        mom_dn = (r_con.T + lw * ggt) * (w * w)
        for i in range(n_p):
            sl_i = rule.panel_slice(i)
            for j, mom in ((i - 1, mom_dn), (i, mom_same), (i + 1, mom_up)):
                if j < 0 or j >= n_p:
                    continue
                sl_j = rule.panel_slice(j)
                entries += traw[sl_i].T @ (flg[sl_i, sl_j] * mom) @ sraw[sl_j]
        return entries

    # -- blocks ---------------------------------------------------------------

    def block(self, test_space, trial_space, kernel, include_half=False,
              columns=None):
        """Galerkin block for basis trials; optionally a column block too.

        columns = (colfun, n_cols): colfun(points, element, s_nodes) gives
        global trial columns on trial_space's elements; returns (B, H).
        """
        nt = test_space.n_dofs
        out = np.zeros((nt, trial_space.n_dofs), dtype=complex)
        hout = None
        colplain = {}
        if columns is not None:
            colfun, n_cols = columns
            hout = np.zeros((nt, n_cols), dtype=complex)

        def plain_cols(el_s):
            if el_s.index not in colplain:
                rule = self.plain_rule(trial_space, el_s)
                piece = trial_space.pieces[el_s.piece_id]
                colplain[el_s.index] = colfun(piece.point(rule.nodes), el_s,
                                              rule.nodes)
            return colplain[el_s.index]

        def cols_on(el_s, rule):
            plain = self.plain_rule(trial_space, el_s)
            base = plain_cols(el_s)
            if rule is plain:
                return base
            return _interp_columns(plain, rule.nodes, base)

        for el_t in test_space.elements:
            rows = [f.dof for f in test_space.functions_on(el_t.index)]
            row_idx = np.asarray(rows)
            for el_s in trial_space.elements:
                kind, rule_t, rule_s = self.pair_rules(test_space, el_t,
                                                       trial_space, el_s)
                tw, traw = self.basis_mats(test_space, el_t, rule_t, conjugate=True)
                sw, sraw = self.basis_mats(trial_space, el_s, rule_s,
                                           conjugate=False)
                cols = cols_on(el_s, rule_s) if columns is not None else None
                if kind == "self":
                    ent = self._entries_self(test_space, el_t, kernel, rule_t,
                                             tw, traw, sw, sraw)
                    if cols is not None:
                        hent = self._entries_self(test_space, el_t, kernel, rule_t,
                                                  tw, traw,
                                                  rule_s.weights[:, None] * cols,
                                                  cols)
                else:
                    if kind == "samepiece":
                        km = self._km_same_piece(kernel, test_space, el_t, rule_t,
                                                 el_s, rule_s)
                    else:
                        km = self._km_geom(kernel, test_space, el_t, rule_t,
                                           trial_space, el_s, rule_s)
                    kt = tw.T @ km
                    ent = kt @ sw
                    if cols is not None:
                        hent = kt @ (rule_s.weights[:, None] * cols)
                cidx = [f.dof for f in trial_space.functions_on(el_s.index)]
                out[np.ix_(row_idx, np.asarray(cidx))] += ent
                if cols is not None:
                    hout[row_idx] += hent
            if include_half and test_space is trial_space:
                rule = self.plain_rule(test_space, el_t)
                tw, _ = self.basis_mats(test_space, el_t, rule, conjugate=True)
                _, raw = self.basis_mats(trial_space, el_t, rule, conjugate=False)
                cidx = [f.dof for f in trial_space.functions_on(el_t.index)]
                out[np.ix_(row_idx, np.asarray(cidx))] += 0.5 * (tw.T @ raw)
                if columns is not None:
                    hout[row_idx] += 0.5 * (tw.T @ plain_cols(el_t))
        if columns is not None:
            return out, hout
        return out

    def load_vector(self, test_space, valuefun):
        """(g, psi_m) for a pointwise boundary function g(points, element)."""
        out = np.zeros(test_space.n_dofs, dtype=complex)
        for el in test_space.elements:
            rows = [f.dof for f in test_space.functions_on(el.index)]
            rule = self.plain_rule(test_space, el)
            tw, _ = self.basis_mats(test_space, el, rule, conjugate=True)
            piece = test_space.pieces[el.piece_id]
            vals = valuefun(piece.point(rule.nodes), el)
            out[np.asarray(rows)] += tw.T @ vals
        return out

    def gram(self, space):
        """Element-block-diagonal Gram matrix (phi_n, phi_m)_{L^2}."""
        out = np.zeros((space.n_dofs, space.n_dofs), dtype=complex)
        for el in space.elements:
            funcs = space.functions_on(el.index)
            idx = np.asarray([f.dof for f in funcs])
            rule = self.plain_rule(space, el)
            tw, _ = self.basis_mats(space, el, rule, conjugate=True)
            _, raw = self.basis_mats(space, el, rule, conjugate=False)
            out[np.ix_(idx, idx)] += tw.T @ raw
        return out

    def trial_rule_table(self, space):
        """Plain rules of all elements: (all nodes, all weights, slices)."""
        nodes, weights, slices = [], [], []
        pos = 0
        for el in space.elements:
            rule = self.plain_rule(space, el)
            nodes.append(rule.nodes)
            weights.append(rule.weights)
            slices.append(slice(pos, pos + len(rule.nodes)))
            pos += len(rule.nodes)
        return np.concatenate(nodes), np.concatenate(weights), slices


def _interp_columns(plain_rule, targets, values):
    """Panel-wise Lagrange interpolation of column values onto new nodes."""
    out = np.empty((len(targets), values.shape[1]), dtype=values.dtype)
    edges = plain_rule.edges
    ids = np.clip(np.searchsorted(edges, targets, side="right") - 1, 0,
                  plain_rule.n_panels - 1)
    for p in np.unique(ids):
        sel = ids == p
        sl = plain_rule.panel_slice(p)
        L = lagrange_values(plain_rule.nodes[sl], targets[sel])
        out[sel] = L @ values[sl]
    return out


def _seg_distance(a0, a1, b0, b1):
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = d1 @ d1
    e = d2 @ d2
    f = d2 @ r
    c = d1 @ r
    b = d1 @ d2
    den = a * e - b * b
    s = np.clip((b * f - c * e) / den, 0.0, 1.0) if den > 1e-14 * max(a * e, 1e-300) else 0.0
    t = (b * s + f) / e if e > 0 else 0.0
    if t < 0.0:
        t, s = 0.0, (np.clip(-c / a, 0.0, 1.0) if a > 0 else 0.0)
    elif t > 1.0:
        t, s = 1.0, (np.clip((b - c) / a, 0.0, 1.0) if a > 0 else 0.0)
    p = a0 + s * d1
    q = b0 + t * d2
    return float(np.linalg.norm(p - q)), float(s), float(t)
