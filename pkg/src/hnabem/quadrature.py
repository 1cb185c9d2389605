"""Quadrature: Gauss rules, oscillation-sized panels, and log-singular machinery.

Oscillatory integrands get composite Gauss with panel width at most
(2 pi / k) * (order / ppw).  Kernel singularities are handled two ways:

* across elements / pieces, panels shrink geometrically toward the singular
  (or nearest) point until they are either proportional to the gap or hit a
  relative floor, after which plain tensor Gauss resolves the integrand;
* on the diagonal of a same-element product domain, the ln|s-t| factor is
  integrated exactly against Lagrange polynomials via precomputed reference
  moment matrices (same-panel and touching-panel shapes).
"""

import math
from dataclasses import dataclass

import numpy as np

_LADDER_RATIO = 0.3     # geometric panel shrink toward near-singular points
_LADDER_FLOOR = 1e-13   # relative floor for ladder panel size


# ---------------------------------------------------------------------------
# Gauss-Legendre rules
# ---------------------------------------------------------------------------

_gauss_cache = {}


def gauss_legendre(n):
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.

    Nodes are accurate to ~1e-15; weights w = 2 / ((1-x^2) P_n'(x)^2).
    """
    if n < 1:
        raise ValueError("need at least one point")
    if n in _gauss_cache:
        return _gauss_cache[n]
    i = np.arange(n)
    x = np.cos(np.pi * (i + 0.75) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        if n == 1:
            p1 = x.copy()
        for q in range(2, n + 1):
            p0, p1 = p1, ((2 * q - 1) * x * p1 - (q - 1) * p0) / q
        if n == 1:
            pn, pnm1 = p1, p0
        else:
            pn, pnm1 = p1, p0
        dp = n * (x * pn - pnm1) / (x * x - 1.0)
        dx = pn / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for q in range(2, n + 1):
        p0, p1 = p1, ((2 * q - 1) * x * p1 - (q - 1) * p0) / q
    pn, pnm1 = p1, p0
    dp = n * (x * pn - pnm1) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = np.sort(x)
    order = np.argsort(np.cos(np.pi * (i + 0.75) / (n + 0.5)))
    w = w[order]
    _gauss_cache[n] = (x, w)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Composite rule on an interval: global nodes, weights, panel edges."""

    nodes: np.ndarray
    weights: np.ndarray
    edges: np.ndarray   # panel boundaries, len = n_panels + 1
    order: int

    @property
    def n_panels(self):
        return len(self.edges) - 1

    def panel_slice(self, i):
        return slice(i * self.order, (i + 1) * self.order)


def rule_on_breaks(breaks, order) -> QuadratureRule:
    x, w = gauss_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    a = breaks[:-1]
    h = np.diff(breaks)
    nodes = (a[:, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes=nodes, weights=weights, edges=breaks, order=order)


def osc_panel_width(k, order, ppw):
    """Max panel width resolving e^{iks}: (2 pi / k)(order / ppw)."""
    if k <= 0:
        return math.inf
    return (2.0 * math.pi / k) * (order / ppw)


def uniform_breaks(a, b, hmax):
    n = max(1, math.ceil((b - a) / hmax)) if math.isfinite(hmax) else 1
    return np.linspace(a, b, n + 1)


def ladder_breaks(a, b, toward_left, hmax, near_dist=0.0,
                  ratio=_LADDER_RATIO, floor_rel=_LADDER_FLOOR, floor_abs=0.0):
    """Panels graded geometrically toward one endpoint, capped at hmax.

    Panel widths grow like distance-to-endpoint * (1/ratio - 1) starting at
    max(near_dist, floors); used for (near-)singular kernels whose trouble
    spot sits at or beyond that endpoint at distance near_dist.  floor_abs
    keeps quadrature nodes representably far from a shared corner when the
    element itself is tiny.
    """
    length = b - a
    floor = max(floor_rel * length, floor_abs, near_dist * (1.0 / ratio - 1.0))
    if floor <= 0.0:
        floor = floor_rel * length
    if floor >= length:
        return np.array([a, b])
    pts = [0.0]
    pos = 0.0
    while pos < length:
        width = max((pos + near_dist) * (1.0 / ratio - 1.0), floor)
        width = min(width, hmax, length - pos)
        # avoid a sliver at the far end
        if length - (pos + width) < 0.25 * width:
            width = length - pos
        pos += width
        pts.append(pos)
        if len(pts) > 300:
            pts[-1] = length
            break
    pts = np.array(pts)
    breaks = a + pts if toward_left else b - pts[::-1]
    breaks[0] = a
    breaks[-1] = b
    return breaks


def element_rule_plain(a, b, k_osc, order, ppw) -> QuadratureRule:
    return rule_on_breaks(uniform_breaks(a, b, osc_panel_width(k_osc, order, ppw)), order)


def element_rule_graded(a, b, toward_left, k_osc, order, ppw, near_dist=0.0) -> QuadratureRule:
    hmax = osc_panel_width(k_osc, order, ppw)
    return rule_on_breaks(ladder_breaks(a, b, toward_left, hmax, near_dist), order)


# ---------------------------------------------------------------------------
# Public 1D integrators
# ---------------------------------------------------------------------------


def integrate_oscillatory(f, a, b, k, ppw=10, order=12):
    """Composite Gauss for smooth integrands oscillating at frequency <= k."""
    rule = element_rule_plain(a, b, k, order, ppw)
    return np.sum(np.asarray(f(rule.nodes)) * rule.weights)


def integrate_log_singular(f, a, b, s0, order=12, ratio=0.15, floor_rel=1e-12):
    """Geometric panels toward s0 (inside [a, b]) with Gauss on each panel.

    Handles integrands with at worst log|s - s0| behavior; nodes never hit
    s0 exactly.
    """
    total = 0.0 + 0.0j
    for (lo, hi, toward_left) in (((a, s0, False)) , ((s0, b, True))):
        if hi - lo <= 0:
            continue
        length = hi - lo
        pts = [0.0]
        pos = 0.0
        floor = floor_rel * length
        while pos < length:
            width = max(pos * (1.0 / ratio - 1.0), floor)
            width = min(width, length - pos)
            if length - (pos + width) < 0.25 * width:
                width = length - pos
            pos += width
            pts.append(pos)
            if len(pts) > 400:
                pts[-1] = length
                break
        pts = np.asarray(pts)
        breaks = (lo + pts) if toward_left else (hi - pts[::-1])
        breaks[0], breaks[-1] = lo, hi
        rule = rule_on_breaks(breaks, order)
        total += np.sum(np.asarray(f(rule.nodes)) * rule.weights)
    return total


# ---------------------------------------------------------------------------
# Reference log-moment matrices
# ---------------------------------------------------------------------------


def gauss01(n):
    x, w = gauss_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def lagrange_values(nodes, x):
    """Matrix L[i, b] = l_b(x_i) for the Lagrange basis at `nodes`."""
    nodes = np.asarray(nodes)
    x = np.asarray(x)
    L = np.ones((len(x), len(nodes)))
    for b in range(len(nodes)):
        for m in range(len(nodes)):
            if m != b:
                L[:, b] *= (x - nodes[m]) / (nodes[b] - nodes[m])
    return L


def _graded_unit_breaks(depth=28, ratio=0.3):
    pts = [1.0]
    v = 1.0
    for _ in range(depth):
        v *= ratio
        pts.append(v)
    pts.append(0.0)
    return np.array(sorted(pts))


_moment_cache = {}


def log_moment_same(order):
    """R[a, b] = int int over [0,1]^2 of ln|s-t| l_a(s) l_b(t), plus unit weights.

    Computed once per Gauss order from the triangle substitution t = s(1-xi),
    with graded rules absorbing the endpoint logarithms; checked against the
    closed form sum(R) = -3/2 in the tests.
    """
    key = ("same", order)
    if key in _moment_cache:
        return _moment_cache[key]
    xg, wg = gauss01(order)
    srule = rule_on_breaks(_graded_unit_breaks(), 16)
    xirule = rule_on_breaks(_graded_unit_breaks(), 16)
    xi_plain, wxi_plain = gauss01(max(order, 12))

    s = srule.nodes                          # (ns,)
    ls = lagrange_values(xg, s)              # (ns, order)
    # inner arguments s(1 - xi)
    arg_plain = s[:, None] * (1.0 - xi_plain[None, :])
    arg_log = s[:, None] * (1.0 - xirule.nodes[None, :])
    A = np.einsum("q,sqb->sb", wxi_plain,
                  lagrange_values(xg, arg_plain.ravel()).reshape(len(s), -1, order))
    B = np.einsum("q,q,sqb->sb", xirule.weights, np.log(xirule.nodes) / 1.0,
                  lagrange_values(xg, arg_log.ravel()).reshape(len(s), -1, order))
    inner = np.log(s)[:, None] * A + B       # (ns, order) indexed by beta
    T = np.einsum("s,s,sa,sb->ab", srule.weights, s, ls, inner)
    R = T + T.T
    g = wg.copy()
    _moment_cache[key] = (R, g)
    return R, g


def log_moment_contig(order):
    """R[a, b] = int int of ln((1-s) + t) l_a(s) l_b(t) over [0,1]^2.

    Moment matrix for two touching equal-width panels (left panel variable s,
    right panel variable t); the log argument is the gap (1-s) + t.
    """
    key = ("contig", order)
    if key in _moment_cache:
        return _moment_cache[key]
    xg, _ = gauss01(order)
    urule = rule_on_breaks(_graded_unit_breaks(), 16)
    trule = rule_on_breaks(_graded_unit_breaks(), 16)
    u = urule.nodes
    t = trule.nodes
    lu = lagrange_values(xg, 1.0 - u)        # (nu, order) for alpha
    lt = lagrange_values(xg, t)              # (nt, order) for beta
    lg = np.log(u[:, None] + t[None, :])     # (nu, nt)
    T = np.einsum("u,t,ut,ua,tb->ab", urule.weights, trule.weights, lg, lu, lt)
    _moment_cache[key] = T
    return T
