"""Block system assembly and direct solve.

The coupled system couples the HNA coefficients v_Gamma and the hp
coefficients v_gamma through

    [ (A_GG phi, psi)_G   ([A_gG + A_GG G] phi, psi)_G ] [a_G]   1 [ (f - A_GG Psi, psi)_G ]
    [ (A_Gg phi, psi)_g   ([A_gg + A_Gg G] phi, psi)_g ] [a_g] = k [ (f - A_Gg Psi, psi)_g ],

with A the combined-potential operator, G the interaction operator and Psi
the physical-optics term.  The interaction-composed blocks are assembled by
exchanging the order of integration: the gamma-trial integral is pulled
outside, leaving standard double integrals of A against the point-source
columns g(., y_r) at the gamma quadrature nodes y_r.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .assembly import Assembler
from .basis import BasisSpace, BasisFunction, Element, build_hna_space, build_hp_space, build_plain_space
from .config import SolverConfig
from .errors import SingularMatrix
from .geometry import Scene, upper_half_plane_indicator
from .kernels import CombinedKernel, InteractionKernel, rhs_data
from .geometry import physical_optics


@dataclass
class GalerkinSystem:
    """Dense block system B a = b with [Gamma | gamma] DOF ordering."""

    matrix: np.ndarray
    rhs: np.ndarray
    scene: Scene
    config: SolverConfig
    space_big: BasisSpace
    space_small: BasisSpace | None
    meta: dict = field(default_factory=dict)

    @property
    def n_big(self):
        return self.space_big.n_dofs

    @property
    def n_small(self):
        return self.space_small.n_dofs if self.space_small is not None else 0


@dataclass
class Solution:
    system: GalerkinSystem
    coefficients: np.ndarray
    rcond: float
    residual: float

    @property
    def v_big(self):
        return self.coefficients[:self.system.n_big]

    @property
    def v_small(self):
        return self.coefficients[self.system.n_big:]

    @property
    def scene(self):
        return self.system.scene

    @property
    def config(self):
        return self.system.config

    def dump(self):
        """Versioned JSON-ready summary: metadata plus the coefficient vector."""
        m = self.system.meta
        return {
            "format": "hnabem-solution/1",
            "k": self.scene.k,
            "eta": self.scene.eta,
            "p": m.get("p"),
            "n_gamma_big": self.system.n_big,
            "n_gamma_small": self.system.n_small,
            "cond_estimate": 1.0 / self.rcond if self.rcond > 0 else float("inf"),
            "rcond": self.rcond,
            "residual": self.residual,
            "coefficients_re": self.coefficients.real.tolist(),
            "coefficients_im": self.coefficients.imag.tolist(),
        }


def small_trace_columns(assembler: Assembler, space_small: BasisSpace):
    """gamma quadrature table: points, weights, per-side indicator, basis matrix.

    Returns (ypoints (R,2), colfun, W) where colfun(x, el, s) gives the
    interaction-kernel columns g(x, y_r) for x on a Gamma element, and
    W[r, n] = v_r phi_n(t_r) contracts columns back to gamma DOFs.
    """
    scene = assembler.scene
    nodes, wts, slices = assembler.trial_rule_table(space_small)
    ypts = np.empty((len(nodes), 2))
    for el, sl in zip(space_small.elements, slices):
        ypts[sl] = space_small.pieces[el.piece_id].point(nodes[sl])
    poly = scene.polygon
    ind = np.stack([upper_half_plane_indicator(poly, j, ypts)
                    for j in range(poly.n_sides)])
    gk = InteractionKernel(scene)

    W = np.zeros((len(nodes), space_small.n_dofs), dtype=complex)
    for el, sl in zip(space_small.elements, slices):
        vals = space_small.element_values(el.index, nodes[sl])
        dofs = [f.dof for f in space_small.functions_on(el.index)]
        W[sl, np.asarray(dofs)] = wts[sl, None] * vals

    def colfun(x, el, s_nodes):
        side = el.piece_id  # Gamma space pieces are the polygon sides in order
        piece = assembler.scene.polygon.pieces[side]
        vals = gk.geometric(np.atleast_2d(x), ypts, piece.normal)
        return vals * ind[side][None, :]

    return ypts, colfun, W


def _psi_column(scene):
    poly = scene.polygon

    def colfun(x, el, s_nodes):
        return np.asarray(physical_optics(scene, s_nodes)).reshape(-1, 1)

    return colfun


def assemble(scene: Scene, space_big: BasisSpace, space_small: BasisSpace | None,
             config: SolverConfig = SolverConfig()) -> GalerkinSystem:
    """Assemble the coupled HNA/hp block system (F_blocks scaling included)."""
    asm = Assembler(scene, config)
    k = scene.k
    ker = CombinedKernel(k, scene.eta)
    n_big = space_big.n_dofs
    n_small = space_small.n_dofs if space_small is not None else 0
    N = n_big + n_small
    B = np.zeros((N, N), dtype=complex)
    b = np.zeros(N, dtype=complex)
    psi_col = _psi_column(scene)

    if n_small:
        _, gcols, W = small_trace_columns(asm, space_small)
        ncols = W.shape[0] + 1

        def columns_big(x, el, s):
            return np.hstack([gcols(x, el, s), psi_col(x, el, s)])

        B11, H1 = asm.block(space_big, space_big, ker, include_half=True,
                            columns=(columns_big, ncols))
        B21, H2 = asm.block(space_small, space_big, ker,
                            columns=(columns_big, ncols))
        B12 = asm.block(space_big, space_small, ker) + H1[:, :-1] @ W
        B22 = asm.block(space_small, space_small, ker, include_half=True) \
            + H2[:, :-1] @ W
        B[:n_big, :n_big] = B11
        B[:n_big, n_big:] = B12
        B[n_big:, :n_big] = B21
        B[n_big:, n_big:] = B22
        psi_big = H1[:, -1]
        psi_small = H2[:, -1]
    else:
        B11, H1 = asm.block(space_big, space_big, ker, include_half=True,
                            columns=(psi_col, 1))
        B[:, :] = B11
        psi_big = H1[:, 0]
        psi_small = np.zeros(0, dtype=complex)

    def ffun(x, el):
        piece_list = space_big.pieces if el.boundary == "Gamma" else space_small.pieces
        normal = piece_list[el.piece_id].normal
        return rhs_data(scene, x, normal)

    f_big = asm.load_vector(space_big, ffun)
    b[:n_big] = (f_big - psi_big) / k
    if n_small:
        f_small = asm.load_vector(space_small, ffun)
        b[n_big:] = (f_small - psi_small) / k

    return GalerkinSystem(matrix=B, rhs=b, scene=scene, config=config,
                          space_big=space_big, space_small=space_small,
                          meta={"k": k, "eta": scene.eta,
                                "p": space_big.meta.get("p"),
                                "ppw": config.effective_ppw,
                                "gauss_order": config.gauss_order})


def solve(system: GalerkinSystem) -> Solution:
    """Dense LU with partial pivoting; stores rcond estimate and residual."""
    B = system.matrix
    rhs = system.rhs
    if not np.all(np.isfinite(B)):
        raise SingularMatrix("non-finite entries in system matrix")
    anorm = np.linalg.norm(B, 1)
    try:
        lu, piv = lu_factor(B)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SingularMatrix(str(exc)) from exc
    if np.any(np.abs(np.diag(lu)) == 0.0):
        raise SingularMatrix("exact pivot breakdown in LU factorization")
    a = lu_solve((lu, piv), rhs)
    rcond, _ = lapack.zgecon(lu, anorm)
    if rcond < 1e-12:
        warnings.warn(f"system nearly singular: rcond = {rcond:.3e}", stacklevel=2)
    nrm = np.linalg.norm(rhs)
    residual = float(np.linalg.norm(B @ a - rhs) / nrm) if nrm > 0 else 0.0
    return Solution(system=system, coefficients=a, rcond=float(rcond),
                    residual=residual)


def build_spaces(scene: Scene, p: int, config: SolverConfig = SolverConfig()):
    vg = build_hna_space(scene.polygon, scene.k, p, sigma=config.sigma,
                         layers=config.layers(p), alpha=config.alpha(p))
    vs = build_hp_space(scene, scene.k, p, sigma=config.sigma,
                        layers=config.layers(p),
                        oversampling=config.oversampling) if scene.obstacles else None
    return vg, vs


def solve_hna(scene: Scene, p: int, config: SolverConfig = SolverConfig()) -> Solution:
    """Build spaces at degree p, assemble and solve."""
    vg, vs = build_spaces(scene, p, config)
    return solve(assemble(scene, vg, vs, config))


def reference_solution(scene: Scene, p_ref: int = 8,
                       config: SolverConfig = SolverConfig()) -> Solution:
    """High-order HNA solve used as the convergence reference."""
    return solve_hna(scene, p_ref, config)


def build_oracle_space(scene: Scene, p_oracle: int = 4, layers: int = None,
                       oversampling: float = 3.0 * np.pi,
                       config: SolverConfig = SolverConfig()) -> BasisSpace:
    """Plain piecewise-polynomial space on all of partial D.

    Uniform degree with corner grading and >= 10 points per wavelength
    (c = 3 pi gives ~12.6 DOFs per wavelength at p >= 3).
    """
    layers = 2 * p_oracle if layers is None else layers
    big = build_plain_space(scene.polygon.pieces, "Gamma", scene.k, p_oracle,
                            layers, config.sigma, oversampling)
    if not scene.obstacles:
        return big
    small = build_plain_space(scene.gamma_pieces, "gamma", scene.k, p_oracle,
                              layers, config.sigma, oversampling)
    return merge_spaces(big, small, scene.k)


def merge_spaces(a: BasisSpace, b: BasisSpace, k) -> BasisSpace:
    """Concatenate two spaces into one (piece ids, element and DOF indices shifted)."""
    pieces = list(a.pieces) + list(b.pieces)
    elements = list(a.elements)
    functions = list(a.functions)
    pshift = len(a.pieces)
    eshift = len(a.elements)
    dshift = a.n_dofs
    for el in b.elements:
        elements.append(Element(el.boundary, el.piece_id + pshift, el.a, el.b,
                                el.degree, el.index + eshift))
    for f in b.functions:
        functions.append(BasisFunction(f.boundary, f.element + eshift, f.degree,
                                       f.direction, f.dof + dshift))
    return BasisSpace("mixed", pieces, elements, functions, k,
                      meta={"merged": (a.meta, b.meta)})


def assemble_standard_oracle(scene: Scene, space: BasisSpace,
                             config: SolverConfig = SolverConfig()) -> GalerkinSystem:
    """Plain Galerkin system (A nu, psi) = (f, psi) on all of partial D.

    No ansatz splitting, no interaction operator, no 1/k scaling: the unknown
    is the physical Neumann trace itself.
    """
    asm = Assembler(scene, config)
    ker = CombinedKernel(scene.k, scene.eta)
    B = asm.block(space, space, ker, include_half=True)

    def ffun(x, el):
        return rhs_data(scene, x, space.pieces[el.piece_id].normal)

    b = asm.load_vector(space, ffun)
    return GalerkinSystem(matrix=B, rhs=b, scene=scene, config=config,
                          space_big=space, space_small=None,
                          meta={"oracle": True, "p": space.meta.get("p"),
                                "k": scene.k, "eta": scene.eta})
