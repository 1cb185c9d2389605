"""Solver configuration shared by meshing, assembly and post-processing."""

import os
from dataclasses import dataclass, field, replace


def default_alpha(p: int) -> float:
    """Corner removal-zone width parameter, max{(1+p)/4, 2}."""
    return max((1.0 + p) / 4.0, 2.0)


def default_layers(p: int) -> int:
    """Graded-mesh layer count n = 2p."""
    return 2 * p


@dataclass(frozen=True)
class SolverConfig:
    """Numerical parameters.

    sigma        : mesh grading parameter, in (0, 1/2)
    oversampling : constant c in the quasi-uniform rule m = ceil(c k L / (2 pi max(p,1)))
    ppw          : points per wavelength for oscillatory quadrature
    gauss_order  : Gauss-Legendre order per quadrature panel
    singular_depth : geometric subdivision depth toward kernel singularities
    high_accuracy  : bump ppw to 16 (slower, tighter quadrature)
    eta          : coupling parameter; None means eta = k
    """

    sigma: float = 0.15
    oversampling: float = 2.0 * 3.141592653589793
    ppw: int = 10
    gauss_order: int = 12
    singular_depth: int = 15
    high_accuracy: bool = False
    eta: float | None = None
    threads: int = field(default_factory=lambda: int(os.environ.get("HNABEM_THREADS", "0")))

    @property
    def effective_ppw(self) -> int:
        return 16 if self.high_accuracy else self.ppw

    def layers(self, p: int) -> int:
        return default_layers(p)

    def alpha(self, p: int) -> float:
        return default_alpha(p)

    def eta_for(self, k: float) -> float:
        return float(k) if self.eta is None else float(self.eta)

    def refined(self, factor: int = 2) -> "SolverConfig":
        """Quadrature-doubled copy, used by self-convergence checks."""
        return replace(self, ppw=self.ppw * factor,
                       singular_depth=self.singular_depth + factor * 2)
