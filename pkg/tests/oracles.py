"""Independent high-precision oracles used across the test suite.

The Bessel/Hankel oracle is an mpmath (50-digit) implementation of the
ascending power series for small argument and the Hankel asymptotic
expansion for large argument -- a different code path and a different
precision model from the production branches in hnabem.hankel.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 50

_GAMMA = mp.euler


def _series_jy(z):
    z = mp.mpf(z)
    q = z * z / 4
    t = mp.mpf(1)
    u = mp.mpf(1)
    j0 = mp.mpf(1)
    sh = mp.mpf(0)
    j1s = mp.mpf(1)
    sy1 = mp.mpf(1)
    harm = mp.mpf(0)
    m = 1
    while True:
        harm += mp.mpf(1) / m
        t = -t * q / (m * m)
        u = -u * q / (m * (m + 1))
        j0 += t
        sh += harm * t
        j1s += u
        sy1 += (2 * harm + mp.mpf(1) / (m + 1)) * u
        if abs(t) < mp.mpf(10) ** (-60) and abs(u) < mp.mpf(10) ** (-60):
            break
        m += 1
        if m > 500:
            break
    lg = mp.log(z / 2) + _GAMMA
    y0 = (2 / mp.pi) * (lg * j0 - sh)
    j1 = (z / 2) * j1s
    y1 = (2 / mp.pi) * lg * j1 - 2 / (mp.pi * z) - (z / (2 * mp.pi)) * sy1
    return j0, y0, j1, y1


def _asymptotic_h(z, order):
    z = mp.mpf(z)
    term = mp.mpc(1)
    total = mp.mpc(1)
    prev = mp.inf
    fournu2 = 4 * order * order
    m = 1
    while True:
        term = term * mp.mpf(fournu2 - (2 * m - 1) ** 2) / (8 * m) * (mp.mpc(0, 1) / z)
        if abs(term) >= prev or abs(term) < mp.mpf(10) ** (-45):
            if abs(term) < prev:
                total += term
            break
        total += term
        prev = abs(term)
        m += 1
    phase = z - (mp.mpf(order) / 2 + mp.mpf(1) / 4) * mp.pi
    return mp.sqrt(2 / (mp.pi * z)) * mp.exp(mp.mpc(0, 1) * phase) * total


def hankel1_oracle(order, z):
    """H^{(1)}_order(z) to ~40 digits for real z > 0, order in {0, 1}."""
    z = mp.mpf(z)
    if z < 30:
        j0, y0, j1, y1 = _series_jy(z)
        return mp.mpc(j0, y0) if order == 0 else mp.mpc(j1, y1)
    return _asymptotic_h(z, order)


def hankel1_oracle_c(order, z):
    return complex(hankel1_oracle(order, z))


def adaptive_quad(f, a, b, singularities=(), tol=1e-12):
    """mpmath adaptive quadrature of a complex python callable."""
    pts = sorted({a, b, *singularities})
    val = mp.quad(lambda t: mp.mpc(f(float(t))), pts)
    return complex(val)


def gauss_legendre_oracle(n):
    """Nodes/weights from numpy's independent Gauss-Legendre implementation."""
    return np.polynomial.legendre.leggauss(n)
