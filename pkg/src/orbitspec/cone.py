"""Rank-one boundary orbit geometry of the positive matrix cones.

The boundary of the cone of positive definite symmetric (Hermitian)
matrices stratifies by rank; the rank-one stratum is the image of the
outer-square map v -> v v^T (v v^*), which is 2-to-1 (circle-to-1) and
pushes Lebesgue measure forward to the orbit measure used everywhere in
the spectral modules.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_CONFIG
from .errors import DimensionTooLarge, NotPSD, ZeroVector
from .profiles import TestFunction
from .quadrature import quad_1d, quad_nd


def rank_one_embedding(v):
    """Map a nonzero vector to the rank-one matrix v v^T (v v^* complex).

    Invariant under v -> -v (real) and v -> e^{i theta} v (complex), so it
    identifies the quotient of the punctured vector space with the
    rank-one stratum.
    """
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("expected a vector")
    if np.linalg.norm(v) == 0.0:
        raise ZeroVector("rank_one_embedding requires a nonzero vector")
    return np.outer(v, v.conjugate())


def stratum_rank(x, tol=None):
    """Rank stratum of a positive semidefinite matrix.

    Counts eigenvalues above ``tol`` (default 1e-10 * ||x||); an
    eigenvalue below ``-tol`` raises NotPSD.  Interior points of the cone
    return the full dimension.
    """
    x = np.asarray(x)
    if x.shape[0] != x.shape[1]:
        raise ValueError("expected a square matrix")
    herm_dev = np.max(np.abs(x - x.conjugate().T)) if x.size else 0.0
    scale = max(np.max(np.abs(x)), 1e-300)
    if herm_dev > 1e-12 * scale:
        raise ValueError("matrix is not symmetric/Hermitian")
    if tol is None:
        tol = 1e-10 * np.linalg.norm(x, 2)
    tol = max(float(tol), 0.0)
    eig = np.linalg.eigvalsh(x)
    if eig.size and eig[0] < -tol:
        raise NotPSD(f"eigenvalue {eig[0]:.3e} below -tol")
    return int(np.count_nonzero(eig > tol))


def orbit_integral(f: TestFunction, cfg=DEFAULT_CONFIG):
    """Integral of an orbit function against the pushed-forward measure.

    The function is represented by its pullback ``f`` on the vector
    space, so this is a plain Lebesgue integral over R^n or C^n.  In the
    complex case the U(1) invariance of admissible functions removes one
    angular variable exactly, which keeps the quadrature dimension at
    2n - 1 (supported for n = 2).
    """
    r = f.support_radius()
    n = f.dim
    if f.field == "real":
        if n > 4:
            raise DimensionTooLarge("real orbit integrals support n <= 4")
        box = [(-r, r)] * n
        val, _ = quad_nd(f.evaluate, box, cfg, support_ball=r)
        return val
    if n == 1:
        val, _ = quad_1d(
            lambda t: f.evaluate(t[:, None].astype(complex)) * t, (0.0, r), cfg
        )
        return 2.0 * np.pi * val
    if n != 2:
        raise DimensionTooLarge("complex orbit integrals support n <= 2")

    def reduced(x):
        # x columns: Re u, Im u, t  with z = (u, t), t >= 0 real
        z = np.empty((x.shape[0], 2), dtype=complex)
        z[:, 0] = x[:, 0] + 1j * x[:, 1]
        z[:, 1] = x[:, 2]
        return f.evaluate(z) * x[:, 2]

    box = [(-r, r), (-r, r), (0.0, r)]
    val, _ = quad_nd(reduced, box, cfg, support_ball=r)
    return 2.0 * np.pi * val


def quasi_invariance_residual(f: TestFunction, g, cfg=DEFAULT_CONFIG):
    """Residual of the pushforward-measure scaling law under g.

    For the rank-one orbit measure the pullback identity is

        integral f(eta(g x)) dx = |det g|^(-d) integral f(eta(x)) dx,

    d = 1 (real) or 2 (complex; determinant of g as a real-linear map).
    Returns |lhs - rhs| / |rhs-side base integral|; expected to vanish up
    to quadrature error.
    """
    g = np.asarray(g)
    if g.shape != (f.dim, f.dim):
        raise ValueError("group element shape mismatch")
    det = np.linalg.det(g)
    if abs(det) == 0.0:
        raise ValueError("singular group element")
    d = 1 if f.field == "real" else 2
    base = orbit_integral(f, cfg)
    moved = orbit_integral(f.compose(g, 1.0), cfg)
    return abs(moved - abs(det) ** (-d) * base) / abs(base)
