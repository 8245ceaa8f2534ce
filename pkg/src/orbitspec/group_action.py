"""Group side: scalar/unimodular splitting, chart actions, factorization.

An invertible matrix g splits as g = zeta h with zeta = |det g|^(1/n) > 0
and |det h| = 1.  The induced action on the affine chart of the flag
variety is a Moebius map built from the blocks of h^(-1), twisted by the
cocycle |a + b.eta|^(-s); the scalar part contributes |zeta|^s.  All
formulas are field-agnostic: the real case has s = i lambda + n/2 and the
complex case s = i lambda + n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularity, SingularMatrix
from .profiles import TestFunction

_CHART_TOL = 1e-14


class GroupElement:
    """Invertible matrix with cached determinant splitting g = zeta h."""

    def __init__(self, matrix):
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        self.matrix = m.astype(complex) if np.iscomplexobj(m) else m.astype(float)
        self.field = "complex" if np.iscomplexobj(m) else "real"
        self.n = m.shape[0]
        det = np.linalg.det(self.matrix)
        if not np.isfinite(abs(det)) or abs(det) < 1e-300:
            raise SingularMatrix("matrix has (numerically) vanishing determinant")
        self.det = det
        # zeta is always the positive real |det|^(1/n); in the real case
        # with det < 0 the unimodular part has det h = -1, which the
        # cocycle never sees because it is built from |a + b.eta|
        self.zeta = float(abs(det) ** (1.0 / self.n))
        self.unimodular = self.matrix / self.zeta

    def __matmul__(self, other):
        return GroupElement(self.matrix @ other.matrix)

    def inv(self):
        return GroupElement(np.linalg.inv(self.matrix))

    def __repr__(self):
        return f"GroupElement(n={self.n}, field={self.field}, det={self.det:.6g})"


@dataclass(frozen=True)
class BlockForm:
    """Blocks (a, b, c, d) of the inverse unimodular part h^(-1).

    a is the (1,1) scalar, b the 1 x (n-1) row, c the (n-1) x 1 column,
    d the (n-1) x (n-1) block; reassembled they give h^(-1) back.
    """

    a: complex
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @property
    def n(self):
        return self.b.shape[0] + 1

    def reassemble(self):
        n = self.n
        out = np.empty((n, n), dtype=np.result_type(self.b, type(self.a)))
        out[0, 0] = self.a
        out[0, 1:] = self.b
        out[1:, 0] = self.c
        out[1:, 1:] = self.d
        return out

    @staticmethod
    def from_matrix(m):
        m = np.asarray(m)
        return BlockForm(a=m[0, 0], b=m[0, 1:].copy(), c=m[1:, 0].copy(), d=m[1:, 1:].copy())


def block_decompose(g: GroupElement):
    """(zeta, blocks of (zeta^(-1) g)^(-1)) for an invertible g."""
    try:
        hinv = np.linalg.inv(g.unimodular)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded in ctor
        raise SingularMatrix(str(exc)) from exc
    return g.zeta, BlockForm.from_matrix(hinv)


def _denominator(blocks: BlockForm, eta):
    """a + b.eta, vectorized over chart points (..., n-1)."""
    eta = np.asarray(eta)
    return blocks.a + eta @ blocks.b


def mobius(blocks: BlockForm, eta):
    """Chart Moebius map eta -> (c + d.eta) / (a + b.eta).

    Raises ChartSingularity on the lower-dimensional exceptional set
    where the denominator vanishes.
    """
    eta = np.asarray(eta)
    den = _denominator(blocks, eta)
    if np.any(np.abs(den) < _CHART_TOL):
        raise ChartSingularity("a + b.eta vanishes")
    num = eta @ blocks.d.T + blocks.c
    return num / den[..., None]


def factorize_parabolic(h, x):
    """Factor h n(x) into unipotent-lower, block-diagonal, diagonal, unipotent-upper.

    h is a matrix with |det h| = 1 (or a GroupElement, whose unimodular
    part is used); n(x) is the unit lower block-triangular matrix with
    column x.  Returns (nbar, m, a, nupper) with

        nbar  unit lower block-triangular,
        m     block-diagonal, unimodular corner beta/|beta|,
        a     diag(|beta|, |beta|^(-1/(n-1)) I),
        nupper unit upper block-triangular,

    where beta = a_h + b_h.x is built from the blocks of h itself.  The
    product reproduces h n(x) exactly; beta = 0 is the exceptional set.
    """
    if isinstance(h, GroupElement):
        h = h.unimodular
    h = np.asarray(h)
    n = h.shape[0]
    x = np.atleast_1d(np.asarray(x))
    if x.shape != (n - 1,):
        raise ValueError("chart point has wrong length")
    a_h = h[0, 0]
    b_h = h[0, 1:]
    c_h = h[1:, 0]
    d_h = h[1:, 1:]
    beta = a_h + b_h @ x
    if abs(beta) < _CHART_TOL:
        raise ChartSingularity("factorization undefined: a + b.x = 0")
    gamma = (c_h + d_h @ x) / beta
    dtype = h.dtype
    eye = np.eye(n - 1, dtype=dtype)

    nbar = np.eye(n, dtype=dtype)
    nbar[1:, 0] = gamma

    m = np.zeros((n, n), dtype=dtype)
    m[0, 0] = beta / abs(beta)
    m[1:, 1:] = abs(beta) ** (1.0 / (n - 1)) * (d_h - np.outer(gamma, b_h))

    a_mat = np.zeros((n, n), dtype=dtype)
    a_mat[0, 0] = abs(beta)
    a_mat[1:, 1:] = abs(beta) ** (-1.0 / (n - 1)) * eye

    nupper = np.eye(n, dtype=dtype)
    nupper[0, 1:] = b_h / beta

    return nbar, m, a_mat, nupper


def chart_translation(x):
    """Unit lower block-triangular matrix n(x) with first column (1, x)."""
    x = np.atleast_1d(np.asarray(x))
    n = x.shape[0] + 1
    out = np.eye(n, dtype=x.dtype if np.iscomplexobj(x) else float)
    out[1:, 0] = x
    return out


def _exponent(lam, n, case):
    if case == "real":
        return 1j * lam + 0.5 * n
    if case == "complex":
        return 1j * lam + float(n)
    raise ValueError("case must be 'real' or 'complex'")


def induced_action(lam, blocks: BlockForm, fn, eta, case="real"):
    """Action of the unimodular group in the chart picture.

    Evaluates |a + b.eta|^(-s) fn(mobius(eta)) with s = i lam + n/2
    (real case) or i lam + n (complex case); ``blocks`` must come from
    h^(-1).  Vectorized over chart points of shape (..., n-1).
    """
    eta = np.asarray(eta)
    den = _denominator(blocks, eta)
    if np.any(np.abs(den) < _CHART_TOL):
        raise ChartSingularity("a + b.eta vanishes")
    s = _exponent(lam, blocks.n, case)
    cocycle = np.abs(den) ** (-s)
    moved = (eta @ blocks.d.T + blocks.c) / den[..., None]
    return cocycle * fn(moved)


def full_action(lam, g: GroupElement, fn, eta, case=None):
    """Action of the full linear group: scalar character times chart action.

    The scalar part acts by |zeta|^s; because it only sees the modulus of
    the determinant, the composition law has no phase defect in the
    complex case.
    """
    if case is None:
        case = g.field
    zeta, blocks = block_decompose(g)
    s = _exponent(lam, g.n, case)
    return zeta**s * induced_action(lam, blocks, fn, eta, case=case)


def spherical_function(lam, n, case="real"):
    """The compact-group-fixed vector eta -> (1 + |eta|^2)^(-s/2)."""
    s = _exponent(lam, n, case)

    def fn(eta):
        eta = np.asarray(eta)
        if np.iscomplexobj(eta):
            norm2 = np.sum((eta * eta.conjugate()).real, axis=-1)
        else:
            norm2 = np.sum(eta * eta, axis=-1)
        return (1.0 + norm2) ** (-0.5 * s)

    return fn


def orbit_action(g: GroupElement, f: TestFunction, x, unitarity_exponent=1.0):
    """Pointwise action on orbit functions: det-factor times f(g^T x) / f(g* x).

    With exponent 1 this is the action det(g) f(g^T x) in the real case
    and det_R(g^*) f(g^* x) in the complex case (det_R is the determinant
    of the real-linear map, i.e. |det g|^2).  With exponent 1/2 the
    det-factor is replaced by its square root in modulus, which makes the
    action unitary on L^2.
    """
    return orbit_transform(g, f, unitarity_exponent).evaluate(x)


def orbit_transform(g: GroupElement, f: TestFunction, unitarity_exponent=1.0) -> TestFunction:
    """The transformed test function from orbit_action, as a TestFunction."""
    if f.field != g.field:
        raise ValueError("field mismatch between function and group element")
    if f.dim != g.n:
        raise ValueError("dimension mismatch")
    if f.field == "real":
        arg = g.matrix.T
        detfac = np.linalg.det(g.matrix)  # real, may be negative
        factor = detfac if unitarity_exponent == 1.0 else abs(detfac) ** unitarity_exponent
    else:
        arg = g.matrix.conjugate().T
        det_r = abs(g.det) ** 2  # determinant of the underlying real-linear map
        factor = det_r**unitarity_exponent
    return f.compose(arg, factor)
