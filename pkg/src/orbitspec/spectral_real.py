"""Spectral analysis of the rank-one orbit transform over the real field.

The central object maps an even test function f on R^n to

    (T f)(z, eta) = integral f(x) |<x, (1, eta)>|^(-s) dx,   s = i z + n/2,

convergent for Re s < 1 and continued meromorphically elsewhere.  For
radial f it collapses to a reduction constant times a weighted Mellin
transform times the spherical vector; inversion and the Plancherel
density follow from the fixed Mellin convention in spectral_common.

Derived normative constants (the published closed forms contain internal
inconsistencies; the quadrature oracles in the test suite arbitrate):

    C(n, lambda) = 2 pi^(n/2) Gamma(-(2 i lambda + n - 2) / 4)
                   / (Gamma(1/2) Gamma((-2 i lambda + n) / 4))
    w(lambda)    = (A_n / 2 pi) |C(n, lambda)|^(-2),  A_n = 2 pi^(n/2) / Gamma(n/2)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, QuadratureConfig
from .errors import (
    DimensionTooLarge,
    DivergentRegion,
    InsufficientSmoothness,
    PoleError,
    PoleOfContinuation,
)
from .group_action import GroupElement, block_decompose, mobius, orbit_transform
from .jets import directional_derivative
from .profiles import TestFunction
from .quadrature import quad_nd
from .special import _is_nonpositive_integer, log_gamma, sphere_area
from .spectral_common import (
    MellinTable,
    SpectralSamples,
    invert_samples,
    mellin,  # re-exported: the radial engine lives in spectral_common
    mellin_weighted,
    parseval_residual,
    symmetric_grid,
)

__all__ = [
    "SpectralPoint",
    "mellin",
    "reduction_constant",
    "spectral_coefficient",
    "spherical_vector",
    "transform_direct",
    "transform_continued",
    "build_samples",
    "invert",
    "plancherel_density",
    "PlancherelDensity",
    "plancherel_residual",
    "equivariance_residual",
    "decay_check",
]


@dataclass(frozen=True)
class SpectralPoint:
    """Continuation variable z with derived exponent s = i z + n/2."""

    z: complex
    n: int

    @property
    def s(self):
        return 1j * complex(self.z) + 0.5 * self.n

    @property
    def convergent(self):
        return self.s.real < 1.0


def _exponent(z, n):
    if isinstance(z, SpectralPoint):
        if z.n != n:
            raise ValueError("SpectralPoint dimension mismatch")
        return z.s
    return 1j * complex(z) + 0.5 * n


def reduction_constant(n, lam):
    """C(n, lambda): the radial reduction constant, vectorized in lambda.

    Meromorphic continuation of the sphere average times the area
    constant; for real lambda the only pole sits at lambda = 0 when
    n = 2 mod 4, where PoleError is raised.
    """
    lam = np.asarray(lam, dtype=complex)
    num = -(2j * lam + (n - 2.0)) / 4.0
    den = (-2j * lam + n) / 4.0
    if np.any(_is_nonpositive_integer(num)):
        raise PoleError("reduction constant pole (Gamma numerator)")
    out = np.asarray(
        2.0
        * np.pi ** (0.5 * n)
        * np.exp(log_gamma(num) - log_gamma(0.5) - log_gamma(den))
    )
    return complex(out) if out.ndim == 0 else out


def spectral_coefficient(f: TestFunction, lam, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Radial spectral coefficient C(n, lambda) M(r -> r^(n/2) f)(lambda)."""
    if not f.is_radial:
        raise ValueError("spectral coefficient requires a radial function")
    c = reduction_constant(f.dim, lam)
    return f.scale * c * mellin_weighted(f.profile, 0.5 * f.dim, lam, cfg)


def spherical_vector(lam, eta, n):
    """(1 + |eta|^2)^(-(i lam + n/2)/2) at a chart point eta."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    s = 1j * complex(lam) + 0.5 * n
    return (1.0 + float(eta @ eta)) ** (-0.5 * s)


def transform_direct(f: TestFunction, z, eta, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """The defining n-dimensional integral, in the convergent region only.

    eta is a chart point of length n-1; the singular hyperplane
    <x, (1, eta)> = 0 is declared to the quadrature engine, nothing else
    about the integrand structure is used.
    """
    n = f.dim
    s = _exponent(z, n)
    if s.real >= 1.0:
        raise DivergentRegion(f"Re s = {s.real} >= 1")
    if n > 4:
        raise DimensionTooLarge("direct quadrature supports n <= 4")
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (n - 1,):
        raise ValueError("chart point has wrong length")
    v = np.concatenate(([1.0], eta))
    radius = f.support_radius()
    expo = -s.real if s.imag == 0.0 else -s  # real powers are much cheaper

    def integrand(x):
        return f.evaluate(x) * np.abs(x @ v) ** expo

    # the integrand is even (orbit functions are even by construction),
    # so integrate over a half-space and double
    box = [(-radius, radius)] * n
    inner = int(np.argmax(np.abs(v)))
    half_dim = 0 if inner != 0 else 1
    box[half_dim] = (0.0, radius)
    val, _ = quad_nd(
        integrand,
        box,
        cfg,
        singular_hyperplane=(v, 0.0, max(s.real, 0.0)),
        support_ball=radius,
    )
    return 2.0 * complex(val)


def rotation_taking_e1(u, variant=0):
    """Orthogonal matrix with first column u (unit vector).

    variant 0 is the Householder reflection swapping e1 and u; variant 1
    composes it with a sign flip in the second coordinate, giving a
    second, genuinely different choice for rotation-independence checks.
    """
    u = np.asarray(u, dtype=float)
    n = u.size
    w = u - np.eye(n)[0]
    nw = w @ w
    if nw < 1e-28:
        rot = np.eye(n)
    else:
        rot = np.eye(n) - 2.0 * np.outer(w, w) / nw
    if variant == 1:
        rot = rot.copy()
        rot[:, 1] = -rot[:, 1]
    return rot


def transform_continued(
    f: TestFunction,
    lam,
    eta,
    k,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    rotation_variant=0,
):
    """Meromorphic continuation by k-fold integration by parts.

    Evaluates

        (1 + |eta|^2)^(-s/2) / prod_{j=1..k} (j - s)
          * [ I_minus + (-1)^k I_plus ],

    where I_{+/-} integrate the k-th derivative of f composed with a
    rotation aligning (1, eta) with the first axis, against
    |y_1|^(k - s) over the half-spaces.  Valid for Re s < k + 1 with
    poles at s = 1 .. k; the value is independent of both k and the
    rotation choice, which the tests exercise.
    """
    n = f.dim
    s = _exponent(lam, n)
    k = int(k)
    if k < 1:
        raise ValueError("need k >= 1")
    if k > f.profile.k_max:
        raise InsufficientSmoothness(f"profile provides {f.profile.k_max} derivatives")
    if not s.real - k < 1.0:
        raise ValueError(f"k = {k} too small for Re s = {s.real}")
    for j in range(1, k + 1):
        if abs(s - j) < 1e-12:
            raise PoleOfContinuation(f"s = {j} is a continuation pole")
    if n > 4:
        raise DimensionTooLarge("continued quadrature supports n <= 4")
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    v = np.concatenate(([1.0], eta))
    norm_v = float(np.sqrt(v @ v))
    rot = rotation_taking_e1(v / norm_v, variant=rotation_variant)
    fg = f.compose(rot, 1.0)
    radius = f.support_radius()
    e1 = np.eye(n)[0]
    alpha = max(s.real - k, 0.0)

    expo = (k - s).real if s.imag == 0.0 else k - s

    def integrand(y):
        dk = directional_derivative(fg, y, e1, k)
        return dk * np.abs(y[:, 0]) ** expo

    hyper = (e1, 0.0, alpha)
    box_minus = [(-radius, 0.0)] + [(-radius, radius)] * (n - 1)
    box_plus = [(0.0, radius)] + [(-radius, radius)] * (n - 1)
    i_minus, _ = quad_nd(
        integrand, box_minus, cfg, singular_hyperplane=hyper, support_ball=radius
    )
    i_plus, _ = quad_nd(
        integrand, box_plus, cfg, singular_hyperplane=hyper, support_ball=radius
    )

    denom = np.prod([j - s for j in range(1, k + 1)])
    pref = (1.0 + float(eta @ eta)) ** (-0.5 * s) / denom
    return pref * (i_minus + (-1) ** k * i_plus)


def build_samples(
    f: TestFunction,
    lam_max=200.0,
    step=0.05,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    validate_tol=1e-8,
):
    """Spectral samples of a radial function on a symmetric lambda grid.

    Uses the fixed-rule Mellin table for the sweep and cross-checks it
    against the adaptive engine; the grid omits the origin exactly when
    the reduction constant has its n = 2 mod 4 pole there.
    """
    if not f.is_radial:
        raise ValueError("samples require a radial function")
    n = f.dim
    exclude = n % 4 == 2
    lam = symmetric_grid(lam_max, step, exclude)
    table = MellinTable(f.profile, 0.5 * n, lam_max)
    dev = table.validate(cfg)
    scale = max(abs(table(0.123)), 1e-300)
    if dev > validate_tol * scale:
        raise RuntimeError(f"Mellin table validation failed: {dev:.3e}")
    coeff = reduction_constant(n, lam)
    values = f.scale * coeff * table(lam)
    density = plancherel_density(n, lam)
    return SpectralSamples(
        lam=lam, values=values, coeff=coeff, density=density, n=n, field="real"
    )


def invert(samples: SpectralSamples, r, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Reconstruct the profile at radius r from spectral samples."""
    return invert_samples(samples, r, 0.5 * samples.n, cfg)


def plancherel_density(n, lam):
    """w(lambda) = (A_n / 2 pi) |C(n, lambda)|^(-2); zero at poles of C."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    area = sphere_area(n)
    out = np.zeros(lam_arr.shape)
    num = -(2j * lam_arr + (n - 2.0)) / 4.0
    pole = _is_nonpositive_integer(num)
    ok = ~pole
    if np.any(ok):
        c = reduction_constant(n, lam_arr[ok])
        out[ok] = (area / (2.0 * np.pi)) / np.abs(c) ** 2
    return float(out[0]) if np.isscalar(lam) or np.asarray(lam).ndim == 0 else out


@dataclass(frozen=True)
class PlancherelDensity:
    """Callable wrapper bundling the density with its dimension."""

    n: int
    field: str = "real"

    def __call__(self, lam):
        if self.field == "real":
            return plancherel_density(self.n, lam)
        from .spectral_complex import plancherel_density_complex

        return plancherel_density_complex(self.n, lam)


def plancherel_residual(
    f: TestFunction, lam_max=200.0, cfg: QuadratureConfig = DEFAULT_CONFIG
):
    """Relative defect of the Plancherel identity for a radial function."""
    if not f.is_radial:
        raise ValueError("plancherel_residual requires a radial function")
    n = f.dim
    if abs(f.scale) == 0.0:
        return 0.0

    def coeff(lams):
        return f.scale * reduction_constant(n, lams)

    return parseval_residual(f.profile, 0.5 * n, sphere_area(n), coeff, lam_max, cfg)


def equivariance_residual(
    f: TestFunction, g: GroupElement, z, eta, cfg: QuadratureConfig = DEFAULT_CONFIG
):
    """Residual of the intertwining identity in the convergent region.

    Compares the transform of the group-translated function against the
    cocycle-twisted transform at the Moebius-moved chart point; both
    sides are honest n-dimensional quadratures.
    """
    n = f.dim
    s = _exponent(z, n)
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    lhs = transform_direct(orbit_transform(g, f, 1.0), z, eta, cfg)
    zeta, blocks = block_decompose(g)
    den = complex(blocks.a + eta @ blocks.b)
    moved = mobius(blocks, eta)
    rhs = zeta**s * abs(den) ** (-s) * transform_direct(f, z, moved, cfg)
    scale = max(abs(transform_direct(f, z, eta, cfg)), 1e-300)
    return abs(lhs - rhs) / scale


def decay_check(
    f: TestFunction, lam, radii, k=None, cfg: QuadratureConfig = DEFAULT_CONFIG
):
    """Max over |eta| of the continued transform normalized by the
    spherical-vector modulus (1 + |eta|^2)^(-n/4).

    For radial functions the normalized product is constant in |eta|
    (it equals |spectral_coefficient(lam)|), so boundedness over large
    radii is exactly the uniform decay statement.
    """
    n = f.dim
    if k is None:
        k = 1
        while not (0.5 * n - k < 1.0):
            k += 1
    out = 0.0
    for rho in radii:
        eta = np.zeros(n - 1)
        eta[0] = float(rho)
        val = transform_continued(f, lam, eta, k, cfg)
        out = max(out, abs(val) * (1.0 + rho * rho) ** (0.25 * n))
    return out
