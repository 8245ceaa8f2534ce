"""Machinery shared by the real and complex spectral modules.

The radial reduction turns every spectral quantity into a weighted Mellin
transform m(lambda) = integral g(r) r^power r^(-i lambda) dr/r of a
compactly supported profile.  Grid sweeps evaluate m through a fixed
composite Gauss-Legendre rule (one matrix product for thousands of
lambdas) that is cross-checked against the adaptive engine; single-point
evaluations use the adaptive engine directly.

Conventions fixed here and used everywhere:

    (M g)(lambda) = integral_0^inf g(r) r^(-i lambda) dr / r
    g(r)          = (1 / 2 pi) integral (M g)(lambda) r^(i lambda) d lambda
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .config import DEFAULT_CONFIG, QuadratureConfig
from .errors import TruncationWarning
from .profiles import RadialProfile
from .quadrature import quad_1d

TAIL_WARN_RATIO = 1e-10


def mellin(profile: RadialProfile, lam, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """(M profile)(lambda); lambda may be complex (entire in lambda)."""
    return mellin_weighted(profile, 0.0, lam, cfg)


def mellin_weighted(profile, power, lam, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Mellin transform of r -> r^power profile(r) at a single lambda."""
    lam = complex(lam)
    sup = max(profile.sup_norm(), 1e-300)
    # oscillatory cancellation floors the reachable absolute error
    floor = 1e-15 * sup * profile.r_max ** max(power, 0.0)
    eff = cfg if cfg.abs_tol > 0 else cfg.with_tolerance(abs_tol=floor)

    def integrand(r):
        return profile(r) * np.exp((power - 1.0 - 1j * lam) * np.log(r))

    val, _ = quad_1d(integrand, (profile.r_min, profile.r_max), eff)
    return val


class MellinTable:
    """Fixed-rule evaluator of a weighted Mellin transform on |lambda| <= lam_max.

    Panel count scales with the total phase lam_max * log(r_max / r_min),
    so the composite 15-point rule stays spectrally accurate across the
    whole window; ``validate`` compares against the adaptive engine.
    """

    def __init__(self, profile, power, lam_max):
        self.profile = profile
        self.power = float(power)
        self.lam_max = float(lam_max)
        panels = int(np.ceil(lam_max * np.log(profile.r_max / profile.r_min) / 2.5)) + 16
        x, w = leggauss(15)
        edges = np.linspace(profile.r_min, profile.r_max, panels + 1)
        r = np.concatenate(
            [0.5 * (hi - lo) * x + 0.5 * (hi + lo) for lo, hi in zip(edges[:-1], edges[1:])]
        )
        wts = np.concatenate(
            [0.5 * (hi - lo) * w for lo, hi in zip(edges[:-1], edges[1:])]
        )
        self.log_r = np.log(r)
        self.weights = wts * profile(r) * r ** (self.power - 1.0)

    def __call__(self, lams):
        lams = np.asarray(lams)
        scalar = lams.ndim == 0
        phase = np.exp(-1j * np.outer(np.atleast_1d(lams), self.log_r))
        out = phase @ self.weights
        return complex(out[0]) if scalar else out

    def validate(self, cfg: QuadratureConfig = DEFAULT_CONFIG, n_checks=5, seed=0):
        """Worst absolute deviation from the adaptive engine at random lambdas."""
        rng = np.random.default_rng(seed)
        lams = rng.uniform(-self.lam_max, self.lam_max, n_checks)
        worst = 0.0
        for lam in lams:
            ref = mellin_weighted(self.profile, self.power, lam, cfg)
            worst = max(worst, abs(ref - self(lam)))
        return worst


@dataclass
class SpectralSamples:
    """Spectral coefficients on a symmetric lambda grid.

    values holds the spectral coefficient (reduction constant times
    Mellin transform), coeff the reduction constant itself, density the
    Plancherel weight.  When the constant has a pole at lambda = 0 the
    grid simply omits that point; consumers interpolate across the gap.
    """

    lam: np.ndarray
    values: np.ndarray
    coeff: np.ndarray
    density: np.ndarray
    n: int
    field: str

    def mellin_values(self):
        return self.values / self.coeff

    def to_csv(self):
        buf = io.StringIO()
        cols = "lambda,re_ftilde,im_ftilde,re_C,im_C,w"
        if self.field == "complex":
            cols += ",field_tag"
        buf.write(cols + "\n")
        for i in range(self.lam.size):
            row = [
                _fmt(self.lam[i]),
                _fmt(self.values[i].real),
                _fmt(self.values[i].imag),
                _fmt(self.coeff[i].real),
                _fmt(self.coeff[i].imag),
                _fmt(self.density[i]),
            ]
            if self.field == "complex":
                row.append("complex")
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())


def _fmt(x):
    return f"{x:.17g}"


def symmetric_grid(lam_max, step, exclude_zero, gap=1e-3):
    """Uniform grid over [-lam_max, lam_max], symmetric about 0.

    With exclude_zero the points in (-gap, gap) are dropped (for step
    sizes above gap that is exactly the origin).
    """
    k = int(round(lam_max / step))
    lam = step * np.arange(-k, k + 1)
    if exclude_zero:
        lam = lam[np.abs(lam) >= gap]
    return lam


def lagrange_interpolant(xs, ys, stencil=6):
    """Piecewise Lagrange interpolation on an (almost) uniform grid.

    Order-(stencil-1) polynomial through the nearest ``stencil`` nodes;
    handles the single missing origin of pole-excluded grids without any
    special casing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys)
    m = stencil

    def interp(q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        idx = np.searchsorted(xs, q)
        st = np.clip(idx - m // 2, 0, xs.size - m)
        cols = st[:, None] + np.arange(m)[None, :]
        xn = xs[cols]
        yn = ys[cols]
        out = np.zeros(q.shape, dtype=ys.dtype)
        for j in range(m):
            num = np.ones_like(q)
            den = np.ones_like(q)
            for k in range(m):
                if k == j:
                    continue
                num *= q - xn[:, k]
                den *= xn[:, j] - xn[:, k]
            out = out + yn[:, j] * (num / den)
        return out

    return interp


def invert_samples(samples: SpectralSamples, r, weight_power, cfg=DEFAULT_CONFIG):
    """Invert spectral samples back to the profile at radius r.

    Computes r^(-weight_power) / (2 pi) times the truncated inverse
    Mellin integral of m(lambda) = values / coeff over the sample window,
    integrating an interpolant of the grid (which bridges the excluded
    origin when the reduction constant has a pole there).  Warns when the
    samples have not decayed at the window edge.
    """
    r = float(r)
    if r <= 0.0:
        raise ValueError("radius must be positive")
    mv = samples.mellin_values()
    peak = float(np.max(np.abs(mv)))
    edge = max(abs(mv[0]), abs(mv[-1]))
    if peak > 0 and edge > TAIL_WARN_RATIO * peak:
        warnings.warn(
            f"spectral samples at the window edge are {edge / peak:.2e} of the peak",
            TruncationWarning,
            stacklevel=2,
        )
    interp = lagrange_interpolant(samples.lam, mv)
    lo, hi = samples.lam[0], samples.lam[-1]
    log_r = np.log(r)

    def integrand(lams):
        return interp(lams) * np.exp(1j * lams * log_r)

    eff = cfg if cfg.abs_tol > 0 else cfg.with_tolerance(abs_tol=1e-14 * max(peak, 1e-300) * (hi - lo))
    val, _ = quad_1d(integrand, (lo, hi), eff)
    return float((r**-weight_power * val / (2.0 * np.pi)).real)


def parseval_residual(profile, weight_power, area_const, coeff_fn, lam_max, cfg=DEFAULT_CONFIG):
    """Relative Parseval defect of the radial spectral decomposition.

    lhs  = area_const * integral r^(2 power - 1) |profile|^2 dr
    rhs  = integral over [-lam_max, lam_max] of |coeff * m|^2 w,
           w = (area_const / 2 pi) |coeff|^(-2)

    both sides by quadrature; the spectral side evaluates the
    coefficient and the density honestly at every node (their product is
    a well-conditioned pure multiplication, even next to coefficient
    poles where the density vanishes).
    """

    def lhs_integrand(rr):
        return rr ** (2.0 * weight_power - 1.0) * np.abs(profile(rr)) ** 2

    lhs, _ = quad_1d(lhs_integrand, (profile.r_min, profile.r_max), cfg)
    lhs = area_const * lhs.real
    if lhs == 0.0:
        return 0.0

    table = MellinTable(profile, weight_power, lam_max)

    def rhs_integrand(lams):
        c = coeff_fn(lams)
        ftil = c * table(lams)
        w = (area_const / (2.0 * np.pi)) / np.abs(c) ** 2
        return np.abs(ftil) ** 2 * w

    eff = cfg.with_tolerance(rel_tol=max(cfg.rel_tol, 1e-11), abs_tol=max(cfg.abs_tol, 1e-15 * lhs))
    left, _ = quad_1d(rhs_integrand, (-lam_max, 0.0), eff)
    right, _ = quad_1d(rhs_integrand, (0.0, lam_max), eff)
    rhs = (left + right).real
    return abs(lhs - rhs) / lhs
