"""Radial test functions with exact derivatives.

The default family is the standard bump exp(-1/(1-u^2)) rescaled to a
support interval [r_min, r_max] bounded away from 0 and infinity.  Its
derivatives follow the recursion

    E^(k) = sum_{j<k} C(k-1, j) h^(j+1) E^(k-1-j),      E = exp(h),

with h(u) = -1/(1-u^2) differentiated in closed form through the partial
fractions 1/(1-u) and 1/(1+u), so no finite differencing enters anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np


class RadialProfile:
    """Smooth compactly supported function of r in (0, inf).

    evaluator and derivative evaluator are vectorized over r; derivatives
    are available up to order k_max and vanish (with all lower orders) at
    both support endpoints.
    """

    def __init__(
        self,
        r_min,
        r_max,
        value_fn,
        derivative_fn,
        k_max=8,
        family="custom",
        stack_fn=None,
    ):
        if not 0.0 < r_min < r_max < np.inf:
            raise ValueError("need 0 < r_min < r_max < inf")
        self.r_min = float(r_min)
        self.r_max = float(r_max)
        self.k_max = int(k_max)
        self.family = family
        self._value_fn = value_fn
        self._derivative_fn = derivative_fn
        self._stack_fn = stack_fn  # optional one-pass stack of orders 0..k
        self._sup = None

    def __call__(self, r):
        return self._value_fn(np.asarray(r, dtype=float))

    def derivative(self, r, k):
        if k == 0:
            return self(r)
        if k > self.k_max:
            raise ValueError(f"derivative order {k} exceeds k_max={self.k_max}")
        return self._derivative_fn(np.asarray(r, dtype=float), int(k))

    def derivatives_upto(self, r, k):
        """Stack of derivatives 0..k, shape (k+1, len(r))."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if k > self.k_max:
            raise ValueError(f"derivative order {k} exceeds k_max={self.k_max}")
        if self._stack_fn is not None:
            return self._stack_fn(r, int(k))
        out = np.empty((k + 1, r.size))
        out[0] = self(r)
        for j in range(1, k + 1):
            out[j] = self.derivative(r, j)
        return out

    def sup_norm(self):
        if self._sup is None:
            rr = np.linspace(self.r_min, self.r_max, 4001)
            self._sup = float(np.max(np.abs(self(rr))))
        return self._sup

    def __repr__(self):
        return (
            f"RadialProfile({self.family}, support=[{self.r_min}, {self.r_max}], "
            f"k_max={self.k_max})"
        )


def _bump_h_derivs(u, order, q):
    """h^(m)(u) for m = 1..order where h(u) = -(1-u^2)^(-q).

    Product rule on (1-u)^(-q) (1+u)^(-q), whose m-th derivatives are
    (q)_m (1-u)^(-q-m) and (-1)^m (q)_m (1+u)^(-q-m).
    """
    one_m = 1.0 - u
    one_p = 1.0 + u
    poch = [1.0]
    for j in range(order):
        poch.append(poch[-1] * (q + j))
    a = [poch[m] * one_m ** -(q + m) for m in range(order + 1)]
    b = [(-1.0) ** m * poch[m] * one_p ** -(q + m) for m in range(order + 1)]
    out = []
    for m in range(1, order + 1):
        acc = np.zeros_like(u)
        for j in range(m + 1):
            acc += comb(m, j) * a[j] * b[m - j]
        out.append(-acc)
    return out


def bump_profile(r_min, r_max, k_max=8, sharpness=1, depth=1.0):
    """Bump exp(-depth/(1-u^2)^sharpness) on [r_min, r_max], exact derivatives.

    The Mellin transform of the profile falls off like
    exp(-c depth^(1/(q+1)) |lambda|^(q/(q+1))) with q = sharpness, so
    raising sharpness or depth buys spectral decay when a truncated
    spectral integral has to reach tight accuracy at a moderate cutoff.
    The default (q = 1, depth = 1) is the classical bump.
    """
    r_min = float(r_min)
    r_max = float(r_max)
    q = int(sharpness)
    sigma = float(depth)
    if q < 1:
        raise ValueError("sharpness must be a positive integer")
    if sigma <= 0:
        raise ValueError("depth must be positive")
    scale = 2.0 / (r_max - r_min)
    center = 0.5 * (r_min + r_max)
    # inside this margin of the edge the value underflows to exactly 0
    edge = 1.0 - 1e-12

    def to_u(r):
        return scale * (r - center)

    def value(r):
        u = to_u(r)
        out = np.zeros_like(u)
        inside = np.abs(u) < edge
        w = 1.0 - u[inside] ** 2
        with np.errstate(over="ignore", under="ignore"):
            out[inside] = np.exp(-sigma * w**-q)
        return out

    def _stack(r, k):
        u = to_u(r)
        out = np.zeros((k + 1, u.size))
        inside = np.abs(u) < edge
        if not np.any(inside):
            return out
        ui = u[inside]
        with np.errstate(over="ignore", under="ignore"):
            e = [np.exp(-sigma * (1.0 - ui**2) ** -q)]
            h = [sigma * hm for hm in _bump_h_derivs(ui, k, q)]
            for m in range(1, k + 1):
                acc = np.zeros_like(ui)
                for j in range(m):
                    acc += comb(m - 1, j) * h[j] * e[m - 1 - j]
                e.append(acc)
        fac = 1.0
        for m in range(k + 1):
            d = e[m] * fac
            d[~np.isfinite(d)] = 0.0  # huge h-powers times underflowed exp
            out[m, inside] = d
            fac *= scale
        return out

    def derivative(r, k):
        return _stack(r, k)[k]

    name = f"bump(q={q}, depth={sigma:g})"
    return RadialProfile(
        r_min, r_max, value, derivative, k_max=k_max, family=name, stack_fn=_stack
    )


@dataclass(frozen=True)
class TestFunction:
    """Radial profile on R^n or C^n, optionally composed with a linear map.

    Represents scale * profile(|A x|); the group actions on orbit
    functions stay in this class (composing A and scale), so transformed
    test functions feed the same quadrature paths as plain radial ones.
    """

    profile: RadialProfile
    dim: int
    field: str = "real"  # "real" | "complex"
    matrix: np.ndarray | None = None
    scale: complex = 1.0
    _smin: float = dc_field(default=0.0, compare=False, repr=False)

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError("field must be 'real' or 'complex'")
        if self.matrix is not None:
            m = np.asarray(self.matrix)
            if m.shape != (self.dim, self.dim):
                raise ValueError("matrix shape mismatch")
            smin = float(np.linalg.svd(m, compute_uv=False)[-1])
            if smin <= 0.0:
                raise ValueError("composed matrix must be invertible")
            object.__setattr__(self, "_smin", smin)

    @property
    def is_radial(self):
        return self.matrix is None

    def radius(self, x):
        """|A x| per row of x (shape (m, dim))."""
        x = np.asarray(x)
        if self.matrix is not None:
            x = x @ np.asarray(self.matrix).T
        if self.field == "complex" or np.iscomplexobj(x):
            return np.sqrt(np.sum((x * x.conjugate()).real, axis=-1))
        return np.sqrt(np.sum(x * x, axis=-1))

    def evaluate(self, x):
        vals = self.profile(self.radius(x))
        return self.scale * vals if self.scale != 1.0 else vals

    def support_radius(self):
        """Radius of a ball containing the support."""
        if self.matrix is None:
            return self.profile.r_max
        return self.profile.r_max / self._smin

    def sup_norm(self):
        return abs(self.scale) * self.profile.sup_norm()

    def compose(self, a, factor):
        """New function x -> factor * f(a x)."""
        a = np.asarray(a)
        m = a if self.matrix is None else np.asarray(self.matrix) @ a
        return TestFunction(
            profile=self.profile,
            dim=self.dim,
            field=self.field,
            matrix=m,
            scale=self.scale * factor,
        )
