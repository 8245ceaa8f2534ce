"""Truncated Taylor series (jets) for exact directional derivatives.

A jet holds coefficients c[0..K] of a univariate Taylor expansion at a
batch of base points, stored as an array of shape (K+1, m).  Composing a
quadratic jet (squared distance along a line) with sqrt and then with a
profile whose derivatives are exact yields exact k-th directional
derivatives of radial and linearly transformed test functions — the
continued-transform integrands need nothing else.
"""

from __future__ import annotations

import numpy as np
from math import factorial


def jet_from_quadratic(c0, c1, c2, order):
    """Jet of c0 + c1 t + c2 t^2 (exact; higher coefficients zero)."""
    m = np.broadcast(c0, c1, c2).shape or (1,)
    out = np.zeros((order + 1,) + tuple(np.shape(c0) or (1,)))
    out[0] = c0
    if order >= 1:
        out[1] = c1
    if order >= 2:
        out[2] = c2
    return out


def jet_mul(a, b):
    """Cauchy product truncated at the common order."""
    k = a.shape[0] - 1
    out = np.zeros_like(a)
    for i in range(k + 1):
        for j in range(k + 1 - i):
            out[i + j] += a[i] * b[j]
    return out


def jet_sqrt(a):
    """Jet of sqrt(a); requires a[0] > 0 everywhere."""
    k = a.shape[0] - 1
    out = np.zeros_like(a)
    y0 = np.sqrt(a[0])
    out[0] = y0
    inv = 0.5 / y0
    for n in range(1, k + 1):
        acc = a[n].copy()
        for j in range(1, n):
            acc -= out[j] * out[n - j]
        out[n] = acc * inv
    return out


def jet_apply(derivs_at_base, r_jet):
    """Compose a function (given its derivatives at r_jet[0]) with a jet.

    derivs_at_base: array (K+1, m) of f^(i) evaluated at the jet's
    constant term.  Returns the jet of f(r(t)).
    """
    k = r_jet.shape[0] - 1
    delta = r_jet.copy()
    delta[0] = 0.0
    out = np.zeros_like(r_jet)
    power = np.zeros_like(r_jet)
    power[0] = 1.0
    for i in range(k + 1):
        out += (derivs_at_base[i] / factorial(i)) * power
        if i < k:
            power = jet_mul(power, delta)
    return out


def directional_derivative(test_fn, points, direction, k):
    """k-th derivative of t -> f(points + t * direction) at t = 0.

    points: (m, n); direction: (n,).  Works for real and complex fields;
    the squared radius |A(x + t u)|^2 is an exact real quadratic in t.
    Returns an (m,) array (complex if the function carries a complex
    scale).
    """
    x = np.asarray(points)
    u = np.asarray(direction)
    if test_fn.matrix is not None:
        a = np.asarray(test_fn.matrix)
        x = x @ a.T
        u = a @ u
    if test_fn.field == "complex" or np.iscomplexobj(x):
        c0 = np.sum((x * x.conjugate()).real, axis=-1)
        c1 = 2.0 * (x @ u.conjugate()).real
        c2 = float(np.sum((u * u.conjugate()).real))
    else:
        c0 = np.sum(x * x, axis=-1)
        c1 = 2.0 * (x @ u)
        c2 = float(u @ u)
    r2 = jet_from_quadratic(c0, c1, c2, k)
    r = jet_sqrt(r2)
    base = test_fn.profile.derivatives_upto(r[0], k)
    val = jet_apply(base, r)
    out = factorial(k) * val[k]
    return test_fn.scale * out if test_fn.scale != 1.0 else out
